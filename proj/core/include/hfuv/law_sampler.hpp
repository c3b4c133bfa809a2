#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hfuv/kernel.hpp"
#include "hfuv/limits.hpp"
#include "hfuv/path.hpp"

namespace hfuv {

struct JumpDraw {
  double kappa = 0.5;
  double psi_minus = 0.0;
  double psi_plus = 0.0;
  double r_minus = 0.0;  // sqrt(kappa) sigma_{S-} psi_-
  double r_plus = 0.0;   // sqrt(1 - kappa) sigma_S psi_+
  double r = 0.0;        // r_minus + r_plus
};

/// Extension-space variables for every recorded jump of a path.
struct JumpAugmentation {
  std::uint64_t seed = 0;
  std::vector<JumpDraw> draws;  // indexed like path.jumps
};

/// Jump p uses its own stream derive_seed(seed, p), so draws do not depend on J.
JumpAugmentation augment(const SamplePath& path, std::uint64_t seed);

struct LimitDraw {
  double value = 0.0;               // jump_term + field_term
  double jump_term = 0.0;           // pairwise sum of per_jump
  double field_term = 0.0;          // mixed case only
  std::vector<double> per_jump;     // terms grouped by the jump carrying R
  std::uint64_t aug_seed = 0;
};

/// t^{d-l} sum over l-tuples of jumps of sum_j d_j H(dX_tuple, 0) R_{k_j}.
LimitDraw sample_u_jump(const SamplePath& path, const KernelSpec& k, const JumpAugmentation& aug, double t);

struct MixedDrawOptions {
  bool include_field = true;  // false drops the Gaussian field (diagnostic)
};

/// Jump-driven term from integrated rho of d_j H plus the Gaussian field
/// evaluated at the distinct (d-l)-tuples of jump sizes.
LimitDraw sample_v_mixed(const MixedModel& model, const JumpAugmentation& aug, MixedDrawOptions opts = {});

/// sample_u_jump restricted to the m largest |dX| among jumps with S_p <= t.
double truncated_z(const SamplePath& path, const KernelSpec& k, std::size_t m, const JumpAugmentation& aug,
                   double t);

}  // namespace hfuv
