#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hfuv/kernel.hpp"
#include "hfuv/path.hpp"

namespace hfuv {

/// One row of a limit breakdown; jump < 0 marks a term not tied to a jump.
struct LimitContribution {
  long jump = -1;
  double value = 0.0;
};

struct LimitValue {
  double value = 0.0;  // pairwise sum of contributions
  std::vector<LimitContribution> contributions;
  Regime regime = Regime::JumpLLN;
};

struct CondVariance {
  double total = 0.0;  // jump_term + field_term, >= 0
  double jump_term = 0.0;
  double field_term = 0.0;
  std::vector<double> per_jump;  // jump_term split over jumps with S_p <= t
};

/// Time weights of the left Riemann sum over [0, t] on the simulation grid,
/// merged by sigma value (ascending). Weights sum to t.
struct SigmaProfile {
  std::vector<double> sigma;
  std::vector<double> weight;
};

SigmaProfile sigma_profile(const SamplePath& path, double t);

/// Maximum number of jump tuples enumerated by any limit routine.
inline constexpr double kTupleBudget = 1e8;

/// Ground-truth quantities for the mixed regime, built once per (path, kernel, t).
/// With H = sum_r c_r prod_m u_{r,m} and A_{r,m} = int_0^t E[u_{r,m}(sigma_s U)] ds:
///   int rho_H(sigma_u, y) du = sum_r c_r prod_{m<l} A_{r,m} prod_{m>=l} u_{r,m}(y),
///   C(y, y') = a(y)^T M a(y'), a(y)_{(i,r)} = c_r prod_{m<l, m!=i} A_{r,m} prod_{m>=l} u_{r,m}(y),
///   M = sum_w weight_w Cov(u_{r,i}(sigma_w U), u_{r',j}(sigma_w U)).
class MixedModel {
 public:
  MixedModel(const SamplePath& path, const KernelSpec& k, double t, bool closed_form = true);

  const KernelSpec& kernel() const noexcept { return k_; }
  double t() const noexcept { return t_; }
  std::span<const JumpRecord> jumps() const noexcept { return jumps_; }

  double integrated_rho(std::span<const double> y) const;
  /// int rho_{d_j H}(sigma_u, y) du for a y-block coordinate j >= l.
  double integrated_rho_partial(std::size_t j, std::span<const double> y) const;

  std::vector<double> loadings(std::span<const double> y) const;
  /// Loadings summed over all (d-l)-tuples of jumps.
  std::vector<double> summed_loadings() const;
  const Eigen::MatrixXd& field_matrix() const noexcept { return m_; }
  double cov(std::span<const double> y, std::span<const double> y2) const;

  /// Sum over (d-l)-tuples of integrated_rho, split by the first tuple entry.
  LimitValue limit() const;
  double vtilde(std::size_t j, double y) const;
  CondVariance cond_var() const;

 private:
  double term_y_product(std::size_t r, std::span<const double> y, long diff_coord) const;

  KernelSpec k_;
  double t_;
  std::vector<JumpRecord> jumps_;
  std::vector<SeparableTerm> terms_;
  std::vector<std::vector<double>> a_;        // A_{r,m}, m < l
  std::vector<std::vector<double>> s_;        // sum over jumps of u_{r,m}(dX), m >= l
  Eigen::MatrixXd m_;                         // (l R) x (l R), index i * R + r
};

/// t^{d-l} sum over l-tuples of jumps of H(dX, 0); split by the first tuple entry.
LimitValue jump_limit(const SamplePath& path, const KernelSpec& k, double t);

/// sum over (d-l)-tuples of jumps of int_{[0,t]^l} rho_H(sigma_u, dX) du.
LimitValue mixed_limit(const SamplePath& path, const KernelSpec& k, double t, bool closed_form = true);

/// Sum over (l-1)-tuples of jumps of d_j H with y in slot j (< l) and the y-block at 0.
double vbar(const SamplePath& path, const KernelSpec& k, std::size_t j, double y, double t);

/// 1/2 t^{2(d-l)} sum_s (sum_j vbar_j(dX_s))^2 (sigma_{s-}^2 + sigma_s^2).
CondVariance cond_var_jump(const SamplePath& path, const KernelSpec& k, double t);

double cov_c(const SamplePath& path, const KernelSpec& k, std::span<const double> y, std::span<const double> y2,
             double t, bool closed_form = true);

double vtilde(const SamplePath& path, const KernelSpec& k, std::size_t j, double y, double t,
              bool closed_form = true);

CondVariance cond_var_mixed(const SamplePath& path, const KernelSpec& k, double t, bool closed_form = true);

}  // namespace hfuv
