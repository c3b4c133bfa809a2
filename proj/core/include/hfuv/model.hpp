#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace hfuv {

enum class VolKind { Constant, ItoSM };

/// sigma_t = sigma0 + int tilde_b ds + int tilde_sigma dW + int tilde_v dV,
/// with V a Brownian motion independent of W. Euler-discretised on the grid.
struct VolatilityModel {
  VolKind kind = VolKind::Constant;
  double sigma0 = 1.0;
  double tilde_b = 0.0;
  double tilde_sigma = 0.0;
  double tilde_v = 0.0;
  double floor_eps = 1e-4;
  // Number of floor clamps tolerated per path before simulation fails.
  std::size_t clamp_budget = 64;
};

struct AtomList {
  std::vector<std::pair<double, double>> atoms;  // (value, probability)
};

struct UniformSize {
  double a = 0.0;
  double b = 1.0;
};

// N(mu, s^2) conditioned on min_abs <= |z| <= max_abs.
struct TruncNormalSize {
  double mu = 0.0;
  double s = 1.0;
  double min_abs = 0.0;
};

using SizeDistribution = std::variant<AtomList, UniformSize, TruncNormalSize>;

struct JumpModel {
  double intensity = 0.0;  // compound-Poisson rate per unit time
  SizeDistribution size = AtomList{{{1.0, 1.0}}};
  double max_abs = 1.0;
  // When set, the jump count over (0,T] is fixed instead of Poisson.
  std::optional<std::size_t> fixed_count;
};

struct ModelConfig {
  double drift = 0.0;
  VolatilityModel vol;
  JumpModel jumps;
  double bound_A = 10.0;
  // Reject paths whose grid sigma leaves [-bound_A, bound_A].
  bool enforce_bound = false;
};

/// Throws ConfigError naming the violated constraint.
void validate(const ModelConfig& cfg);

}  // namespace hfuv
