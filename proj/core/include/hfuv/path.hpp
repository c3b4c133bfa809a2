#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hfuv/model.hpp"

namespace hfuv {

struct JumpRecord {
  double time = 0.0;        // S_p in (0, T]
  double size = 0.0;        // Delta X_{S_p}
  double sigma_pre = 0.0;   // sigma_{S_p-}
  double sigma_post = 0.0;  // sigma_{S_p}
  std::size_t interval = 0; // i with (i-1)/n < S_p <= i/n
  double w_offset = 0.0;    // W_{S_p} - W_{(i-1)/n}
};

/// A simulated path on {0, 1/n, ..., floor(nT)/n}. Immutable once built.
struct SamplePath {
  double T = 1.0;
  std::size_t n = 1;
  double drift = 0.0;
  std::vector<double> x_grid;        // X_{i/n}, i = 0..floor(nT)
  std::vector<double> sigma_grid;    // sigma_{i/n}
  std::vector<double> w_increments;  // Delta_i^n W, i = 1..floor(nT)
  std::vector<JumpRecord> jumps;     // sorted by time
  std::uint64_t seed = 0;
  std::size_t clamp_count = 0;

  std::size_t intervals() const noexcept { return w_increments.size(); }
  bool flagged() const noexcept { return clamp_count > 0; }
};

/// floor(n t) with a guard against representation error in n * t.
std::size_t window_count(std::size_t n, double t) noexcept;

SamplePath simulate_path(const ModelConfig& cfg, std::size_t n, double T, std::uint64_t seed);

/// (Delta_i^n X)_{i <= floor(nt)}, multiplied by sqrt(n) when scaled.
std::vector<double> increments(const SamplePath& path, bool scaled, double t);

/// alpha_i^n = sqrt(n) sigma_{(i-1)/n} Delta_i^n W for i <= floor(nt).
std::vector<double> first_order_increments(const SamplePath& path, double t);

struct JumpNeighborhood {
  double r_minus = 0.0;  // sqrt(n) (X_{S_p-} - X_{(i-1)/n})
  double r_plus = 0.0;   // sqrt(n) (X_{i/n} - X_{S_p})
  double r = 0.0;
  bool shared_interval = false;  // another jump sits in the same interval
  bool observed = true;          // S_p <= floor(nT)/n
};

JumpNeighborhood jump_neighborhood(const SamplePath& path, std::size_t p);

/// Jumps with S_p <= t, in time order.
std::vector<JumpRecord> jumps_up_to(const SamplePath& path, double t);

}  // namespace hfuv
