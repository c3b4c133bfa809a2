#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfuv/kernel.hpp"
#include "hfuv/model.hpp"
#include "hfuv/path.hpp"

namespace hfuv {

enum class ExperimentKind { LLN, CLT_jump, CLT_mixed, RNP, GRID, ZTRUNC, QV };

std::string_view to_string(ExperimentKind k) noexcept;
ExperimentKind parse_experiment_kind(std::string_view s);

struct ExperimentPlan {
  ModelConfig model;
  std::optional<KernelSpec> kernel;
  ExperimentKind kind = ExperimentKind::LLN;
  double t = 1.0;
  double T = 1.0;
  std::vector<std::size_t> n_list{1024};
  std::size_t reps = 100;
  std::uint64_t base_seed = 1;
  std::vector<double> beta_grid;          // GRID
  std::vector<std::size_t> truncation_m;  // ZTRUNC; empty means 0..J
  std::size_t aug_seeds = 500;            // ZTRUNC augmentation draws per path
  bool two_sample = true;                 // CLT: compare against limit-law draws

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

/// report.json holds only seed-determined content; manifest-level data
/// (thread count, wall time) is added by the caller.
struct ExperimentReport {
  nlohmann::ordered_json tables;
  std::string errors_csv;   // one row per (n, rep)
  std::string samples_csv;  // raw samples, may be empty
};

struct RunOptions {
  std::size_t threads = 1;
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers. If tasks throw,
/// the exception of the lowest index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

/// Path seed of replication `rep` at grid size `n` within a named stream.
std::uint64_t rep_seed(std::uint64_t base_seed, std::string_view stream, std::size_t n, std::size_t rep) noexcept;

ExperimentReport run_lln(const ExperimentPlan& plan, RunOptions opts = {});
ExperimentReport run_qv(const ExperimentPlan& plan, RunOptions opts = {});
ExperimentReport run_clt(const ExperimentPlan& plan, RunOptions opts = {});
ExperimentReport run_rnp_check(const ExperimentPlan& plan, RunOptions opts = {});
ExperimentReport run_ztrunc(const ExperimentPlan& plan, RunOptions opts = {});

/// Grid test on a simulated path (ground truth available) or on raw increments.
ExperimentReport grid_scan(const SamplePath& path, const std::vector<double>& beta_grid, double t,
                           RunOptions opts = {});
ExperimentReport grid_scan(const std::vector<double>& increments, std::size_t n, const std::vector<double>& beta_grid,
                           double t, RunOptions opts = {});
/// Simulates one path per rep from the plan and scans each.
ExperimentReport run_grid(const ExperimentPlan& plan, RunOptions opts = {});

ExperimentReport run_experiment(const ExperimentPlan& plan, RunOptions opts = {});

/// "a:b:step" expanded as a + k step for k = 0..floor((b - a) / step + 1e-9).
std::vector<double> beta_range(double a, double b, double step);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace hfuv
