#include "hfuv/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "hfuv/admissibility.hpp"
#include "hfuv/error.hpp"
#include "hfuv/ks.hpp"
#include "hfuv/law_sampler.hpp"
#include "hfuv/limits.hpp"
#include "hfuv/rng.hpp"
#include "hfuv/stats.hpp"
#include "hfuv/summation.hpp"

namespace hfuv {
namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  if (!std::isfinite(x)) return "";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// Two jumps up to t coalesced into one increment.
bool jump_collision(const SamplePath& p, double t) {
  const auto js = jumps_up_to(p, t);
  for (std::size_t a = 1; a < js.size(); ++a)
    if (js[a].interval == js[a - 1].interval) return true;
  return false;
}

constexpr const char* kCollision = "jump collision";
constexpr const char* kNoJump = "no-jump degenerate";

bool is_jump_regime(Regime r) { return r == Regime::JumpLLN || r == Regime::JumpCLT || r == Regime::GridTest; }

struct Moments {
  double mean = kNaN;
  double var = kNaN;
};

Moments moments(const std::vector<double>& x) {
  if (x.empty()) return {};
  const double m = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return {m, kNaN};
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
  return {m, pairwise_sum(sq) / static_cast<double>(x.size() - 1)};
}

json plan_echo(const ExperimentPlan& plan) {
  json j;
  j["kind"] = std::string(to_string(plan.kind));
  j["kernel"] = plan.kernel ? plan.kernel->to_text() : std::string();
  j["t"] = plan.t;
  j["T"] = plan.T;
  j["n_list"] = plan.n_list;
  j["reps"] = plan.reps;
  j["base_seed"] = plan.base_seed;
  return j;
}

// Simulation outcome of one replication; failures become exclusions.
struct Simulated {
  std::optional<SamplePath> path;
  std::string reason;
};

Simulated simulate(const ExperimentPlan& plan, std::size_t n, std::uint64_t seed) {
  try {
    return {simulate_path(plan.model, n, plan.T, seed), {}};
  } catch (const SimulationError& e) {
    return {std::nullopt, std::string("simulation: ") + e.what()};
  }
}

struct RepRow {
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t jumps = 0;
  double statistic = kNaN;
  double limit = kNaN;
  double error = kNaN;
  double rel_error = kNaN;
  double cond_var = kNaN;
  double z = kNaN;
  double scaled_error = kNaN;
  double limit_draw = kNaN;
  bool collision = false;
  std::string excluded;  // empty when used
};

std::string rows_csv(const std::vector<RepRow>& rows) {
  std::ostringstream os;
  os << "n,rep,seed,jumps,statistic,limit,error,rel_error,cond_var,z,excluded\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.rep << ',' << r.seed << ',' << r.jumps << ',' << num(r.statistic) << ',' << num(r.limit)
       << ',' << num(r.error) << ',' << num(r.rel_error) << ',' << num(r.cond_var) << ',' << num(r.z) << ','
       << r.excluded << '\n';
  return os.str();
}

void require_admissible(const ExperimentPlan& plan) {
  plan.validate();
}

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::LLN: return "LLN";
    case ExperimentKind::CLT_jump: return "CLT_jump";
    case ExperimentKind::CLT_mixed: return "CLT_mixed";
    case ExperimentKind::RNP: return "RNP";
    case ExperimentKind::GRID: return "GRID";
    case ExperimentKind::ZTRUNC: return "ZTRUNC";
    case ExperimentKind::QV: return "QV";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::LLN, ExperimentKind::CLT_jump, ExperimentKind::CLT_mixed, ExperimentKind::RNP,
                 ExperimentKind::GRID, ExperimentKind::ZTRUNC, ExperimentKind::QV})
    if (to_string(k) == s) return k;
  throw ConfigError("experiment.kind: unknown kind '" + std::string(s) +
                    "' (expected LLN, CLT_jump, CLT_mixed, RNP, GRID, ZTRUNC or QV)");
}

void ExperimentPlan::validate() const {
  hfuv::validate(model);
  if (reps < 1) throw ConfigError("experiment.reps: must be >= 1");
  if (n_list.empty()) throw ConfigError("experiment.n_list: must not be empty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw ConfigError("experiment.n_list: entries must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("experiment.n_list: must be strictly increasing");
  }
  if (!(T > 0.0)) throw ConfigError("experiment.T: must be > 0");
  if (!(t > 0.0) || t > T) throw ConfigError("experiment.t: must satisfy 0 < t <= T");
  if (window_count(n_list.front(), t) < 1) throw ConfigError("experiment.t: floor(n t) must be >= 1 for every n");
  if (aug_seeds < 1) throw ConfigError("experiment.aug_seeds: must be >= 1");
  for (double b : beta_grid)
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("experiment.beta_grid: beta must be > 0");
  if (kind == ExperimentKind::GRID && beta_grid.empty())
    throw ConfigError("experiment.beta_grid: required for GRID experiments");

  const bool needs_kernel =
      kind == ExperimentKind::LLN || kind == ExperimentKind::CLT_jump || kind == ExperimentKind::CLT_mixed ||
      kind == ExperimentKind::ZTRUNC;
  if (!needs_kernel) return;
  if (!kernel) throw ConfigError("kernel: required for " + std::string(to_string(kind)) + " experiments");
  kernel->validate();
  const Regime r = kernel->regime;
  if ((kind == ExperimentKind::CLT_jump || kind == ExperimentKind::ZTRUNC) &&
      r != Regime::JumpCLT && r != Regime::GridTest)
    throw ConfigError("kernel.regime: " + std::string(to_string(kind)) + " needs regime JumpCLT or GridTest");
  if (kind == ExperimentKind::CLT_mixed && r != Regime::MixedCLT)
    throw ConfigError("kernel.regime: CLT_mixed needs regime MixedCLT");
  const auto rep = check_admissibility(*kernel);
  if (!rep.passed()) throw ConfigError("kernel: admissibility failed: " + rep.first_failure());
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t rep_seed(std::uint64_t base_seed, std::string_view stream, std::size_t n, std::size_t rep) noexcept {
  return derive_seed(derive_seed(base_seed, stream), n, rep);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return kNaN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return kNaN;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<double> beta_range(double a, double b, double step) {
  if (!(step > 0.0) || !(a > 0.0) || b < a) throw ConfigError("beta: range must satisfy 0 < a <= b and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = a + static_cast<double>(k) * step;
  return out;
}

ExperimentReport run_lln(const ExperimentPlan& plan, RunOptions opts) {
  require_admissible(plan);
  const KernelSpec& k = *plan.kernel;
  const bool jump = is_jump_regime(k.regime);
  json tables = json::array();
  std::vector<RepRow> all;
  std::vector<double> ns, med_abs, med_rel;
  for (std::size_t n : plan.n_list) {
    std::vector<RepRow> rows(plan.reps);
    parallel_for(plan.reps, opts.threads, [&](std::size_t r) {
      RepRow& row = rows[r];
      row.n = n;
      row.rep = r;
      row.seed = rep_seed(plan.base_seed, "path", n, r);
      auto sim = simulate(plan, n, row.seed);
      if (!sim.path) {
        row.excluded = sim.reason;
        return;
      }
      const SamplePath& p = *sim.path;
      row.jumps = jumps_up_to(p, plan.t).size();
      row.collision = jump_collision(p, plan.t);
      row.statistic = jump ? v_stat(p, k, plan.t).value : y_stat(p, k, plan.t).value;
      row.limit = jump ? jump_limit(p, k, plan.t).value : mixed_limit(p, k, plan.t).value;
      row.error = row.statistic - row.limit;
      if (row.limit != 0.0) row.rel_error = std::abs(row.error) / std::abs(row.limit);
    });
    std::vector<double> abs_err, rel_err, stat, lim;
    std::size_t excluded = 0, collisions = 0;
    for (const auto& r : rows) {
      if (!r.excluded.empty()) {
        ++excluded;
        continue;
      }
      collisions += r.collision;
      abs_err.push_back(std::abs(r.error));
      if (std::isfinite(r.rel_error)) rel_err.push_back(r.rel_error);
      stat.push_back(r.statistic);
      lim.push_back(r.limit);
    }
    json t;
    t["n"] = n;
    t["reps"] = plan.reps;
    t["used"] = abs_err.size();
    t["excluded"] = excluded;
    t["jump_collisions"] = collisions;
    t["median_abs_error"] = median(abs_err);
    t["q10_abs_error"] = quantile(abs_err, 0.1);
    t["q90_abs_error"] = quantile(abs_err, 0.9);
    t["median_rel_error"] = median(rel_err);
    t["rel_error_count"] = rel_err.size();
    t["mean_statistic"] = moments(stat).mean;
    t["mean_limit"] = moments(lim).mean;
    tables.push_back(t);
    ns.push_back(static_cast<double>(n));
    med_abs.push_back(median(abs_err));
    med_rel.push_back(median(rel_err));
    all.insert(all.end(), rows.begin(), rows.end());
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["statistic"] = jump ? "V" : "Y";
  out["per_n"] = tables;
  out["rate"] = {{"slope_median_abs_error", loglog_slope(ns, med_abs)},
                 {"slope_median_rel_error", loglog_slope(ns, med_rel)}};
  return {out, rows_csv(all), {}};
}

ExperimentReport run_qv(const ExperimentPlan& plan, RunOptions opts) {
  plan.validate();
  json tables = json::array();
  std::vector<RepRow> all;
  for (std::size_t n : plan.n_list) {
    std::vector<RepRow> rows(plan.reps);
    parallel_for(plan.reps, opts.threads, [&](std::size_t r) {
      RepRow& row = rows[r];
      row.n = n;
      row.rep = r;
      row.seed = rep_seed(plan.base_seed, "path", n, r);
      auto sim = simulate(plan, n, row.seed);
      if (!sim.path) {
        row.excluded = sim.reason;
        return;
      }
      const SamplePath& p = *sim.path;
      const auto jumps = jumps_up_to(p, plan.t);
      row.jumps = jumps.size();
      row.statistic = realized_qv(p, plan.t).value;
      const auto prof = sigma_profile(p, plan.t);
      std::vector<double> parts;
      for (std::size_t w = 0; w < prof.sigma.size(); ++w) parts.push_back(prof.weight[w] * prof.sigma[w] * prof.sigma[w]);
      for (const auto& j : jumps) parts.push_back(j.size * j.size);
      row.limit = pairwise_sum(parts);
      row.error = row.statistic - row.limit;
      if (row.limit != 0.0) row.rel_error = std::abs(row.error) / std::abs(row.limit);
    });
    std::vector<double> stat, lim, abs_err;
    std::size_t excluded = 0;
    for (const auto& r : rows) {
      if (!r.excluded.empty()) {
        ++excluded;
        continue;
      }
      stat.push_back(r.statistic);
      lim.push_back(r.limit);
      abs_err.push_back(std::abs(r.error));
    }
    const auto ms = moments(stat);
    json t;
    t["n"] = n;
    t["reps"] = plan.reps;
    t["used"] = stat.size();
    t["excluded"] = excluded;
    t["mean_qv"] = ms.mean;
    t["se_mean_qv"] = std::sqrt(ms.var / static_cast<double>(stat.size()));
    t["mean_limit"] = moments(lim).mean;
    t["median_abs_error"] = median(abs_err);
    tables.push_back(t);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["statistic"] = "QV";
  out["per_n"] = tables;
  return {out, rows_csv(all), {}};
}

ExperimentReport run_clt(const ExperimentPlan& plan, RunOptions opts) {
  require_admissible(plan);
  const KernelSpec& k = *plan.kernel;
  const bool mixed = k.regime == Regime::MixedCLT;
  if (plan.kind == ExperimentKind::CLT_mixed && !mixed)
    throw ConfigError("kernel.regime: CLT_mixed needs regime MixedCLT");
  json tables = json::array();
  std::vector<RepRow> all;
  std::ostringstream samples;
  samples << "n,rep,z,scaled_error,limit_draw\n";
  for (std::size_t n : plan.n_list) {
    const double rn = std::sqrt(static_cast<double>(n));
    std::vector<RepRow> rows(plan.reps);
    parallel_for(plan.reps, opts.threads, [&](std::size_t r) {
      RepRow& row = rows[r];
      row.n = n;
      row.rep = r;
      row.seed = rep_seed(plan.base_seed, "path", n, r);

      if (plan.two_sample) {
        // Independent path and augmentation for the limit-law sample.
        auto other = simulate(plan, n, rep_seed(plan.base_seed, "limit-draw", n, r));
        if (other.path && !(mixed && other.path->flagged())) {
          const auto aug = augment(*other.path, rep_seed(plan.base_seed, "augment", n, r));
          row.limit_draw = mixed ? sample_v_mixed(MixedModel(*other.path, k, plan.t), aug).value
                                 : sample_u_jump(*other.path, k, aug, plan.t).value;
        }
      }

      auto sim = simulate(plan, n, row.seed);
      if (!sim.path) {
        row.excluded = sim.reason;
        return;
      }
      const SamplePath& p = *sim.path;
      if (mixed && p.flagged()) {
        row.excluded = "volatility floor clamped";
        return;
      }
      row.jumps = jumps_up_to(p, plan.t).size();
      if (jump_collision(p, plan.t)) {
        row.excluded = kCollision;
        return;
      }
      if (mixed) {
        const MixedModel model(p, k, plan.t);
        row.statistic = y_stat(p, k, plan.t).value;
        row.limit = model.limit().value;
        row.cond_var = model.cond_var().total;
      } else {
        row.statistic = v_stat(p, k, plan.t).value;
        row.limit = jump_limit(p, k, plan.t).value;
        row.cond_var = cond_var_jump(p, k, plan.t).total;
      }
      row.error = row.statistic - row.limit;
      row.scaled_error = rn * row.error;
      if (!(row.cond_var > 0.0)) {
        row.excluded = kNoJump;
        return;
      }
      row.z = row.scaled_error / std::sqrt(row.cond_var);
    });

    std::vector<double> z, scaled, draws;
    std::size_t excluded = 0, degenerate = 0, collisions = 0;
    for (const auto& r : rows) {
      if (std::isfinite(r.scaled_error)) scaled.push_back(r.scaled_error);
      if (std::isfinite(r.limit_draw)) draws.push_back(r.limit_draw);
      if (!r.excluded.empty()) {
        ++excluded;
        degenerate += r.excluded == kNoJump;
        collisions += r.excluded == kCollision;
        continue;
      }
      z.push_back(r.z);
      samples << n << ',' << r.rep << ',' << num(r.z) << ',' << num(r.scaled_error) << ',' << num(r.limit_draw)
              << '\n';
    }
    json t;
    t["n"] = n;
    t["reps"] = plan.reps;
    t["used"] = z.size();
    t["excluded"] = excluded;
    t["excluded_no_jump"] = degenerate;
    t["excluded_collision"] = collisions;
    t["degenerate"] = z.empty() && degenerate > 0 ? json(kNoJump) : json(nullptr);
    const auto mz = moments(z);
    t["mean_z"] = mz.mean;
    t["var_z"] = mz.var;
    if (!z.empty()) {
      const auto ks = ks_normal(z);
      t["ks_statistic"] = ks.statistic;
      t["ks_p_value"] = ks.p_value;
    } else {
      t["ks_statistic"] = nullptr;
      t["ks_p_value"] = nullptr;
    }
    if (plan.two_sample && !scaled.empty() && !draws.empty()) {
      const auto ks2 = ks_two_sample(scaled, draws);
      t["two_sample"] = {{"statistic", ks2.statistic}, {"p_value", ks2.p_value}, {"n_scaled", ks2.n1},
                         {"n_draws", ks2.n2}};
    } else {
      t["two_sample"] = nullptr;
    }
    tables.push_back(t);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["statistic"] = mixed ? "Y" : "V";
  out["per_n"] = tables;
  return {out, rows_csv(all), samples.str()};
}

ExperimentReport run_rnp_check(const ExperimentPlan& plan, RunOptions opts) {
  plan.validate();
  json tables = json::array();
  std::vector<RepRow> all;
  for (std::size_t n : plan.n_list) {
    std::vector<RepRow> rows(plan.reps);
    parallel_for(plan.reps, opts.threads, [&](std::size_t r) {
      RepRow& row = rows[r];
      row.n = n;
      row.rep = r;
      row.seed = rep_seed(plan.base_seed, "path", n, r);
      auto other = simulate(plan, n, rep_seed(plan.base_seed, "limit-draw", n, r));
      if (other.path && !other.path->jumps.empty())
        row.limit_draw = augment(*other.path, rep_seed(plan.base_seed, "augment", n, r)).draws[0].r;
      auto sim = simulate(plan, n, row.seed);
      if (!sim.path) {
        row.excluded = sim.reason;
        return;
      }
      row.jumps = sim.path->jumps.size();
      if (sim.path->jumps.empty()) {
        row.excluded = "no jump";
        return;
      }
      const auto nb = jump_neighborhood(*sim.path, 0);
      if (!nb.observed) {
        row.excluded = "jump beyond the last grid point";
        return;
      }
      row.statistic = nb.r;
    });
    std::vector<double> rnp, draws;
    std::size_t excluded = 0;
    for (const auto& r : rows) {
      if (std::isfinite(r.limit_draw)) draws.push_back(r.limit_draw);
      if (!r.excluded.empty()) {
        ++excluded;
        continue;
      }
      rnp.push_back(r.statistic);
    }
    json t;
    t["n"] = n;
    t["reps"] = plan.reps;
    t["used"] = rnp.size();
    t["excluded"] = excluded;
    t["mean_rnp"] = moments(rnp).mean;
    t["var_rnp"] = moments(rnp).var;
    t["mean_draw"] = moments(draws).mean;
    t["var_draw"] = moments(draws).var;
    if (!rnp.empty() && !draws.empty()) {
      const auto ks = ks_two_sample(rnp, draws);
      t["ks_statistic"] = ks.statistic;
      t["ks_p_value"] = ks.p_value;
    } else {
      t["ks_statistic"] = nullptr;
      t["ks_p_value"] = nullptr;
    }
    tables.push_back(t);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["statistic"] = "R(n,p)";
  out["per_n"] = tables;
  return {out, rows_csv(all), {}};
}

ExperimentReport run_ztrunc(const ExperimentPlan& plan, RunOptions opts) {
  require_admissible(plan);
  const KernelSpec& k = *plan.kernel;
  const std::size_t n = plan.n_list.front();
  json paths = json::array();
  std::ostringstream csv;
  csv << "rep,seed,jumps,m,median_abs_deviation\n";
  for (std::size_t r = 0; r < plan.reps; ++r) {
    const std::uint64_t seed = rep_seed(plan.base_seed, "path", n, r);
    auto sim = simulate(plan, n, seed);
    json entry;
    entry["rep"] = r;
    entry["seed"] = seed;
    if (!sim.path) {
      entry["excluded"] = sim.reason;
      paths.push_back(entry);
      continue;
    }
    const SamplePath& p = *sim.path;
    const std::size_t J = jumps_up_to(p, plan.t).size();
    std::vector<std::size_t> ms = plan.truncation_m;
    if (ms.empty())
      for (std::size_t m = 0; m <= J; ++m) ms.push_back(m);
    std::sort(ms.begin(), ms.end());
    std::vector<std::vector<double>> dev(ms.size(), std::vector<double>(plan.aug_seeds));
    parallel_for(plan.aug_seeds, opts.threads, [&](std::size_t s) {
      const auto aug = augment(p, rep_seed(plan.base_seed, "augment", r, s));
      const double full = sample_u_jump(p, k, aug, plan.t).value;
      for (std::size_t i = 0; i < ms.size(); ++i) dev[i][s] = std::abs(truncated_z(p, k, ms[i], aug, plan.t) - full);
    });
    json rows = json::array();
    bool nonincreasing = true;
    double worst = 0.0, prev = kNaN;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const double med = median(dev[i]);
      rows.push_back({{"m", ms[i]}, {"median_abs_deviation", med}});
      csv << r << ',' << seed << ',' << J << ',' << ms[i] << ',' << num(med) << '\n';
      if (std::isfinite(prev) && med > prev) {
        nonincreasing = false;
        worst = std::max(worst, (med - prev) / prev);
      }
      prev = med;
    }
    entry["jumps"] = J;
    entry["per_m"] = rows;
    entry["nonincreasing"] = nonincreasing;
    entry["max_relative_increase"] = worst;
    paths.push_back(entry);
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["statistic"] = "median |Z(m) - Z(J)|";
  out["n"] = n;
  out["aug_seeds"] = plan.aug_seeds;
  out["paths"] = paths;
  return {out, csv.str(), {}};
}

namespace {

struct GridRow {
  double beta = 0.0, statistic = kNaN, normalized = kNaN, limit = kNaN, cond_var = kNaN, studentized = kNaN;
};

ExperimentReport grid_impl(std::span<const double> dx, std::size_t n, const SamplePath* path,
                           const std::vector<double>& beta_grid, double t, RunOptions opts) {
  if (beta_grid.empty()) throw ConfigError("beta: grid must not be empty");
  for (double b : beta_grid)
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta: beta must be > 0");
  const IndexWindow w = make_window(n, t, dx.size());
  std::vector<double> fourth(w.count);
  for (std::size_t i = 0; i < w.count; ++i) fourth[i] = std::pow(dx[i], 4);
  const double s4 = pairwise_sum(fourth);
  const double norm = s4 * s4;
  std::vector<GridRow> rows(beta_grid.size());
  parallel_for(beta_grid.size(), opts.threads, [&](std::size_t b) {
    const KernelSpec k = grid_test_kernel(beta_grid[b]);
    GridRow& row = rows[b];
    row.beta = beta_grid[b];
    row.statistic = v_stat(IncrementData{dx, n}, k, t).value;
    if (norm > 0.0) row.normalized = row.statistic / norm;
    if (path) {
      row.limit = jump_limit(*path, k, t).value;
      row.cond_var = cond_var_jump(*path, k, t).total;
      if (row.cond_var > 0.0)
        row.studentized = std::sqrt(static_cast<double>(n)) * (row.statistic - row.limit) / std::sqrt(row.cond_var);
    }
  });
  json table = json::array();
  std::ostringstream csv;
  csv << "beta,statistic,normalized,limit,cond_var,studentized\n";
  std::size_t best = 0;
  for (std::size_t b = 0; b < rows.size(); ++b) {
    const auto& r = rows[b];
    table.push_back({{"beta", r.beta}, {"statistic", r.statistic}, {"normalized", r.normalized}, {"limit", r.limit},
                     {"cond_var", r.cond_var}, {"studentized", r.studentized}});
    csv << num(r.beta) << ',' << num(r.statistic) << ',' << num(r.normalized) << ',' << num(r.limit) << ','
        << num(r.cond_var) << ',' << num(r.studentized) << '\n';
    if (r.statistic < rows[best].statistic) best = b;
  }
  json out;
  out["statistic"] = "sum_{i,j} |dX_i|^4 |dX_j|^4 sin^2(pi (dX_i - dX_j) / beta)";
  out["n"] = n;
  out["t"] = t;
  out["increments"] = w.count;
  out["ground_truth"] = path != nullptr;
  out["argmin_beta"] = rows[best].beta;
  out["min_normalized"] = rows[best].normalized;
  out["per_beta"] = table;
  return {out, csv.str(), {}};
}

}  // namespace

ExperimentReport grid_scan(const SamplePath& path, const std::vector<double>& beta_grid, double t, RunOptions opts) {
  const auto dx = increments(path, false, path.T);
  return grid_impl(dx, path.n, &path, beta_grid, t, opts);
}

ExperimentReport grid_scan(const std::vector<double>& dx, std::size_t n, const std::vector<double>& beta_grid,
                           double t, RunOptions opts) {
  return grid_impl(dx, n, nullptr, beta_grid, t, opts);
}

ExperimentReport run_grid(const ExperimentPlan& plan, RunOptions opts) {
  plan.validate();
  const std::size_t n = plan.n_list.front();
  json scans = json::array();
  std::string csv;
  for (std::size_t r = 0; r < plan.reps; ++r) {
    const std::uint64_t seed = rep_seed(plan.base_seed, "path", n, r);
    auto sim = simulate(plan, n, seed);
    if (!sim.path) {
      scans.push_back({{"rep", r}, {"seed", seed}, {"excluded", sim.reason}});
      continue;
    }
    auto rep = grid_scan(*sim.path, plan.beta_grid, plan.t, opts);
    json entry;
    entry["rep"] = r;
    entry["seed"] = seed;
    entry["jumps"] = jumps_up_to(*sim.path, plan.t).size();
    for (auto& [key, v] : rep.tables.items()) entry[key] = v;
    scans.push_back(entry);
    std::istringstream lines(rep.errors_csv);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
      if (header) {
        if (csv.empty()) csv = "rep," + line + "\n";
        header = false;
        continue;
      }
      csv += std::to_string(r) + "," + line + "\n";
    }
  }
  json out;
  out["experiment"] = plan_echo(plan);
  out["scans"] = scans;
  return {out, csv, {}};
}

ExperimentReport run_experiment(const ExperimentPlan& plan, RunOptions opts) {
  switch (plan.kind) {
    case ExperimentKind::LLN: return run_lln(plan, opts);
    case ExperimentKind::QV: return run_qv(plan, opts);
    case ExperimentKind::CLT_jump:
    case ExperimentKind::CLT_mixed: return run_clt(plan, opts);
    case ExperimentKind::RNP: return run_rnp_check(plan, opts);
    case ExperimentKind::GRID: return run_grid(plan, opts);
    case ExperimentKind::ZTRUNC: return run_ztrunc(plan, opts);
  }
  throw ConfigError("experiment.kind: unsupported");
}

}  // namespace hfuv
