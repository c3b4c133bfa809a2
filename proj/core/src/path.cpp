#include "hfuv/path.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hfuv/error.hpp"
#include "hfuv/rng.hpp"

namespace hfuv {
namespace {

double draw_size(const JumpModel& j, Rng& rng) {
  if (const auto* atoms = std::get_if<AtomList>(&j.size)) {
    std::vector<double> probs;
    probs.reserve(atoms->atoms.size());
    for (const auto& a : atoms->atoms) probs.push_back(a.second);
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    return atoms->atoms[pick(rng)].first;
  }
  if (const auto* u = std::get_if<UniformSize>(&j.size)) {
    std::uniform_real_distribution<double> dist(u->a, u->b);
    for (;;) {
      const double z = dist(rng);
      if (z != 0.0) return z;
    }
  }
  const auto& tn = std::get<TruncNormalSize>(j.size);
  std::normal_distribution<double> dist(tn.mu, tn.s);
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    const double z = dist(rng);
    if (z != 0.0 && std::abs(z) >= tn.min_abs && std::abs(z) <= j.max_abs) return z;
  }
  throw SimulationError("truncated normal jump sizes: acceptance region has negligible mass", 0);
}

std::size_t interval_of(double s, std::size_t n) {
  auto i = static_cast<std::size_t>(std::ceil(s * static_cast<double>(n)));
  const double dn = static_cast<double>(n);
  while (i > 1 && static_cast<double>(i - 1) / dn >= s) --i;
  while (static_cast<double>(i) / dn < s) ++i;
  return std::max<std::size_t>(i, 1);
}

}  // namespace

std::size_t window_count(std::size_t n, double t) noexcept {
  const double nt = static_cast<double>(n) * t;
  return static_cast<std::size_t>(std::floor(nt * (1.0 + 1e-14)));
}

SamplePath simulate_path(const ModelConfig& cfg, std::size_t n, double T, std::uint64_t seed) {
  if (n < 1) throw ConfigError("simulate_path: n must be >= 1");
  if (!(T > 0.0)) throw ConfigError("simulate_path: T must be > 0");
  validate(cfg);

  const std::size_t N = window_count(n, T);
  const double dn = static_cast<double>(n);
  const double dt = 1.0 / dn;
  const double sqdt = std::sqrt(dt);
  const bool ito = cfg.vol.kind == VolKind::ItoSM;

  SamplePath path;
  path.T = T;
  path.n = n;
  path.drift = cfg.drift;
  path.seed = seed;

  // Jump times and sizes.
  Rng jump_rng(derive_seed(seed, "jumps"));
  std::size_t count = 0;
  if (cfg.jumps.fixed_count) {
    count = *cfg.jumps.fixed_count;
  } else if (cfg.jumps.intensity > 0.0) {
    std::poisson_distribution<std::size_t> poisson(cfg.jumps.intensity * T);
    count = poisson(jump_rng);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<double, double>> raw;
  raw.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = T * (1.0 - unif(jump_rng));  // (0, T]
    raw.emplace_back(s, draw_size(cfg.jumps, jump_rng));
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  // Brownian increments for W and (stochastic volatility only) V.
  Rng bm_rng(derive_seed(seed, "brownian"));
  Rng vol_rng(derive_seed(seed, "vol-brownian"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> dw(N), dv(ito ? N : 0);
  for (std::size_t i = 0; i < N; ++i) dw[i] = sqdt * gauss(bm_rng);
  for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = sqdt * gauss(vol_rng);

  // Volatility on the grid.
  std::vector<double> sigma(N + 1);
  sigma[0] = cfg.vol.sigma0;
  for (std::size_t i = 1; i <= N; ++i) {
    if (!ito) {
      sigma[i] = cfg.vol.sigma0;
      continue;
    }
    double s = sigma[i - 1] + cfg.vol.tilde_b * dt + cfg.vol.tilde_sigma * dw[i - 1] +
               cfg.vol.tilde_v * dv[i - 1];
    if (s < cfg.vol.floor_eps) {
      s = cfg.vol.floor_eps;
      if (++path.clamp_count > cfg.vol.clamp_budget)
        throw SimulationError("volatility floor clamp budget exceeded", i);
    }
    if (cfg.enforce_bound && std::abs(s) > cfg.bound_A)
      throw SimulationError("volatility exceeds bound_A", i);
    sigma[i] = s;
  }

  // Jump records with bridge offsets, processed interval by interval.
  Rng bridge_rng(derive_seed(seed, "bridge"));
  std::vector<double> jump_sum(N, 0.0);
  path.jumps.reserve(raw.size());
  std::size_t k = 0;
  while (k < raw.size()) {
    const std::size_t i = interval_of(raw[k].first, n);
    std::size_t end = k;
    while (end < raw.size() && interval_of(raw[end].first, n) == i) ++end;
    const double t0 = static_cast<double>(i - 1) * dt;
    const bool observed = i <= N;
    double prev_time = t0, prev_w = 0.0, prev_v = 0.0;
    const double w_end = observed ? dw[i - 1] : 0.0;
    const double v_end = (observed && ito) ? dv[i - 1] : 0.0;
    const double t1 = static_cast<double>(i) * dt;
    for (std::size_t q = k; q < end; ++q) {
      const double s = raw[q].first;
      JumpRecord rec;
      rec.time = s;
      rec.size = raw[q].second;
      rec.interval = i;
      double v_off = 0.0;
      if (observed) {
        // Brownian bridge from (prev_time, prev_w) to (t1, w_end).
        const double span = t1 - prev_time;
        const double frac = span > 0.0 ? (s - prev_time) / span : 0.0;
        const double var = span > 0.0 ? (s - prev_time) * (t1 - s) / span : 0.0;
        const double sd = std::sqrt(std::max(var, 0.0));
        rec.w_offset = prev_w + frac * (w_end - prev_w) + sd * gauss(bridge_rng);
        if (ito) v_off = prev_v + frac * (v_end - prev_v) + sd * gauss(bridge_rng);
        prev_time = s;
        prev_w = rec.w_offset;
        prev_v = v_off;
        jump_sum[i - 1] += rec.size;
      }
      const double base = sigma[std::min(i - 1, N)];
      double s_jump = base;
      if (ito && observed) {
        s_jump = base + cfg.vol.tilde_b * (s - t0) + cfg.vol.tilde_sigma * rec.w_offset +
                 cfg.vol.tilde_v * v_off;
        s_jump = std::max(s_jump, cfg.vol.floor_eps);
      }
      rec.sigma_pre = s_jump;
      rec.sigma_post = s_jump;
      path.jumps.push_back(rec);
    }
    k = end;
  }

  path.x_grid.assign(N + 1, 0.0);
  for (std::size_t i = 1; i <= N; ++i) {
    const double inc = cfg.drift * dt + sigma[i - 1] * dw[i - 1] + jump_sum[i - 1];
    path.x_grid[i] = path.x_grid[i - 1] + inc;
  }
  path.sigma_grid = std::move(sigma);
  path.w_increments = std::move(dw);
  return path;
}

std::vector<double> increments(const SamplePath& path, bool scaled, double t) {
  if (!(t > 0.0) || t > path.T * (1.0 + 1e-12))
    throw DomainError("increments: t must lie in (0, T]");
  const std::size_t count = std::min(window_count(path.n, t), path.intervals());
  const double scale = scaled ? std::sqrt(static_cast<double>(path.n)) : 1.0;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = scale * (path.x_grid[i + 1] - path.x_grid[i]);
  return out;
}

std::vector<double> first_order_increments(const SamplePath& path, double t) {
  if (!(t > 0.0) || t > path.T * (1.0 + 1e-12))
    throw DomainError("first_order_increments: t must lie in (0, T]");
  const std::size_t count = std::min(window_count(path.n, t), path.intervals());
  const double rn = std::sqrt(static_cast<double>(path.n));
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = rn * path.sigma_grid[i] * path.w_increments[i];
  return out;
}

JumpNeighborhood jump_neighborhood(const SamplePath& path, std::size_t p) {
  if (p >= path.jumps.size()) throw DomainError("jump_neighborhood: jump index out of range");
  const JumpRecord& rec = path.jumps[p];
  JumpNeighborhood out;
  if (rec.interval > path.intervals()) {
    out.observed = false;
    return out;
  }
  const double dn = static_cast<double>(path.n);
  const double t0 = static_cast<double>(rec.interval - 1) / dn;
  const double t1 = static_cast<double>(rec.interval) / dn;
  const double sig = path.sigma_grid[rec.interval - 1];
  const double dw = path.w_increments[rec.interval - 1];
  double before = 0.0, after = 0.0;
  for (std::size_t q = 0; q < path.jumps.size(); ++q) {
    if (q == p || path.jumps[q].interval != rec.interval) continue;
    out.shared_interval = true;
    if (q < p) before += path.jumps[q].size;
    else after += path.jumps[q].size;
  }
  const double rn = std::sqrt(dn);
  out.r_minus = rn * (path.drift * (rec.time - t0) + sig * rec.w_offset + before);
  out.r_plus = rn * (path.drift * (t1 - rec.time) + sig * (dw - rec.w_offset) + after);
  out.r = out.r_minus + out.r_plus;
  return out;
}

std::vector<JumpRecord> jumps_up_to(const SamplePath& path, double t) {
  std::vector<JumpRecord> out;
  for (const auto& j : path.jumps)
    if (j.time <= t) out.push_back(j);
  return out;
}

}  // namespace hfuv
