#include "hfuv/stats.hpp"

#include <cmath>
#include <vector>

#include "hfuv/error.hpp"
#include "hfuv/gaussian.hpp"
#include "hfuv/summation.hpp"

namespace hfuv {
namespace {

constexpr std::size_t kNestedMaxD = 3;
constexpr std::size_t kNestedMaxCount = 10'000;
constexpr std::size_t kMaxSeparableRank = 4096;

std::span<const double> window_data(IncrementData data, std::size_t count) { return data.dx.first(count); }

double sum_mapped(std::span<const double> z, double scale, const UnaryFactor& f) {
  std::vector<double> vals(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) vals[i] = f(scale * z[i]);
  return pairwise_sum(vals);
}

// sum over all d-tuples of H(scale_1 z_{i_1}, ..., scale_d z_{i_d}).
double tensor_sum_factorized(std::span<const double> z, std::span<const double> scales,
                             const std::vector<SeparableTerm>& terms) {
  std::vector<double> per_term(terms.size());
  for (std::size_t r = 0; r < terms.size(); ++r) {
    double prod = terms[r].coeff;
    for (std::size_t k = 0; k < scales.size() && prod != 0.0; ++k)
      prod *= sum_mapped(z, scales[k], terms[r].factors[k]);
    per_term[r] = prod;
  }
  return pairwise_sum(per_term);
}

void guard_nested(const KernelSpec& k, std::size_t count) {
  if (k.d > kNestedMaxD || count > kNestedMaxCount)
    throw BudgetError("nested evaluation limited to d <= 3 and floor(nt) <= 10^4; use a separable kernel");
}

double tensor_sum_nested(std::span<const double> z, std::span<const double> scales, const KernelSpec& k) {
  guard_nested(k, z.size());
  const std::size_t d = k.d;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> pt(d);
  double total = 0.0;
  if (z.empty()) return 0.0;
  for (;;) {
    for (std::size_t c = 0; c < d; ++c) pt[c] = scales[c] * z[idx[c]];
    total += eval_h(k, pt);
    std::size_t c = d;
    while (c-- > 0) {
      if (++idx[c] < z.size()) break;
      idx[c] = 0;
    }
    if (c == static_cast<std::size_t>(-1)) break;
  }
  return total;
}

// sum over i_1 < ... < i_d of prod_k f_k(scale z_{i_k}) via running chain sums.
double ordered_sum_factorized(std::span<const double> z, double scale, const std::vector<SeparableTerm>& terms,
                              std::size_t d) {
  std::vector<double> per_term(terms.size());
  std::vector<double> chain(d + 1);
  for (std::size_t r = 0; r < terms.size(); ++r) {
    std::fill(chain.begin(), chain.end(), 0.0);
    chain[0] = 1.0;
    for (double zi : z) {
      const double x = scale * zi;
      for (std::size_t k = d; k >= 1; --k) chain[k] += chain[k - 1] * terms[r].factors[k - 1](x);
    }
    per_term[r] = terms[r].coeff * chain[d];
  }
  return pairwise_sum(per_term);
}

double ordered_sum_nested(std::span<const double> z, double scale, const KernelSpec& k) {
  guard_nested(k, z.size());
  const std::size_t d = k.d;
  const std::size_t m = z.size();
  if (m < d) return 0.0;
  std::vector<std::size_t> idx(d);
  for (std::size_t c = 0; c < d; ++c) idx[c] = c;
  std::vector<double> pt(d);
  double total = 0.0;
  for (;;) {
    for (std::size_t c = 0; c < d; ++c) pt[c] = scale * z[idx[c]];
    total += eval_h(k, pt);
    std::size_t c = d;
    while (c-- > 0) {
      if (idx[c] + (d - c) < m) {
        ++idx[c];
        for (std::size_t e = c + 1; e < d; ++e) idx[e] = idx[e - 1] + 1;
        break;
      }
    }
    if (c == static_cast<std::size_t>(-1)) break;
  }
  return total;
}

Strategy resolve(Strategy s, const std::vector<SeparableTerm>& terms) {
  if (s == Strategy::Auto || s == Strategy::Hybrid)
    return terms.size() <= kMaxSeparableRank ? Strategy::Factorized : Strategy::Nested;
  return s;
}

StatValue tensor_stat(StatKind kind, IncrementData data, const KernelSpec& k, double t, Strategy s,
                      std::size_t scaled_coords, double norm) {
  k.validate();
  const IndexWindow w = make_window(data.n, t, data.dx.size());
  const auto z = window_data(data, w.count);
  std::vector<double> scales(k.d, 1.0);
  const double rn = std::sqrt(static_cast<double>(data.n));
  for (std::size_t c = 0; c < scaled_coords; ++c) scales[c] = rn;
  const auto terms = separable_form(k);
  const Strategy used = resolve(s, terms);
  const double raw = used == Strategy::Factorized ? tensor_sum_factorized(z, scales, terms)
                                                   : tensor_sum_nested(z, scales, k);
  return {kind, raw * norm, w, k.to_text(), used};
}

}  // namespace

std::string_view to_string(StatKind k) noexcept {
  switch (k) {
    case StatKind::V: return "V";
    case StatKind::Y: return "Y";
    case StatKind::U: return "U";
    case StatKind::QV: return "QV";
    case StatKind::PV: return "PV";
    case StatKind::ECDF: return "ECDF";
    case StatKind::EP: return "EP";
  }
  return "?";
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Auto: return "auto";
    case Strategy::Factorized: return "factorized";
    case Strategy::Nested: return "nested";
    case Strategy::Hybrid: return "hybrid";
  }
  return "?";
}

IndexWindow make_window(std::size_t n, double t, std::size_t available) {
  if (n < 1) throw DomainError("statistic: n must be >= 1");
  if (!(t > 0.0)) throw DomainError("statistic: t must be > 0");
  const std::size_t count = window_count(n, t);
  if (count < 1 || count > available)
    throw DomainError("statistic: floor(nt) = " + std::to_string(count) + " outside [1, " +
                      std::to_string(available) + "]");
  return {n, t, count};
}

StatValue v_stat(IncrementData data, const KernelSpec& k, double t, Strategy s) {
  const double norm = std::pow(static_cast<double>(data.n), -static_cast<double>(k.d - k.l));
  return tensor_stat(StatKind::V, data, k, t, s, 0, norm);
}

StatValue y_stat(IncrementData data, const KernelSpec& k, double t, Strategy s) {
  const double norm = std::pow(static_cast<double>(data.n), -static_cast<double>(k.l));
  return tensor_stat(StatKind::Y, data, k, t, s, k.l, norm);
}

StatValue u_stat(IncrementData data, const KernelSpec& k, double t, Strategy s) {
  k.validate();
  const IndexWindow w = make_window(data.n, t, data.dx.size());
  if (w.count < k.d) throw DomainError("u_stat: floor(nt) must be >= d");
  const auto z = window_data(data, w.count);
  const double rn = std::sqrt(static_cast<double>(data.n));
  const auto terms = separable_form(k);
  const Strategy used = resolve(s, terms);
  const double raw = used == Strategy::Factorized ? ordered_sum_factorized(z, rn, terms, k.d)
                                                   : ordered_sum_nested(z, rn, k);
  // log C(m, d) via lgamma keeps large windows finite.
  const double m = static_cast<double>(w.count), dd = static_cast<double>(k.d);
  const double log_binom = std::lgamma(m + 1.0) - std::lgamma(dd + 1.0) - std::lgamma(m - dd + 1.0);
  return {StatKind::U, raw * std::exp(-log_binom), w, k.to_text(), used};
}

StatValue v_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s) {
  const auto dx = increments(path, false, t);
  return v_stat(IncrementData{dx, path.n}, k, t, s);
}

StatValue y_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s) {
  const auto dx = increments(path, false, t);
  return y_stat(IncrementData{dx, path.n}, k, t, s);
}

StatValue u_stat(const SamplePath& path, const KernelSpec& k, double t, Strategy s) {
  const auto dx = increments(path, false, t);
  return u_stat(IncrementData{dx, path.n}, k, t, s);
}

StatValue realized_qv(IncrementData data, double t) {
  const IndexWindow w = make_window(data.n, t, data.dx.size());
  std::vector<double> sq(w.count);
  for (std::size_t i = 0; i < w.count; ++i) sq[i] = data.dx[i] * data.dx[i];
  return {StatKind::QV, pairwise_sum(sq), w, "", Strategy::Factorized};
}

StatValue realized_qv(const SamplePath& path, double t) {
  const auto dx = increments(path, false, t);
  return realized_qv(IncrementData{dx, path.n}, t);
}

StatValue power_variation(IncrementData data, double p, bool scaled, double t) {
  if (!(p >= 0.0)) throw DomainError("power_variation: p must be >= 0");
  const IndexWindow w = make_window(data.n, t, data.dx.size());
  const double rn = scaled ? std::sqrt(static_cast<double>(data.n)) : 1.0;
  std::vector<double> vals(w.count);
  for (std::size_t i = 0; i < w.count; ++i) vals[i] = p == 0.0 ? 1.0 : std::pow(std::abs(rn * data.dx[i]), p);
  const double norm = scaled ? 1.0 / static_cast<double>(data.n) : 1.0;
  return {StatKind::PV, norm * pairwise_sum(vals), w, "", Strategy::Factorized};
}

StatValue power_variation(const SamplePath& path, double p, bool scaled, double t) {
  const auto dx = increments(path, false, t);
  return power_variation(IncrementData{dx, path.n}, p, scaled, t);
}

EmpiricalProcessValue empirical_process(const SamplePath& path, double t, double x) {
  const auto alpha = first_order_increments(path, t);
  const IndexWindow w = make_window(path.n, t, alpha.size());
  std::vector<double> ind(w.count), comp(w.count);
  for (std::size_t i = 0; i < w.count; ++i) {
    ind[i] = alpha[i] <= x ? 1.0 : 0.0;
    comp[i] = normal_cdf(x, path.sigma_grid[i]);
  }
  const double dn = static_cast<double>(path.n);
  const double s_ind = pairwise_sum(ind), s_comp = pairwise_sum(comp);
  return {s_ind / dn, s_comp / dn, (s_ind - s_comp) / std::sqrt(dn)};
}

double phi_bar(double z, double x) noexcept {
  if (z == 0.0) return 0.0;  // E[V 1{0 <= x}] = 0 either way
  const double v = normal_pdf(x / z);
  return z > 0.0 ? -v : v;
}

}  // namespace hfuv
