#include "hfuv/limits.hpp"

#include <cmath>
#include <map>
#include <string>

#include "hfuv/error.hpp"
#include "hfuv/rho.hpp"
#include "hfuv/summation.hpp"

namespace hfuv {
namespace {

void check_window(const SamplePath& path, double t) {
  if (!(t > 0.0) || window_count(path.n, t) > path.intervals() || window_count(path.n, t) < 1)
    throw DomainError("limits: t must satisfy 1 <= floor(nt) <= floor(nT)");
}

void check_budget(std::size_t jumps, std::size_t power) {
  if (std::pow(static_cast<double>(jumps), static_cast<double>(power)) > kTupleBudget)
    throw BudgetError("limits: " + std::to_string(jumps) + "^" + std::to_string(power) +
                      " jump tuples exceed the budget of 1e8");
}

// sum_p f(dX_p) for each term and coordinate in [from, to).
std::vector<std::vector<double>> jump_sums(const std::vector<SeparableTerm>& terms, std::span<const JumpRecord> jumps,
                                           std::size_t from, std::size_t to) {
  std::vector<std::vector<double>> out(terms.size(), std::vector<double>(to - from));
  std::vector<double> buf(jumps.size());
  for (std::size_t r = 0; r < terms.size(); ++r)
    for (std::size_t m = from; m < to; ++m) {
      for (std::size_t p = 0; p < jumps.size(); ++p) buf[p] = terms[r].factors[m](jumps[p].size);
      out[r][m - from] = pairwise_sum(buf);
    }
  return out;
}

LimitValue finish(std::vector<LimitContribution> rows, Regime regime) {
  std::vector<double> v(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i].value;
  return {pairwise_sum(v), std::move(rows), regime};
}

}  // namespace

SigmaProfile sigma_profile(const SamplePath& path, double t) {
  check_window(path, t);
  const std::size_t count = window_count(path.n, t);
  const double dn = static_cast<double>(path.n);
  std::map<double, std::size_t> mult;
  for (std::size_t i = 0; i < count; ++i) ++mult[path.sigma_grid[i]];
  std::map<double, double> w;
  for (const auto& [s, c] : mult) w[s] = static_cast<double>(c) / dn;
  const double rem = t - static_cast<double>(count) / dn;
  if (rem > 1e-14 * t && count < path.sigma_grid.size()) w[path.sigma_grid[count]] += rem;
  SigmaProfile out;
  for (const auto& [s, wt] : w) {
    out.sigma.push_back(s);
    out.weight.push_back(wt);
  }
  return out;
}

MixedModel::MixedModel(const SamplePath& path, const KernelSpec& k, double t, bool closed_form)
    : k_(k), t_(t), jumps_(jumps_up_to(path, t)), terms_(separable_form(k)) {
  k_.validate();
  check_window(path, t);
  check_budget(jumps_.size(), k_.d - k_.l);
  const std::size_t R = terms_.size(), l = k_.l;
  const SigmaProfile prof = sigma_profile(path, t);
  const std::size_t W = prof.sigma.size();

  // e1[w][i*R + r] = E[u_{r,i}(sigma_w U)]
  std::vector<std::vector<double>> e1(W, std::vector<double>(l * R));
  for (std::size_t w = 0; w < W; ++w)
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t r = 0; r < R; ++r)
        e1[w][i * R + r] = factor_expectation(terms_[r].factors[i], prof.sigma[w], closed_form);

  a_.assign(R, std::vector<double>(l));
  std::vector<double> buf(W);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t w = 0; w < W; ++w) buf[w] = prof.weight[w] * e1[w][i * R + r];
      a_[r][i] = pairwise_sum(buf);
    }
  s_ = jump_sums(terms_, jumps_, l, k_.d);

  m_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(l * R), static_cast<Eigen::Index>(l * R));
  for (std::size_t a = 0; a < l * R; ++a)
    for (std::size_t b = a; b < l * R; ++b) {
      const UnaryFactor prod = terms_[a % R].factors[a / R].times(terms_[b % R].factors[b / R]);
      for (std::size_t w = 0; w < W; ++w) {
        const double e2 = factor_expectation(prod, prof.sigma[w], closed_form);
        buf[w] = prof.weight[w] * (e2 - e1[w][a] * e1[w][b]);
      }
      const double v = pairwise_sum(buf);
      m_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
      m_(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
    }
}

double MixedModel::term_y_product(std::size_t r, std::span<const double> y, long diff_coord) const {
  double v = 1.0;
  for (std::size_t m = k_.l; m < k_.d; ++m) {
    const auto& f = terms_[r].factors[m];
    v *= static_cast<long>(m) == diff_coord ? f.derivative(y[m - k_.l]) : f(y[m - k_.l]);
  }
  return v;
}

double MixedModel::integrated_rho(std::span<const double> y) const {
  if (y.size() != k_.d - k_.l) throw DomainError("integrated_rho: y has wrong dimension");
  std::vector<double> v(terms_.size());
  for (std::size_t r = 0; r < terms_.size(); ++r) {
    double a = terms_[r].coeff;
    for (double x : a_[r]) a *= x;
    v[r] = a * term_y_product(r, y, -1);
  }
  return pairwise_sum(v);
}

double MixedModel::integrated_rho_partial(std::size_t j, std::span<const double> y) const {
  if (j < k_.l || j >= k_.d) throw DomainError("integrated_rho_partial: coordinate must lie in the y-block");
  if (y.size() != k_.d - k_.l) throw DomainError("integrated_rho_partial: y has wrong dimension");
  std::vector<double> v(terms_.size());
  for (std::size_t r = 0; r < terms_.size(); ++r) {
    double a = terms_[r].coeff;
    for (double x : a_[r]) a *= x;
    v[r] = a * term_y_product(r, y, static_cast<long>(j));
  }
  return pairwise_sum(v);
}

std::vector<double> MixedModel::loadings(std::span<const double> y) const {
  if (y.size() != k_.d - k_.l) throw DomainError("loadings: y has wrong dimension");
  const std::size_t R = terms_.size(), l = k_.l;
  std::vector<double> out(l * R);
  for (std::size_t r = 0; r < R; ++r) {
    const double yp = term_y_product(r, y, -1);
    for (std::size_t i = 0; i < l; ++i) {
      double v = terms_[r].coeff * yp;
      for (std::size_t m = 0; m < l; ++m)
        if (m != i) v *= a_[r][m];
      out[i * R + r] = v;
    }
  }
  return out;
}

std::vector<double> MixedModel::summed_loadings() const {
  const std::size_t R = terms_.size(), l = k_.l;
  std::vector<double> out(l * R);
  for (std::size_t r = 0; r < R; ++r) {
    double yp = 1.0;
    for (double s : s_[r]) yp *= s;
    for (std::size_t i = 0; i < l; ++i) {
      double v = terms_[r].coeff * yp;
      for (std::size_t m = 0; m < l; ++m)
        if (m != i) v *= a_[r][m];
      out[i * R + r] = v;
    }
  }
  return out;
}

double MixedModel::cov(std::span<const double> y, std::span<const double> y2) const {
  if (k_.l == 0) return 0.0;
  const auto a = loadings(y), b = loadings(y2);
  const Eigen::Map<const Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
  const Eigen::Map<const Eigen::VectorXd> vb(b.data(), static_cast<Eigen::Index>(b.size()));
  return va.dot(m_ * vb);
}

LimitValue MixedModel::limit() const {
  const std::size_t R = terms_.size(), l = k_.l, d = k_.d;
  std::vector<LimitContribution> rows;
  auto a_prod = [&](std::size_t r) {
    double a = terms_[r].coeff;
    for (double x : a_[r]) a *= x;
    return a;
  };
  if (d == l) {
    std::vector<double> v(R);
    for (std::size_t r = 0; r < R; ++r) v[r] = a_prod(r);
    rows.push_back({-1, pairwise_sum(v)});
    return finish(std::move(rows), Regime::MixedLLN);
  }
  std::vector<double> v(R);
  for (std::size_t p = 0; p < jumps_.size(); ++p) {
    for (std::size_t r = 0; r < R; ++r) {
      double x = a_prod(r) * terms_[r].factors[l](jumps_[p].size);
      for (std::size_t m = l + 1; m < d; ++m) x *= s_[r][m - l];
      v[r] = x;
    }
    rows.push_back({static_cast<long>(p), pairwise_sum(v)});
  }
  return finish(std::move(rows), Regime::MixedLLN);
}

double MixedModel::vtilde(std::size_t j, double y) const {
  if (j < k_.l || j >= k_.d) throw DomainError("vtilde: coordinate must lie in the y-block");
  std::vector<double> v(terms_.size());
  for (std::size_t r = 0; r < terms_.size(); ++r) {
    double x = terms_[r].coeff * terms_[r].factors[j].derivative(y);
    for (double a : a_[r]) x *= a;
    for (std::size_t m = k_.l; m < k_.d; ++m)
      if (m != j) x *= s_[r][m - k_.l];
    v[r] = x;
  }
  return pairwise_sum(v);
}

CondVariance MixedModel::cond_var() const {
  CondVariance out;
  out.per_jump.resize(jumps_.size());
  for (std::size_t p = 0; p < jumps_.size(); ++p) {
    double s = 0.0;
    for (std::size_t j = k_.l; j < k_.d; ++j) s += vtilde(j, jumps_[p].size);
    out.per_jump[p] = s * s * jumps_[p].sigma_pre * jumps_[p].sigma_pre;
  }
  out.jump_term = pairwise_sum(out.per_jump);
  if (k_.l > 0 && (k_.d == k_.l || !jumps_.empty())) {
    const auto a = summed_loadings();
    const Eigen::Map<const Eigen::VectorXd> va(a.data(), static_cast<Eigen::Index>(a.size()));
    out.field_term = std::max(0.0, va.dot(m_ * va));
  }
  out.total = out.jump_term + out.field_term;
  return out;
}

LimitValue jump_limit(const SamplePath& path, const KernelSpec& k, double t) {
  k.validate();
  check_window(path, t);
  const auto jumps = jumps_up_to(path, t);
  check_budget(jumps.size(), k.l);
  const auto terms = separable_form(k);
  const std::size_t R = terms.size(), l = k.l, d = k.d;
  const auto s = jump_sums(terms, jumps, 0, l);
  const double tf = std::pow(t, static_cast<double>(d - l));
  auto y_zero = [&](std::size_t r) {
    double v = terms[r].coeff * tf;
    for (std::size_t m = l; m < d; ++m) v *= terms[r].factors[m](0.0);
    return v;
  };
  std::vector<LimitContribution> rows;
  std::vector<double> v(R);
  if (l == 0) {
    for (std::size_t r = 0; r < R; ++r) v[r] = y_zero(r);
    rows.push_back({-1, pairwise_sum(v)});
    return finish(std::move(rows), Regime::JumpLLN);
  }
  for (std::size_t p = 0; p < jumps.size(); ++p) {
    for (std::size_t r = 0; r < R; ++r) {
      double x = y_zero(r) * terms[r].factors[0](jumps[p].size);
      for (std::size_t m = 1; m < l; ++m) x *= s[r][m];
      v[r] = x;
    }
    rows.push_back({static_cast<long>(p), pairwise_sum(v)});
  }
  return finish(std::move(rows), Regime::JumpLLN);
}

LimitValue mixed_limit(const SamplePath& path, const KernelSpec& k, double t, bool closed_form) {
  return MixedModel(path, k, t, closed_form).limit();
}

namespace {

double vbar_impl(const std::vector<SeparableTerm>& terms, const std::vector<std::vector<double>>& s,
                 const KernelSpec& k, std::size_t j, double y) {
  std::vector<double> v(terms.size());
  for (std::size_t r = 0; r < terms.size(); ++r) {
    double x = terms[r].coeff * terms[r].factors[j].derivative(y);
    for (std::size_t m = 0; m < k.l; ++m)
      if (m != j) x *= s[r][m];
    for (std::size_t m = k.l; m < k.d; ++m) x *= terms[r].factors[m](0.0);
    v[r] = x;
  }
  return pairwise_sum(v);
}

}  // namespace

double vbar(const SamplePath& path, const KernelSpec& k, std::size_t j, double y, double t) {
  k.validate();
  check_window(path, t);
  if (j >= k.l) throw DomainError("vbar: coordinate must lie in the x-block");
  const auto jumps = jumps_up_to(path, t);
  check_budget(jumps.size(), k.l - 1);
  const auto terms = separable_form(k);
  return vbar_impl(terms, jump_sums(terms, jumps, 0, k.l), k, j, y);
}

CondVariance cond_var_jump(const SamplePath& path, const KernelSpec& k, double t) {
  k.validate();
  check_window(path, t);
  const auto jumps = jumps_up_to(path, t);
  CondVariance out;
  out.per_jump.resize(jumps.size());
  if (k.l == 0 || jumps.empty()) return out;
  check_budget(jumps.size(), k.l - 1);
  const auto terms = separable_form(k);
  const auto s = jump_sums(terms, jumps, 0, k.l);
  const double tf = std::pow(t, 2.0 * static_cast<double>(k.d - k.l));
  for (std::size_t p = 0; p < jumps.size(); ++p) {
    double sum = 0.0;
    for (std::size_t j = 0; j < k.l; ++j) sum += vbar_impl(terms, s, k, j, jumps[p].size);
    const auto& jr = jumps[p];
    out.per_jump[p] = 0.5 * tf * sum * sum * (jr.sigma_pre * jr.sigma_pre + jr.sigma_post * jr.sigma_post);
  }
  out.jump_term = pairwise_sum(out.per_jump);
  out.total = out.jump_term;
  return out;
}

double cov_c(const SamplePath& path, const KernelSpec& k, std::span<const double> y, std::span<const double> y2,
             double t, bool closed_form) {
  return MixedModel(path, k, t, closed_form).cov(y, y2);
}

double vtilde(const SamplePath& path, const KernelSpec& k, std::size_t j, double y, double t, bool closed_form) {
  return MixedModel(path, k, t, closed_form).vtilde(j, y);
}

CondVariance cond_var_mixed(const SamplePath& path, const KernelSpec& k, double t, bool closed_form) {
  return MixedModel(path, k, t, closed_form).cond_var();
}

}  // namespace hfuv
