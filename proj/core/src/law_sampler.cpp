#include "hfuv/law_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hfuv/error.hpp"
#include "hfuv/rng.hpp"
#include "hfuv/summation.hpp"

namespace hfuv {
namespace {

void check_aug(const SamplePath& path, const JumpAugmentation& aug) {
  if (aug.draws.size() != path.jumps.size())
    throw DomainError("law sampler: augmentation does not match the path's jump record");
}

// Calls f(tuple) for every tuple in idx^arity, last position fastest.
template <class F>
void for_each_tuple(std::span<const std::size_t> idx, std::size_t arity, F&& f) {
  std::vector<std::size_t> pos(arity, 0), tuple(arity);
  if (arity == 0) {
    f(std::span<const std::size_t>(tuple));
    return;
  }
  if (idx.empty()) return;
  for (;;) {
    for (std::size_t c = 0; c < arity; ++c) tuple[c] = idx[pos[c]];
    f(std::span<const std::size_t>(tuple));
    std::size_t c = arity;
    while (c-- > 0) {
      if (++pos[c] < idx.size()) break;
      pos[c] = 0;
    }
    if (c == static_cast<std::size_t>(-1)) return;
  }
}

LimitDraw u_jump_on(const SamplePath& path, const KernelSpec& k, const JumpAugmentation& aug, double t,
                    std::span<const std::size_t> subset) {
  LimitDraw out;
  out.aug_seed = aug.seed;
  out.per_jump.assign(path.jumps.size(), 0.0);
  if (std::pow(static_cast<double>(subset.size()), static_cast<double>(k.l)) > kTupleBudget)
    throw BudgetError("sample_u_jump: jump tuples exceed the budget of 1e8");
  const double tf = std::pow(t, static_cast<double>(k.d - k.l));
  std::vector<double> point(k.d, 0.0);
  for_each_tuple(subset, k.l, [&](std::span<const std::size_t> tuple) {
    for (std::size_t c = 0; c < k.l; ++c) point[c] = path.jumps[tuple[c]].size;
    for (std::size_t j = 0; j < k.l; ++j)
      out.per_jump[tuple[j]] += tf * partial_h(k, j, point) * aug.draws[tuple[j]].r;
  });
  out.jump_term = pairwise_sum(out.per_jump);
  out.value = out.jump_term;
  return out;
}

std::vector<std::size_t> indices_up_to(const SamplePath& path, double t) {
  std::vector<std::size_t> idx(jumps_up_to(path, t).size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Eigen::MatrixXd jittered_cholesky(const Eigen::MatrixXd& c) {
  const double trace = c.trace();
  double jitter = 1e-10 * std::max(trace, std::numeric_limits<double>::min());
  for (int attempt = 0; attempt < 4; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd a = c;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c, Eigen::EigenvaluesOnly).eigenvalues()(0);
  std::ostringstream msg;
  msg << "sample_v_mixed: field covariance not positive definite after jitter escalation; smallest eigenvalue "
      << min_eig;
  throw NumericalError(msg.str());
}

}  // namespace

JumpAugmentation augment(const SamplePath& path, std::uint64_t seed) {
  JumpAugmentation aug;
  aug.seed = seed;
  aug.draws.reserve(path.jumps.size());
  for (std::size_t p = 0; p < path.jumps.size(); ++p) {
    Rng rng(derive_seed(seed, p));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    JumpDraw d;
    do d.kappa = unif(rng);
    while (d.kappa == 0.0);
    d.psi_minus = normal(rng);
    d.psi_plus = normal(rng);
    const auto& jr = path.jumps[p];
    d.r_minus = std::sqrt(d.kappa) * jr.sigma_pre * d.psi_minus;
    d.r_plus = std::sqrt(1.0 - d.kappa) * jr.sigma_post * d.psi_plus;
    d.r = d.r_minus + d.r_plus;
    aug.draws.push_back(d);
  }
  return aug;
}

LimitDraw sample_u_jump(const SamplePath& path, const KernelSpec& k, const JumpAugmentation& aug, double t) {
  k.validate();
  check_aug(path, aug);
  const auto idx = indices_up_to(path, t);
  return u_jump_on(path, k, aug, t, idx);
}

double truncated_z(const SamplePath& path, const KernelSpec& k, std::size_t m, const JumpAugmentation& aug,
                   double t) {
  k.validate();
  check_aug(path, aug);
  auto idx = indices_up_to(path, t);
  // Largest |dX| first; ties resolved by time order.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(path.jumps[a].size) > std::abs(path.jumps[b].size);
  });
  idx.resize(std::min(m, idx.size()));
  std::sort(idx.begin(), idx.end());
  return u_jump_on(path, k, aug, t, idx).value;
}

LimitDraw sample_v_mixed(const MixedModel& model, const JumpAugmentation& aug, MixedDrawOptions opts) {
  const KernelSpec& k = model.kernel();
  const auto jumps = model.jumps();
  if (aug.draws.size() < jumps.size()) throw DomainError("sample_v_mixed: augmentation does not cover the jumps");
  const std::size_t arity = k.d - k.l;
  if (std::pow(static_cast<double>(jumps.size()), static_cast<double>(arity)) > kTupleBudget)
    throw BudgetError("sample_v_mixed: jump tuples exceed the budget of 1e8");

  LimitDraw out;
  out.aug_seed = aug.seed;
  out.per_jump.assign(jumps.size(), 0.0);
  std::vector<std::size_t> idx(jumps.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  // Distinct y-tuples share one field value; multiplicity counts repeats.
  std::map<std::vector<double>, std::size_t> distinct;
  std::vector<std::vector<double>> ys;
  std::vector<double> multiplicity;
  std::vector<double> y(arity);
  for_each_tuple(idx, arity, [&](std::span<const std::size_t> tuple) {
    for (std::size_t c = 0; c < arity; ++c) y[c] = jumps[tuple[c]].size;
    for (std::size_t c = 0; c < arity; ++c)
      out.per_jump[tuple[c]] += model.integrated_rho_partial(k.l + c, y) * aug.draws[tuple[c]].r;
    auto [it, fresh] = distinct.try_emplace(y, ys.size());
    if (fresh) {
      ys.push_back(y);
      multiplicity.push_back(0.0);
    }
    multiplicity[it->second] += 1.0;
  });
  out.jump_term = pairwise_sum(out.per_jump);

  if (opts.include_field && k.l > 0 && !ys.empty()) {
    const auto m = static_cast<Eigen::Index>(ys.size());
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = a; b < m; ++b) c(a, b) = c(b, a) = model.cov(ys[a], ys[b]);
    double field = 0.0;
    if (c.trace() > 0.0) {
      const Eigen::MatrixXd chol = jittered_cholesky(c);
      Rng rng(derive_seed(aug.seed, "field"));
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd z(m);
      for (Eigen::Index a = 0; a < m; ++a) z(a) = normal(rng);
      const Eigen::VectorXd values = chol * z;
      std::vector<double> terms(ys.size());
      for (std::size_t a = 0; a < ys.size(); ++a) terms[a] = multiplicity[a] * values(static_cast<Eigen::Index>(a));
      field = pairwise_sum(terms);
    }
    out.field_term = field;
  }
  out.value = out.jump_term + out.field_term;
  return out;
}

}  // namespace hfuv
