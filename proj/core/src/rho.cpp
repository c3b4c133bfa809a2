#include "hfuv/rho.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "hfuv/error.hpp"
#include "hfuv/gaussian.hpp"
#include "hfuv/rng.hpp"

namespace hfuv {
namespace {

constexpr std::size_t kMonteCarloDraws = 1u << 17;

bool x_block_free(const KernelSpec& k) {
  const auto dep = l_dependencies(k.L, k.d);
  for (std::size_t i = 0; i < k.l; ++i)
    if (dep[i]) return false;
  return true;
}

}  // namespace

double factor_expectation(const UnaryFactor& f, double sigma, bool closed_form) {
  if (closed_form && f.pure_power()) return abs_moment(f.power) * std::pow(std::abs(sigma), f.power);
  return gaussian_expectation([&f](double x) { return f(x); }, sigma, 1e-10).value;
}

RhoResult rho(const KernelSpec& k, std::span<const double> sigmas, std::span<const double> y,
              RhoMethod method) {
  if (sigmas.size() != k.l || y.size() != k.d - k.l) throw DomainError("rho: argument dimensions do not match kernel");
  for (double s : sigmas)
    if (!(s > 0.0)) throw DomainError("rho: sigmas must be > 0");

  std::vector<double> point(k.d, 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) point[k.l + j] = y[j];

  if (k.l == 0) return {eval_h(k, point), 0.0, RhoMethod::ClosedForm};

  if (method == RhoMethod::Auto) {
    if (x_block_free(k)) method = RhoMethod::ClosedForm;
    else if (k.l <= 2) method = RhoMethod::Tensorized;
    else method = RhoMethod::MonteCarlo;
  }

  if (method == RhoMethod::ClosedForm) {
    if (!x_block_free(k)) throw DomainError("rho: closed form needs L independent of the x-block");
    double v = 1.0;
    for (std::size_t i = 0; i < k.l; ++i) v *= abs_moment(k.powers[i]) * std::pow(sigmas[i], k.powers[i]);
    for (std::size_t j = 0; j < y.size(); ++j)
      v *= k.powers[k.l + j] == 0.0 ? 1.0 : std::pow(std::abs(y[j]), k.powers[k.l + j]);
    return {v * l_value(k.L, point), 0.0, RhoMethod::ClosedForm};
  }

  if (method == RhoMethod::Tensorized) {
    if (k.l > 2) throw DomainError("rho: tensorized quadrature is limited to l <= 2");
    if (k.l == 1) {
      const auto r = gaussian_expectation(
          [&](double u) {
            auto pt = point;
            pt[0] = u;
            return eval_h(k, pt);
          },
          sigmas[0], 1e-10);
      return {r.value, 0.0, RhoMethod::Tensorized};
    }
    const auto outer = gaussian_expectation(
        [&](double u1) {
          return gaussian_expectation(
                     [&](double u2) {
                       auto pt = point;
                       pt[0] = u1;
                       pt[1] = u2;
                       return eval_h(k, pt);
                     },
                     sigmas[1], 1e-10)
              .value;
        },
        sigmas[0], 1e-8);
    return {outer.value, 0.0, RhoMethod::Tensorized};
  }

  Rng rng(derive_seed(0x5eed, "rho-monte-carlo"));
  std::normal_distribution<double> gauss(0.0, 1.0);
  double mean = 0.0, m2 = 0.0;
  auto pt = point;
  for (std::size_t s = 0; s < kMonteCarloDraws; ++s) {
    for (std::size_t i = 0; i < k.l; ++i) pt[i] = sigmas[i] * gauss(rng);
    const double v = eval_h(k, pt);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(kMonteCarloDraws - 1);
  return {mean, std::sqrt(var / static_cast<double>(kMonteCarloDraws)), RhoMethod::MonteCarlo};
}

}  // namespace hfuv
