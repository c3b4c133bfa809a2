#include "hfuv/gaussian.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

#include "hfuv/error.hpp"

namespace hfuv {

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_cdf(double x, double sd) noexcept {
  if (sd == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  return normal_cdf(x / std::abs(sd));
}

double abs_moment(double p) {
  if (!(p >= 0.0)) throw DomainError("abs_moment: p must be >= 0");
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0))) / std::sqrt(M_PI);
}

QuadratureResult gaussian_expectation(const std::function<double(double)>& f, double sd,
                                      double tol) {
  if (sd == 0.0) return {f(0.0), 0.0};
  const auto folded = [&](double u) {
    if (u == 0.0) return 0.0;  // measure zero; avoids evaluating 0^p with p < 0
    const double w = normal_pdf(u);
    if (w == 0.0) return 0.0;  // f is never evaluated where the weight underflows
    return (f(sd * u) + f(-sd * u)) * w;
  };
  // Inner panel: tanh-sinh handles algebraic endpoint behaviour at 0.
  thread_local boost::math::quadrature::tanh_sinh<double> inner_rule(12);
  double inner_err = 0.0;
  double inner_l1 = 0.0;
  const double inner = inner_rule.integrate(folded, 0.0, 1.0, tol * 1e-2, &inner_err, &inner_l1);
  double outer_err = 0.0;
  const double outer = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      folded, 1.0, std::numeric_limits<double>::infinity(), 20, tol * 1e-2, &outer_err);
  QuadratureResult r{inner + outer, inner_err + outer_err};
  if (!std::isfinite(r.value) || r.error > 100.0 * tol * std::max(1.0, std::abs(r.value))) {
    throw QuadratureError("gaussian_expectation did not converge", r.error);
  }
  return r;
}

}  // namespace hfuv
