#pragma once

#include <functional>

namespace hfuv {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

/// CDF of N(0, sd^2); sd = 0 gives the step at 0.
double normal_cdf(double x, double sd) noexcept;

/// m_p = E|U|^p for U ~ N(0,1): 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
double abs_moment(double p);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// E[f(sd * U)] for U ~ N(0,1) by adaptive quadrature. The real line is
/// folded at 0 so that integrands like |u|^p with p < 1 only see an endpoint
/// singularity. Throws QuadratureError when the estimate misses `tol`
/// (relative to max(1, |value|)) by more than a factor of 100.
QuadratureResult gaussian_expectation(const std::function<double(double)>& f, double sd,
                                      double tol = 1e-10);

}  // namespace hfuv
