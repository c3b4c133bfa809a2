#include "hfuv/ks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hfuv/error.hpp"
#include "hfuv/gaussian.hpp"

namespace hfuv {
namespace {

double p_from(double d, double en) {
  return kolmogorov_q((en + 0.12 + 0.11 / en) * d);
}

double std_normal_cdf(double x) { return normal_cdf(x); }

}  // namespace

double kolmogorov_q(double lambda) noexcept {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sample, double (*cdf)(double)) {
  if (sample.empty()) throw DomainError("ks: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

KsResult ks_normal(std::span<const double> sample) {
  const double d = ks_statistic(sample, std_normal_cdf);
  return {d, p_from(d, std::sqrt(static_cast<double>(sample.size()))), sample.size(), 0};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return {d, p_from(d, std::sqrt(nx * ny / (nx + ny))), x.size(), y.size()};
}

}  // namespace hfuv
