#pragma once

#include <span>

namespace hfuv {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;  // 0 for the one-sample test
};

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda) noexcept;

/// One-sample test against N(0, 1); p-value from Q((sqrt(N) + 0.12 + 0.11/sqrt(N)) D).
KsResult ks_normal(std::span<const double> sample);

/// One-sample statistic against an arbitrary continuous CDF.
double ks_statistic(std::span<const double> sample, double (*cdf)(double));

/// Two-sample test; effective size N1 N2 / (N1 + N2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace hfuv
