#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hfuv/ks.hpp"

using namespace hfuv;

namespace {
double identity_cdf(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

TEST_CASE("one-sample statistic equals the direct max deviation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(257);
  for (auto& v : x) v = u(rng);
  std::vector<double> s = x;
  std::sort(s.begin(), s.end());
  double direct = 0.0;
  const double n = static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    direct = std::max(direct, std::max((static_cast<double>(i) + 1.0) / n - s[i], s[i] - static_cast<double>(i) / n));
  CHECK(ks_statistic(x, identity_cdf) == direct);
}

TEST_CASE("Kolmogorov distribution values") {
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996716).epsilon(1e-9));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494858).epsilon(1e-5));
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(5.0) < 1e-20);
}

TEST_CASE("normal and two-sample tests") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& v : a) v = nd(rng);
  for (auto& v : b) v = nd(rng);
  for (auto& v : c) v = nd(rng) + 0.3;
  CHECK(ks_normal(a).p_value > 0.01);
  CHECK(ks_normal(c).p_value < 1e-6);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  const std::vector<double> zeros(10, 0.0);
  CHECK(ks_two_sample(zeros, zeros).statistic == 0.0);
  CHECK(ks_two_sample(zeros, zeros).p_value == 1.0);
  const std::vector<double> lo{1.0, 2.0}, hi{3.0, 4.0};
  CHECK(ks_two_sample(lo, hi).statistic == 1.0);
}
