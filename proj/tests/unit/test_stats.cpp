#include <cmath>
#include <random>

#include "doctest.h"
#include "hfuv/error.hpp"
#include "hfuv/gaussian.hpp"
#include "hfuv/path.hpp"
#include "hfuv/stats.hpp"
#include "catalog.hpp"
#include "oracles.hpp"

using namespace hfuv;
using kcat::catalog;
using kcat::u_oracle;
using kcat::v_oracle;
using kcat::y_oracle;

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }

}  // namespace

TEST_CASE("v_stat examples") {
  const std::vector<double> dx{1.0, -2.0};
  const IncrementData data{dx, 2};
  CHECK(v_stat(data, power_kernel(Regime::JumpLLN, 2, {4.0, 4.0}), 1.0).value == 289.0);
  CHECK(v_stat(data, power_kernel(Regime::JumpLLN, 1, {4.0, 0.0}), 1.0).value == 17.0);
  const std::vector<double> g{0.5, 1.5};
  const auto k = grid_test_kernel(1.0);
  const auto f = v_stat({g, 2}, k, 1.0, Strategy::Factorized);
  const auto nst = v_stat({g, 2}, k, 1.0, Strategy::Nested);
  CHECK(f.strategy == Strategy::Factorized);
  CHECK(nst.strategy == Strategy::Nested);
  CHECK(close(f.value, nst.value));
}

TEST_CASE("y_stat examples") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 0.1);
  std::vector<double> dx(50);
  for (auto& v : dx) v = nd(rng);
  const auto l0 = power_kernel(Regime::JumpLLN, 0, {2.0, 3.0});
  auto ld = l0;
  ld.l = ld.d;  // same body; V with l = d carries no n-normalization
  CHECK(close(y_stat({dx, 50}, l0, 1.0).value, v_stat({dx, 50}, ld, 1.0).value));
  CHECK(close(y_stat({dx, 50}, l0, 1.0).value, v_stat({dx, 50}, l0, 1.0).value * 2500.0));
  const auto sq = power_kernel(Regime::MixedLLN, 1, {2.0});
  CHECK(close(y_stat({dx, 50}, sq, 1.0).value, realized_qv({dx, 50}, 1.0).value));
  const std::vector<double> hand{0.3, -0.8};
  const auto mk = power_kernel(Regime::MixedCLT, 1, {0.5, 4.0});
  double direct = 0.0;
  for (double a : hand)
    for (double b : hand) direct += std::sqrt(std::abs(std::sqrt(2.0) * a)) * std::pow(b, 4);
  CHECK(close(y_stat({hand, 2}, mk, 1.0).value, direct / 2.0));
}

TEST_CASE("u_stat examples") {
  const std::vector<double> dx{0.4, -0.7, 0.2, 1.1};
  const auto k1 = power_kernel(Regime::MixedLLN, 1, {2.0});
  const double u1 = u_stat({dx, 4}, k1, 1.0).value;
  CHECK(close(u1, y_stat({dx, 4}, k1, 1.0).value * 4.0 / 4.0));
  const std::vector<double> ab{0.4, -0.7};
  const auto k2 = power_kernel(Regime::MixedLLN, 2, {1.0, 1.0});
  CHECK(close(u_stat({ab, 2}, k2, 1.0).value, 0.4 * 0.7 * 2.0));
  CHECK_THROWS_AS(u_stat({std::span<const double>(ab).first(1), 2}, k2, 0.5), DomainError);
}

TEST_CASE("factorized equals nested-loop oracles across the catalog") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd(0.0, 0.4);
  for (std::size_t n : {1u, 2u, 7u, 16u, 64u}) {
    std::vector<double> dx(n);
    for (auto& v : dx) v = nd(rng);
    for (const auto& k : catalog()) {
      for (double t : {1.0, 0.5}) {
        const std::size_t m = window_count(n, t);
        if (m < 1) continue;
        const IncrementData data{dx, n};
        CHECK(close(v_stat(data, k, t, Strategy::Factorized).value, v_oracle(dx, n, k, m)));
        CHECK(close(v_stat(data, k, t, Strategy::Nested).value, v_oracle(dx, n, k, m)));
        CHECK(close(y_stat(data, k, t, Strategy::Factorized).value, y_oracle(dx, n, k, m)));
        CHECK(close(y_stat(data, k, t, Strategy::Nested).value, y_oracle(dx, n, k, m)));
        if (m >= k.d) {
          CHECK(close(u_stat(data, k, t, Strategy::Factorized).value, u_oracle(dx, n, k, m)));
          CHECK(close(u_stat(data, k, t, Strategy::Nested).value, u_oracle(dx, n, k, m)));
        }
      }
    }
  }
}

TEST_CASE("nested guard") {
  std::vector<double> dx(20000, 0.01);
  CHECK_THROWS_AS(v_stat({dx, 20000}, power_kernel(Regime::JumpLLN, 2, {4.0, 4.0}), 1.0, Strategy::Nested),
                  BudgetError);
  CHECK_NOTHROW(v_stat({dx, 20000}, power_kernel(Regime::JumpLLN, 2, {4.0, 4.0}), 1.0, Strategy::Factorized));
}

TEST_CASE("window monotonicity for nonnegative kernels") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> dx(64);
  for (auto& v : dx) v = nd(rng);
  const auto k = grid_test_kernel(0.8);
  double prev = -1.0;
  for (double t = 0.125; t <= 1.0; t += 0.125) {
    const double v = v_stat({dx, 64}, k, t).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("quadratic and power variation") {
  const std::vector<double> dx{1.0, -2.0};
  CHECK(realized_qv({dx, 2}, 1.0).value == 5.0);
  CHECK(power_variation({dx, 2}, 2.0, true, 1.0).value == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(power_variation({dx, 2}, 4.0, false, 1.0).value == 17.0);
  ModelConfig c;
  c.vol.sigma0 = 0.0;
  c.jumps.intensity = 1.0;
  c.jumps.size = AtomList{{{0.5, 0.5}, {-0.9, 0.5}}};
  c.jumps.fixed_count = 6;
  const auto p = simulate_path(c, 200, 1.0, 4);
  double s4 = 0.0;
  for (const auto& j : p.jumps) s4 += std::pow(j.size, 4);
  bool shared = false;
  for (std::size_t a = 1; a < p.jumps.size(); ++a) shared |= p.jumps[a].interval == p.jumps[a - 1].interval;
  if (!shared) CHECK(power_variation(p, 4.0, false, 1.0).value == doctest::Approx(s4).epsilon(1e-13));
  ModelConfig z;
  z.vol.sigma0 = 0.0;
  CHECK(realized_qv(simulate_path(z, 32, 1.0, 1), 1.0).value == 0.0);
}

TEST_CASE("phi_bar and empirical process") {
  const double o = oracle::simpson([](double v) { return v * oracle::phi(v); }, -12.0, 0.0, 20000);
  CHECK(std::abs(phi_bar(1.0, 0.0) - o) < 1e-10);
  CHECK(phi_bar(1.0, 0.0) == doctest::Approx(-0.3989422804).epsilon(1e-10));
  const double o2 = oracle::simpson([](double v) { return v * oracle::phi(v); }, -12.0, 0.7 / 1.8, 20000);
  CHECK(std::abs(phi_bar(1.8, 0.7) - o2) < 1e-10);
  const double o3 = oracle::simpson([](double v) { return v * oracle::phi(v); }, 0.7 / -1.8, 12.0, 20000);
  CHECK(std::abs(phi_bar(-1.8, 0.7) - o3) < 1e-10);

  ModelConfig c;
  c.vol.sigma0 = 1.0;
  const auto p = simulate_path(c, 400, 1.0, 12);
  const auto big = empirical_process(p, 1.0, 1e9);
  CHECK(big.f_n == doctest::Approx(1.0));
  CHECK(big.f_bar == doctest::Approx(1.0));
  CHECK(std::abs(big.g_n) < 1e-12);

  double s = 0.0, s2 = 0.0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    const double g = empirical_process(simulate_path(c, 400, 1.0, 500 + r), 1.0, 0.3).g_n;
    s += g;
    s2 += g * g;
  }
  const double mean = s / reps, se = std::sqrt((s2 / reps - mean * mean) / reps);
  CHECK(std::abs(mean) < 3.0 * se);
}
