#include <cmath>
#include <random>

#include "doctest.h"
#include "hfuv/admissibility.hpp"
#include "hfuv/error.hpp"
#include "hfuv/gaussian.hpp"
#include "hfuv/kernel.hpp"
#include "hfuv/rho.hpp"
#include "oracles.hpp"

using namespace hfuv;

namespace {

// Catalog kernels used across property tests.
std::vector<KernelSpec> catalog() {
  std::vector<KernelSpec> ks;
  ks.push_back(power_kernel(Regime::JumpCLT, 1, {4.0}));
  ks.push_back(power_kernel(Regime::JumpCLT, 2, {4.0, 4.0}));
  ks.push_back(power_kernel(Regime::MixedCLT, 1, {0.5, 4.0}));
  ks.push_back(grid_test_kernel(1.0));
  ks.push_back(grid_test_kernel(0.7));
  KernelSpec g = power_kernel(Regime::MixedLLN, 1, {1.5, 3.0});
  g.L = LExpr::gauss_bump(0.3, 0);
  ks.push_back(g);
  KernelSpec poly = power_kernel(Regime::JumpLLN, 2, {3.0, 2.5, 4.0});
  poly.d = 3;
  poly.L = LExpr::product({LExpr::poly_even(2, {1.0, 0.5}), LExpr::sum({LExpr::one(), LExpr::gauss_bump(1.0, 1)})});
  ks.push_back(poly);
  KernelSpec mix = power_kernel(Regime::JumpLLN, 3, {4.0, 4.5, 5.0});
  mix.L = LExpr::sum({LExpr::grid_sin(1.3, 0, 2), LExpr::product({LExpr::gauss_bump(0.2, 1), LExpr::grid_sin(0.9, 1, 2)})});
  ks.push_back(mix);
  return ks;
}

}  // namespace

TEST_CASE("eval_h examples") {
  const double pt[] = {1.0, -2.0};
  CHECK(eval_h(power_kernel(Regime::JumpCLT, 2, {4.0, 4.0}), pt) == 16.0);
  const double a[] = {0.5, 1.5};
  CHECK(std::abs(eval_h(grid_test_kernel(1.0), a)) < 1e-30);
  const double b[] = {0.5, 1.0};
  CHECK(eval_h(grid_test_kernel(1.0), b) == doctest::Approx(0.0625).epsilon(1e-14));
  const double z[] = {0.0};
  CHECK(eval_h(power_kernel(Regime::JumpLLN, 1, {0.0}), z) == 1.0);
  CHECK(eval_h(power_kernel(Regime::JumpLLN, 1, {2.0}), z) == 0.0);
}

TEST_CASE("partial_h examples and conventions") {
  const double two[] = {2.0};
  CHECK(partial_h(power_kernel(Regime::JumpCLT, 1, {4.0}), 0, two) == 32.0);
  const double ones[] = {1.0, 1.0};
  CHECK(partial_h(power_kernel(Regime::JumpLLN, 0, {4.0, 4.0}), 0, ones) == 4.0);
  const double zero[] = {0.0, 1.0};
  CHECK(partial_h(power_kernel(Regime::JumpCLT, 2, {4.0, 4.0}), 0, zero) == 0.0);
  CHECK_THROWS_AS(partial_h(power_kernel(Regime::MixedCLT, 1, {0.5, 4.0}), 0, zero), DomainError);
}

TEST_CASE("partial_h matches central differences on the catalog") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 1.8);
  std::bernoulli_distribution sgn(0.5);
  for (const auto& k : catalog()) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(k.d);
      for (auto& v : x) v = sgn(rng) ? u(rng) : -u(rng);
      for (std::size_t j = 0; j < k.d; ++j) {
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const double fd = (eval_h(k, xp) - eval_h(k, xm)) / (2.0 * h);
        const double an = partial_h(k, j, x);
        CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("separable form reproduces H") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const auto& k : catalog()) {
    const auto terms = separable_form(k);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(k.d);
      for (auto& v : x) v = n(rng);
      double s = 0.0;
      for (const auto& t : terms) {
        double p = t.coeff;
        for (std::size_t m = 0; m < k.d; ++m) p *= t.factors[m](x[m]);
        s += p;
      }
      const double h = eval_h(k, x);
      CHECK(std::abs(s - h) <= 1e-12 * (1.0 + std::abs(h)));
    }
  }
}

TEST_CASE("grid sin is rank three") {
  CHECK(separable_expansion(LExpr::grid_sin(1.0, 0, 1), 2).size() == 3);
}

TEST_CASE("kernel text round trip") {
  for (const auto& k : catalog()) {
    const auto text = k.to_text();
    const auto back = KernelSpec::parse(text);
    CHECK(back.to_text() == text);
    CHECK(back.d == k.d);
    CHECK(back.powers == k.powers);
  }
  CHECK_THROWS_AS(KernelSpec::parse("H regime=Nope d=1 l=1 p=4 q= L=(one)"), ConfigError);
}

TEST_CASE("abs_moment against frozen values and a Simpson oracle") {
  CHECK(abs_moment(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(abs_moment(4.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(abs_moment(1.0) - 0.7978845608028654) < 1e-15);
  CHECK(std::abs(abs_moment(0.5) - 0.8221789586624586) < 1e-15);
  for (double p : {0.25, 0.5, 1.0, 1.5, 3.0, 4.0}) {
    const double o = oracle::abs_moment(p);
    CHECK(std::abs(abs_moment(p) - o) < 1e-10 * o);
  }
  CHECK_THROWS_AS(abs_moment(-1.0), DomainError);
}

TEST_CASE("gaussian_expectation against closed forms and Simpson") {
  for (double p : {0.25, 0.5, 1.0, 4.0})
    for (double sd : {0.3, 1.0, 2.0}) {
      const double v = gaussian_expectation([p](double x) { return std::pow(std::abs(x), p); }, sd).value;
      const double exact = abs_moment(p) * std::pow(sd, p);
      CHECK(std::abs(v - exact) <= 1e-9 * exact);
    }
  auto f = [](double x) { return std::sqrt(std::abs(x)) * std::cos(1.7 * x) * std::exp(-0.2 * x * x); };
  const double v = gaussian_expectation(f, 1.3).value;
  CHECK(std::abs(v - oracle::gaussian_expectation(f, 1.3)) < 1e-9);
}

TEST_CASE("rho examples") {
  const double s1[] = {1.0};
  CHECK(rho(power_kernel(Regime::JumpLLN, 1, {2.0}), s1, {}).value == doctest::Approx(1.0).epsilon(1e-14));
  const auto mk = power_kernel(Regime::MixedCLT, 1, {0.5, 4.0});
  const double s2[] = {2.0}, y3[] = {3.0};
  const double closed = abs_moment(0.5) * std::sqrt(2.0) * 81.0;
  const auto r_closed = rho(mk, s2, y3, RhoMethod::ClosedForm);
  const auto r_quad = rho(mk, s2, y3, RhoMethod::Tensorized);
  CHECK(std::abs(r_closed.value - closed) <= 1e-12 * closed);
  CHECK(std::abs(r_quad.value - closed) <= 1e-8 * closed);
  const double y2[] = {1.5, -0.5};
  const auto l0 = power_kernel(Regime::JumpLLN, 0, {4.0, 4.0});
  CHECK(rho(l0, {}, y2).value == eval_h(l0, y2));
}

TEST_CASE("rho scaling and Monte Carlo consistency") {
  const auto k = power_kernel(Regime::JumpLLN, 2, {1.5, 0.5});
  const double s[] = {1.7, 1.7}, one[] = {1.0, 1.0};
  CHECK(rho(k, s, {}).value == doctest::Approx(std::pow(1.7, 2.0) * rho(k, one, {}).value).epsilon(1e-13));
  KernelSpec g = power_kernel(Regime::JumpLLN, 2, {0.5, 1.0});
  g.L = LExpr::sum({LExpr::grid_sin(1.1, 0, 1), LExpr::gauss_bump(0.4, 0)});
  const double sig[] = {0.8, 1.2};
  const auto q = rho(g, sig, {}, RhoMethod::Tensorized);
  const auto mc = rho(g, sig, {}, RhoMethod::MonteCarlo);
  CHECK(std::abs(q.value - mc.value) < 3.0 * mc.std_error);
}

TEST_CASE("admissibility examples") {
  CHECK(check_admissibility(power_kernel(Regime::JumpCLT, 1, {4.0})).passed());
  KernelSpec g = grid_test_kernel(1.0);
  g.regime = Regime::JumpCLT;
  CHECK(check_admissibility(g).passed());
  CHECK(check_admissibility(grid_test_kernel(1.0)).passed());
  const auto bad = check_admissibility(power_kernel(Regime::MixedCLT, 1, {1.5}));
  CHECK_FALSE(bad.passed());
  CHECK(bad.first_failure().find("0<p<1") != std::string::npos);
  CHECK_FALSE(check_admissibility(power_kernel(Regime::JumpCLT, 1, {2.0})).passed());
  CHECK(check_admissibility(power_kernel(Regime::MixedCLT, 1, {0.5, 4.0})).passed());
  CHECK(check_admissibility(power_kernel(Regime::MixedLLN, 1, {0.5, 4.0})).passed());
  CHECK_FALSE(check_admissibility(power_kernel(Regime::MixedLLN, 1, {0.5, 1.0})).passed());
}
