#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hfuv/error.hpp"
#include "hfuv/path.hpp"
#include "hfuv/path_io.hpp"

using namespace hfuv;

namespace {

ModelConfig pure_jump(double size, std::size_t count) {
  ModelConfig c;
  c.vol.sigma0 = 0.0;
  c.jumps.intensity = 1.0;
  c.jumps.size = AtomList{{{size, 1.0}}};
  c.jumps.max_abs = std::abs(size);
  c.jumps.fixed_count = count;
  return c;
}

ModelConfig brownian(double sigma, double intensity = 0.0) {
  ModelConfig c;
  c.vol.sigma0 = sigma;
  c.jumps.intensity = intensity;
  c.jumps.size = AtomList{{{-1.0, 0.5}, {1.0, 0.5}}};
  return c;
}

}  // namespace

TEST_CASE("degenerate zero path") {
  ModelConfig c;
  c.vol.sigma0 = 0.0;
  const auto p = simulate_path(c, 64, 1.0, 1);
  CHECK(p.x_grid.size() == 65);
  CHECK(p.w_increments.size() == 64);
  CHECK(p.sigma_grid.size() == 65);
  for (double x : p.x_grid) CHECK(x == 0.0);
}

TEST_CASE("pure counting process") {
  const auto p = simulate_path(pure_jump(1.0, 7), 1000, 1.0, 3);
  CHECK(p.jumps.size() == 7);
  CHECK(p.x_grid.back() == doctest::Approx(7.0).epsilon(1e-15));
  double s = 0.0;
  for (const auto& j : p.jumps) {
    s += j.size;
    CHECK(j.time > 0.0);
    CHECK(j.time <= 1.0);
    const double dn = static_cast<double>(p.n);
    CHECK(static_cast<double>(j.interval - 1) / dn < j.time);
    CHECK(j.time <= static_cast<double>(j.interval) / dn);
  }
  CHECK(s == p.x_grid.back());
}

TEST_CASE("determinism and reconstruction identity") {
  ModelConfig c = brownian(0.7, 5.0);
  c.drift = 0.3;
  c.vol.kind = VolKind::ItoSM;
  c.vol.tilde_b = 0.1;
  c.vol.tilde_sigma = 0.2;
  c.vol.tilde_v = 0.1;
  const auto a = simulate_path(c, 512, 1.0, 42);
  const auto b = simulate_path(c, 512, 1.0, 42);
  CHECK(a.x_grid == b.x_grid);
  CHECK(a.sigma_grid == b.sigma_grid);
  CHECK(a.jumps.size() == b.jumps.size());
  const double dt = 1.0 / 512.0;
  double x = 0.0;
  for (std::size_t i = 1; i < a.x_grid.size(); ++i) {
    double js = 0.0;
    for (const auto& j : a.jumps)
      if (j.interval == i) js += j.size;
    x = x + (c.drift * dt + a.sigma_grid[i - 1] * a.w_increments[i - 1] + js);
    CHECK(a.x_grid[i] == x);
  }
  for (double s : a.sigma_grid) CHECK(s >= c.vol.floor_eps);
}

TEST_CASE("increments examples") {
  SamplePath p;
  p.n = 2;
  p.T = 1.0;
  p.x_grid = {0.0, 1.0, 3.0};
  p.sigma_grid = {1.0, 1.0, 1.0};
  p.w_increments = {0.0, 0.0};
  const auto u = increments(p, false, 1.0);
  REQUIRE(u.size() == 2);
  CHECK(u[0] == 1.0);
  CHECK(u[1] == 2.0);
  const auto s = increments(p, true, 1.0);
  CHECK(s[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(s[1] == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(increments(p, false, 1.5), DomainError);
  CHECK_THROWS_AS(increments(p, false, 0.0), DomainError);
}

TEST_CASE("first order increments") {
  ModelConfig c = brownian(1.0);
  c.drift = 0.5;
  const auto p = simulate_path(c, 256, 1.0, 9);
  const auto alpha = first_order_increments(p, 1.0);
  const auto dx = increments(p, true, 1.0);
  const double rn = 16.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    CHECK(alpha[i] == doctest::Approx(rn * p.w_increments[i]));
    worst = std::max(worst, std::abs(dx[i] - alpha[i]));
  }
  CHECK(worst == doctest::Approx(rn * 0.5 / 256.0).epsilon(1e-9));
}

TEST_CASE("jump neighborhood deterministic cases") {
  auto c = pure_jump(0.5, 3);
  auto p = simulate_path(c, 128, 1.0, 5);
  for (std::size_t q = 0; q < p.jumps.size(); ++q) {
    const auto nb = jump_neighborhood(p, q);
    CHECK(nb.r_minus == 0.0);
    CHECK(nb.r_plus == 0.0);
  }
  c.drift = 1.0;
  c.jumps.fixed_count = 1;
  p = simulate_path(c, 400, 1.0, 6);
  const auto nb = jump_neighborhood(p, 0);
  CHECK(nb.r == doctest::Approx(1.0 / std::sqrt(400.0)).epsilon(1e-12));
  const double inc = p.x_grid[p.jumps[0].interval] - p.x_grid[p.jumps[0].interval - 1];
  CHECK(nb.r == doctest::Approx(std::sqrt(400.0) * (inc - p.jumps[0].size)).epsilon(1e-9));
}

TEST_CASE("jump count is Poisson in mean and variance") {
  const auto c = brownian(0.0, 4.0);
  double s = 0.0, s2 = 0.0;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    const double k = static_cast<double>(simulate_path(c, 16, 1.0, 1000 + r).jumps.size());
    s += k;
    s2 += k * k;
  }
  const double mean = s / reps, var = s2 / reps - mean * mean;
  CHECK(std::abs(mean - 4.0) < 4.0 * std::sqrt(4.0 / reps));
  CHECK(std::abs(var - 4.0) < 0.4);
}

TEST_CASE("clamp budget and validation") {
  ModelConfig c = brownian(0.001);
  c.vol.kind = VolKind::ItoSM;
  c.vol.tilde_b = -50.0;
  c.vol.clamp_budget = 3;
  CHECK_THROWS_AS(simulate_path(c, 256, 1.0, 1), SimulationError);
  ModelConfig bad;
  bad.jumps.size = AtomList{{{2.0, 1.0}}};
  bad.jumps.max_abs = 1.0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  ModelConfig const_bad;
  const_bad.vol.tilde_b = 1.0;
  CHECK_THROWS_AS(validate(const_bad), ConfigError);
}

TEST_CASE("path serialization round trips") {
  ModelConfig c = brownian(0.8, 6.0);
  const auto p = simulate_path(c, 100, 1.0, 77);
  const auto q = path_from_json(path_to_json(p));
  CHECK(q.x_grid == p.x_grid);
  CHECK(q.sigma_grid == p.sigma_grid);
  CHECK(q.w_increments == p.w_increments);
  REQUIRE(q.jumps.size() == p.jumps.size());
  for (std::size_t i = 0; i < p.jumps.size(); ++i) {
    CHECK(q.jumps[i].time == p.jumps[i].time);
    CHECK(q.jumps[i].w_offset == p.jumps[i].w_offset);
    CHECK(q.jumps[i].interval == p.jumps[i].interval);
  }
  std::stringstream bin;
  write_path_binary(p, bin);
  const auto r = read_path_binary(bin);
  CHECK(r.x_grid == p.x_grid);
  CHECK(r.seed == p.seed);
  CHECK(r.jumps.size() == p.jumps.size());
}

TEST_CASE("increments csv") {
  std::istringstream in("dx\n0.5\n\n-1.25\n2\n");
  const auto v = read_increments_csv(in);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == -1.25);
  std::istringstream bad("0.5\nabc\n");
  CHECK_THROWS_AS(read_increments_csv(bad), ConfigError);
}
