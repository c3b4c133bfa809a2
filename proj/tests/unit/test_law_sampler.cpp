#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "hfuv/ks.hpp"
#include "hfuv/law_sampler.hpp"
#include "hfuv/limits.hpp"

using namespace hfuv;
using fixture::synthetic_path;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0, se = 0.0;
};

Moments moments(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  const double m = s / static_cast<double>(x.size());
  double q = 0.0;
  for (double v : x) q += (v - m) * (v - m);
  const double var = q / static_cast<double>(x.size() - 1);
  return {m, var, std::sqrt(var / static_cast<double>(x.size()))};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST_CASE("augmentation") {
  const auto none = synthetic_path(64, 1.0, {}, {});
  CHECK(augment(none, 1).draws.empty());
  const double sigma = 1.4;
  const auto p = synthetic_path(64, sigma, {0.5}, {0.3});
  std::vector<double> kappa, r;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto a = augment(p, s);
    kappa.push_back(a.draws[0].kappa);
    r.push_back(a.draws[0].r);
    CHECK(a.draws[0].r == a.draws[0].r_minus + a.draws[0].r_plus);
  }
  CHECK(std::abs(moments(kappa).mean - 0.5) < 0.02);
  CHECK(std::abs(moments(r).var / (sigma * sigma) - 1.0) < 0.05);
  const auto a1 = augment(p, 99), a2 = augment(p, 99);
  CHECK(a1.draws[0].r == a2.draws[0].r);
}

TEST_CASE("sample_u_jump structure") {
  const auto none = synthetic_path(64, 1.0, {}, {});
  const auto k1 = power_kernel(Regime::JumpCLT, 1, {4.0});
  CHECK(sample_u_jump(none, k1, augment(none, 3), 1.0).value == 0.0);
  const double z = -1.3;
  const auto one = synthetic_path(64, 1.0, {z}, {0.5});
  const auto aug = augment(one, 7);
  CHECK(sample_u_jump(one, k1, aug, 1.0).value == doctest::Approx(-4.0 * std::pow(1.3, 3) * aug.draws[0].r));

  // Tuple enumeration equals the regrouped form sum_p R_p sum_j vbar_j(dX_p).
  const auto p = synthetic_path(64, 0.8, {0.6, -1.1, 0.9}, {0.2, 0.5, 0.8});
  for (const auto& k : {power_kernel(Regime::JumpCLT, 2, {4.0, 4.0}), grid_test_kernel(0.8),
                        power_kernel(Regime::JumpCLT, 1, {4.0, 5.0})}) {
    const auto a = augment(p, 11);
    const double tf = std::pow(0.75, static_cast<double>(k.d - k.l));
    double regrouped = 0.0;
    for (std::size_t q = 0; q < p.jumps.size(); ++q) {
      if (p.jumps[q].time > 0.75) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < k.l; ++j) s += vbar(p, k, j, p.jumps[q].size, 0.75);
      regrouped += tf * s * a.draws[q].r;
    }
    const auto d = sample_u_jump(p, k, a, 0.75);
    CHECK(d.value == doctest::Approx(regrouped).epsilon(1e-12));
    CHECK(d.value == d.jump_term);
  }
}

TEST_CASE("sample_u_jump conditional law") {
  const auto p = synthetic_path(64, 0.9, {0.7, -1.2, 0.4}, {0.2, 0.5, 0.8});
  for (const auto& k : {power_kernel(Regime::JumpCLT, 1, {4.0}), power_kernel(Regime::JumpCLT, 2, {4.0, 4.0})}) {
    const double cv = cond_var_jump(p, k, 1.0).total;
    std::vector<double> u, zs;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      u.push_back(sample_u_jump(p, k, augment(p, 1000 + s), 1.0).value);
      zs.push_back(u.back() / std::sqrt(cv));
    }
    const auto m = moments(u);
    CHECK(std::abs(m.mean) < 3.0 * m.se);
    CHECK(std::abs(m.var / cv - 1.0) < 0.05);
    CHECK(ks_normal(zs).p_value > 0.01);
  }
}

TEST_CASE("sample_v_mixed") {
  const auto k = power_kernel(Regime::MixedCLT, 1, {0.5, 4.0});
  const auto none = synthetic_path(256, 1.0, {}, {});
  const MixedModel m0(none, k, 1.0);
  CHECK(sample_v_mixed(m0, augment(none, 1)).value == 0.0);

  const auto p = synthetic_path(256, 1.1, {0.8, -1.2}, {0.3, 0.7});
  const MixedModel model(p, k, 1.0);
  const auto cv = model.cond_var();
  std::vector<double> full, jump_only;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto aug = augment(p, 5000 + s);
    const auto d = sample_v_mixed(model, aug);
    CHECK(d.value == doctest::Approx(d.jump_term + d.field_term));
    full.push_back(d.value);
    jump_only.push_back(sample_v_mixed(model, aug, {false}).value);
  }
  const auto mf = moments(full), mj = moments(jump_only);
  CHECK(std::abs(mf.mean) < 3.0 * mf.se);
  CHECK(std::abs(mf.var / cv.total - 1.0) < 0.05);
  CHECK(std::abs(mj.var / cv.jump_term - 1.0) < 0.05);

  // l = d: the field alone, one empty tuple.
  const auto kd = power_kernel(Regime::MixedCLT, 1, {0.5});
  const MixedModel md(none, kd, 1.0);
  std::vector<double> f;
  for (std::uint64_t s = 0; s < 10000; ++s) f.push_back(sample_v_mixed(md, augment(none, s)).value);
  CHECK(std::abs(moments(f).var / md.cond_var().total - 1.0) < 0.05);
}

TEST_CASE("truncated_z") {
  const auto k = power_kernel(Regime::JumpCLT, 1, {4.0});
  const auto p = synthetic_path(64, 1.0, {0.3, -1.0, 0.6}, {0.2, 0.5, 0.8});
  const auto aug = augment(p, 4);
  CHECK(truncated_z(p, k, 3, aug, 1.0) == sample_u_jump(p, k, aug, 1.0).value);
  CHECK(truncated_z(p, k, 10, aug, 1.0) == sample_u_jump(p, k, aug, 1.0).value);
  CHECK(truncated_z(p, k, 0, aug, 1.0) == 0.0);
  // m = 1 keeps only the jump of size -1.0.
  CHECK(truncated_z(p, k, 1, aug, 1.0) == doctest::Approx(-4.0 * aug.draws[1].r));

  std::vector<double> sizes, times;
  for (int i = 0; i < 20; ++i) {
    sizes.push_back((i % 2 ? -1.0 : 1.0) * (0.2 + 0.04 * i));
    times.push_back((i + 0.5) / 20.0);
  }
  const auto q = synthetic_path(64, 1.0, sizes, times);
  const auto k2 = power_kernel(Regime::JumpCLT, 2, {4.0, 4.0});
  double prev = 1e300;
  for (std::size_t m = 0; m <= 20; m += 4) {
    std::vector<double> dev;
    for (std::uint64_t s = 0; s < 500; ++s) {
      const auto a = augment(q, s);
      dev.push_back(std::abs(truncated_z(q, k2, m, a, 1.0) - truncated_z(q, k2, 20, a, 1.0)));
    }
    const double med = median(dev);
    CHECK(med <= prev);
    prev = med;
  }
  CHECK(prev == 0.0);
}
