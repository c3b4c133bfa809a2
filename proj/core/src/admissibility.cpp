#include "hfuv/admissibility.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hfuv/rng.hpp"

namespace hfuv {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Growth {
  double value = 0.0;             // growth exponent of |L| in ||x||
  std::vector<double> derivative; // growth exponent of |d_j L| in ||x||
};

// Growth of one atom in the x-block (coordinates < l).
Growth atom_growth(const LExpr& a, const KernelSpec& k) {
  Growth g{0.0, std::vector<double>(k.d, 0.0)};
  if (const auto* b = std::get_if<LGaussBump>(&a.node)) {
    if (b->c < 0.0 && b->i < k.l) {
      g.value = kInf;
      g.derivative[b->i] = kInf;
    }
  } else if (const auto* p = std::get_if<LPolyEven>(&a.node)) {
    std::size_t degree = 0;
    for (std::size_t m = 0; m < p->coeffs.size(); ++m)
      if (p->coeffs[m] != 0.0) degree = m;
    if (p->i < k.l && degree > 0) {
      g.value = 2.0 * static_cast<double>(degree);
      g.derivative[p->i] = 2.0 * static_cast<double>(degree) - 1.0;
    }
  }
  return g;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void power_check(AdmissibilityReport& r, const KernelSpec& k, std::string hyp, bool on_p, double lo,
                 bool lo_strict, double hi, bool hi_strict) {
  auto vals = on_p ? k.p() : k.q();
  std::string bad;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double v = vals[i];
    const bool ok_lo = lo_strict ? v > lo : v >= lo;
    const bool ok_hi = hi_strict ? v < hi : v <= hi;
    if (!(ok_lo && ok_hi)) bad += (bad.empty() ? "" : ", ") + std::string(on_p ? "p[" : "q[") + std::to_string(i) + "]=" + fmt(v);
  }
  r.items.push_back({std::move(hyp), bad.empty() ? CheckStatus::Pass : CheckStatus::Fail, bad});
}

std::vector<std::vector<double>> sample_points(const KernelSpec& k, std::size_t count) {
  Rng rng(derive_seed(0xad315, "admissibility"));
  std::uniform_real_distribution<double> u(0.3, 1.7);
  std::bernoulli_distribution sign(0.5);
  std::vector<std::vector<double>> pts(count, std::vector<double>(k.d));
  for (auto& p : pts)
    for (auto& v : p) v = sign(rng) ? u(rng) : -u(rng);
  return pts;
}

// lim_{x -> 0} H(x, y) / prod_{i<l} |x_i|^2 = 0, probed along x = eps * u.
void alln_check(AdmissibilityReport& r, const KernelSpec& k) {
  if (k.l == 0) {
    r.items.push_back({"(alln) vanishing ratio", CheckStatus::Fail, "requires l >= 1"});
    return;
  }
  for (const auto& base : sample_points(k, 6)) {
    double first = 0.0, last = 0.0;
    for (int e = 1; e <= 8; ++e) {
      const double eps = std::pow(10.0, -e);
      auto pt = base;
      double denom = 1.0;
      for (std::size_t i = 0; i < k.l; ++i) {
        pt[i] *= eps;
        denom *= pt[i] * pt[i];
      }
      const double ratio = std::abs(eval_h(k, pt)) / denom;
      if (e == 1) first = ratio;
      last = ratio;
    }
    if (!(last < 1e-12 || last <= 0.1 * first)) {
      r.items.push_back({"(alln) vanishing ratio", CheckStatus::Fail,
                         "H/prod|x_i|^2 does not shrink toward 0 (ratio " + fmt(last) + ")"});
      return;
    }
  }
  r.items.push_back({"(alln) vanishing ratio", CheckStatus::Pass, ""});
}

// L in A_l(d): d_k L(x, y) -> 0 as y -> 0 for k >= l.
void a_class_check(AdmissibilityReport& r, const KernelSpec& k) {
  if (k.l == k.d) {
    r.items.push_back({"L in A_l(d)", CheckStatus::Pass, "l = d: A_d(d) = C^{d+1}"});
    return;
  }
  for (const auto& base : sample_points(k, 6)) {
    auto pt = base;
    for (std::size_t j = k.l; j < k.d; ++j) pt[j] *= 1e-8;
    const LJet jet = l_jet(k.L, pt);
    for (std::size_t j = k.l; j < k.d; ++j) {
      if (std::abs(jet.grad[j]) > 1e-6) {
        r.items.push_back({"L in A_l(d)", CheckStatus::Fail,
                           "d_" + std::to_string(j) + " L does not vanish as y -> 0"});
        return;
      }
    }
  }
  r.items.push_back({"L in A_l(d)", CheckStatus::Pass, ""});
}

void even_check(AdmissibilityReport& r, const KernelSpec& k) {
  for (const auto& base : sample_points(k, 8)) {
    const double ref = eval_h(k, base);
    for (std::size_t i = 0; i < k.l; ++i) {
      auto pt = base;
      pt[i] = -pt[i];
      if (std::abs(eval_h(k, pt) - ref) > 1e-12 * (1.0 + std::abs(ref))) {
        r.items.push_back({"even in x-block", CheckStatus::Fail, "H changes under x_" + std::to_string(i) + " -> -x_" + std::to_string(i)});
        return;
      }
    }
  }
  r.items.push_back({"even in x-block", CheckStatus::Pass, ""});
}

void bounded_in_x_check(AdmissibilityReport& r, const KernelSpec& k) {
  std::string bad;
  for_each_atom(k.L, [&](const LExpr& a) {
    if (atom_growth(a, k).value > 0.0) bad = to_prefix(a);
  });
  r.items.push_back({"|L(x,y)| <= u(y)", bad.empty() ? CheckStatus::Pass : CheckStatus::Fail,
                     bad.empty() ? "" : "atom " + bad + " grows in the x-block"});
}

void growth_check(AdmissibilityReport& r, const KernelSpec& k) {
  std::string bad;
  for_each_atom(k.L, [&](const LExpr& a) {
    const Growth g = atom_growth(a, k);
    for (std::size_t i = 0; i < k.l; ++i)
      for (std::size_t j = 0; j < k.d; ++j)
        if (i != j && !(g.derivative[j] + k.powers[i] < 1.0))
          bad = "atom " + to_prefix(a) + ": gamma_" + std::to_string(j) + " + p_" + std::to_string(i) + " >= 1";
  });
  r.items.push_back({"gamma_j + p_i < 1", bad.empty() ? CheckStatus::Pass : CheckStatus::Fail, bad});
  if (!k.L.is_atom()) {
    r.items.push_back({"growth of composed L", CheckStatus::Unverified,
                       "unverified growth: only per-atom exponents are checked"});
  }
}

}  // namespace

bool AdmissibilityReport::passed() const noexcept {
  for (const auto& it : items)
    if (it.status == CheckStatus::Fail) return false;
  return true;
}

std::string AdmissibilityReport::first_failure() const {
  for (const auto& it : items)
    if (it.status == CheckStatus::Fail) return it.hypothesis + (it.detail.empty() ? "" : ": " + it.detail);
  return {};
}

AdmissibilityReport check_admissibility(const KernelSpec& k) {
  AdmissibilityReport r;
  r.regime = k.regime;
  switch (k.regime) {
    case Regime::JumpLLN:
      alln_check(r, k);
      break;
    case Regime::GridTest:
      r.items.push_back({"d = l = 2", k.d == 2 && k.l == 2 ? CheckStatus::Pass : CheckStatus::Fail,
                         k.d == 2 && k.l == 2 ? "" : "grid test kernels act on pairs of jumps"});
      [[fallthrough]];
    case Regime::JumpCLT:
      power_check(r, k, "p>3", true, 3.0, true, kInf, false);
      alln_check(r, k);
      a_class_check(r, k);
      break;
    case Regime::MixedLLN:
      power_check(r, k, "p<2", true, 0.0, false, 2.0, true);
      power_check(r, k, "q>2", false, 2.0, true, kInf, false);
      bounded_in_x_check(r, k);
      break;
    case Regime::MixedCLT:
      power_check(r, k, "0<p<1", true, 0.0, true, 1.0, true);
      power_check(r, k, "q>3", false, 3.0, true, kInf, false);
      even_check(r, k);
      bounded_in_x_check(r, k);
      growth_check(r, k);
      break;
  }
  return r;
}

}  // namespace hfuv
