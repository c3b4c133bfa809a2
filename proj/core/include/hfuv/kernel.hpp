#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hfuv {

enum class Regime { JumpLLN, JumpCLT, MixedLLN, MixedCLT, GridTest };

std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view s);

// Catalog atoms for the smooth factor L. Coordinates are 0-based.
struct LOne {};
struct LGridSin {  // sin^2(pi (x_i - x_j) / beta)
  double beta = 1.0;
  std::size_t i = 0;
  std::size_t j = 1;
};
struct LGaussBump {  // exp(-c x_i^2)
  double c = 1.0;
  std::size_t i = 0;
};
struct LPolyEven {  // sum_k coeffs[k] x_i^{2k}
  std::size_t i = 0;
  std::vector<double> coeffs;
};

struct LExpr;
struct LSum {
  std::vector<LExpr> terms;
};
struct LProduct {
  std::vector<LExpr> factors;
};

struct LExpr {
  std::variant<LOne, LGridSin, LGaussBump, LPolyEven, LSum, LProduct> node;

  static LExpr one() { return {LOne{}}; }
  static LExpr grid_sin(double beta, std::size_t i, std::size_t j) { return {LGridSin{beta, i, j}}; }
  static LExpr gauss_bump(double c, std::size_t i) { return {LGaussBump{c, i}}; }
  static LExpr poly_even(std::size_t i, std::vector<double> coeffs) { return {LPolyEven{i, std::move(coeffs)}}; }
  static LExpr sum(std::vector<LExpr> terms) { return {LSum{std::move(terms)}}; }
  static LExpr product(std::vector<LExpr> factors) { return {LProduct{std::move(factors)}}; }

  bool is_atom() const noexcept {
    return !std::holds_alternative<LSum>(node) && !std::holds_alternative<LProduct>(node);
  }
};

/// Value, gradient and Hessian (row-major d x d) of L at one point.
struct LJet {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;
};

double l_value(const LExpr& e, std::span<const double> x);
LJet l_jet(const LExpr& e, std::span<const double> x);

/// Prefix notation: (one) (gridsin b i j) (gauss c i) (poly i c0 c1 ...)
/// (sum e1 e2 ...) (prod e1 e2 ...).
std::string to_prefix(const LExpr& e);
LExpr parse_prefix(std::string_view text);

/// Coordinates L depends on (size d).
std::vector<bool> l_dependencies(const LExpr& e, std::size_t d);

/// Visit every atom of the expression tree.
template <class F>
void for_each_atom(const LExpr& e, F&& f) {
  if (const auto* s = std::get_if<LSum>(&e.node)) {
    for (const auto& t : s->terms) for_each_atom(t, f);
  } else if (const auto* p = std::get_if<LProduct>(&e.node)) {
    for (const auto& t : p->factors) for_each_atom(t, f);
  } else {
    f(e);
  }
}

// One-dimensional building block of a separable kernel term:
// |x|^power times a product of cos/sin/gauss/even-polynomial atoms.
struct UnaryAtom {
  enum class Kind { Cos, Sin, Gauss, Poly };
  Kind kind = Kind::Cos;
  double param = 0.0;  // omega / pi for Cos/Sin, c for Gauss
  std::vector<double> coeffs;  // Poly only
};

struct UnaryFactor {
  double power = 0.0;
  std::vector<UnaryAtom> atoms;

  double operator()(double x) const;
  double derivative(double x) const;
  bool pure_power() const noexcept { return atoms.empty(); }
  UnaryFactor times(const UnaryFactor& other) const;
};

struct SeparableTerm {
  double coeff = 1.0;
  std::vector<UnaryFactor> factors;  // one per coordinate
};

/// L = sum_r coeff_r prod_k factors_{r,k}(x_k). GridSin expands to rank 3.
std::vector<SeparableTerm> separable_expansion(const LExpr& e, std::size_t d);

/// Kernel H(x, y) = prod_{i<l} |x_i|^{p_i} prod_{j<d-l} |y_j|^{q_j} L(x, y).
struct KernelSpec {
  std::string name = "H";
  Regime regime = Regime::JumpLLN;
  std::size_t d = 1;
  std::size_t l = 1;
  std::vector<double> powers;  // length d: p then q
  LExpr L = LExpr::one();

  std::span<const double> p() const noexcept { return std::span<const double>(powers).first(l); }
  std::span<const double> q() const noexcept { return std::span<const double>(powers).subspan(l); }

  /// Structural checks (dimensions, coordinates, finite parameters). Throws ConfigError.
  void validate() const;

  /// "<name> regime=<R> d=<d> l=<l> p=<a,b> q=<c> L=<prefix>"
  std::string to_text() const;
  static KernelSpec parse(std::string_view text);
};

/// Product-power kernel with L = One.
KernelSpec power_kernel(Regime regime, std::size_t l, std::vector<double> powers);

/// |x|^4 |y|^4 sin^2(pi (x - y) / beta), d = l = 2.
KernelSpec grid_test_kernel(double beta);

double eval_h(const KernelSpec& k, std::span<const double> point);

/// Analytic dH/dx_j. At x_j = 0 the value is 0 when p_j > 1; for
/// 0 < p_j <= 1 a DomainError is raised.
double partial_h(const KernelSpec& k, std::size_t j, std::span<const double> point);

/// Separable form of H itself (power factors folded in).
std::vector<SeparableTerm> separable_form(const KernelSpec& k);

}  // namespace hfuv
