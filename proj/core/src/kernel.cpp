#include "hfuv/kernel.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include "hfuv/error.hpp"

namespace hfuv {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_num(std::string_view s, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("kernel: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

std::size_t parse_index(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("kernel: cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

double abs_pow(double x, double p) {
  if (p == 0.0) return 1.0;
  return std::pow(std::abs(x), p);
}

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

LJet make_jet(std::size_t d) { return {0.0, std::vector<double>(d, 0.0), std::vector<double>(d * d, 0.0)}; }

LJet atom_jet(const LExpr& e, std::span<const double> x) {
  const std::size_t d = x.size();
  LJet jet = make_jet(d);
  if (std::holds_alternative<LOne>(e.node)) {
    jet.value = 1.0;
  } else if (const auto* g = std::get_if<LGridSin>(&e.node)) {
    // sin_pi/cos_pi are exact at integer arguments, so lattice points give exactly 0.
    const double w = kPi / g->beta;
    const double u = (x[g->i] - x[g->j]) / g->beta;
    const double s = boost::math::sin_pi(u);
    jet.value = s * s;
    const double d1 = boost::math::sin_pi(2.0 * u) * w;
    const double d2 = 2.0 * boost::math::cos_pi(2.0 * u) * w * w;
    jet.grad[g->i] += d1;
    jet.grad[g->j] -= d1;
    jet.hess[g->i * d + g->i] += d2;
    jet.hess[g->j * d + g->j] += d2;
    jet.hess[g->i * d + g->j] -= d2;
    jet.hess[g->j * d + g->i] -= d2;
  } else if (const auto* b = std::get_if<LGaussBump>(&e.node)) {
    const double xi = x[b->i];
    const double f = std::exp(-b->c * xi * xi);
    jet.value = f;
    jet.grad[b->i] = -2.0 * b->c * xi * f;
    jet.hess[b->i * d + b->i] = (4.0 * b->c * b->c * xi * xi - 2.0 * b->c) * f;
  } else if (const auto* p = std::get_if<LPolyEven>(&e.node)) {
    const double xi = x[p->i];
    double v = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t k = 0; k < p->coeffs.size(); ++k) {
      const double c = p->coeffs[k];
      const double e2k = 2.0 * static_cast<double>(k);
      v += c * std::pow(xi, e2k);
      if (k >= 1) d1 += c * e2k * std::pow(xi, e2k - 1.0);
      if (k >= 1) d2 += c * e2k * (e2k - 1.0) * (k == 1 ? 1.0 : std::pow(xi, e2k - 2.0));
    }
    jet.value = v;
    jet.grad[p->i] = d1;
    jet.hess[p->i * d + p->i] = d2;
  }
  return jet;
}

void write_prefix(const LExpr& e, std::ostringstream& os) {
  if (std::holds_alternative<LOne>(e.node)) {
    os << "(one)";
  } else if (const auto* g = std::get_if<LGridSin>(&e.node)) {
    os << "(gridsin " << fmt_num(g->beta) << ' ' << g->i << ' ' << g->j << ')';
  } else if (const auto* b = std::get_if<LGaussBump>(&e.node)) {
    os << "(gauss " << fmt_num(b->c) << ' ' << b->i << ')';
  } else if (const auto* p = std::get_if<LPolyEven>(&e.node)) {
    os << "(poly " << p->i;
    for (double c : p->coeffs) os << ' ' << fmt_num(c);
    os << ')';
  } else if (const auto* s = std::get_if<LSum>(&e.node)) {
    os << "(sum";
    for (const auto& t : s->terms) {
      os << ' ';
      write_prefix(t, os);
    }
    os << ')';
  } else if (const auto* pr = std::get_if<LProduct>(&e.node)) {
    os << "(prod";
    for (const auto& t : pr->factors) {
      os << ' ';
      write_prefix(t, os);
    }
    os << ')';
  }
}

class PrefixParser {
 public:
  explicit PrefixParser(std::string_view text) : text_(text) {}

  LExpr parse_all() {
    LExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) error("trailing characters");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    throw ConfigError("kernel L expression: " + msg + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c)) error(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string_view token() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    if (start == pos_) error("expected token");
    return text_.substr(start, pos_ - start);
  }

  LExpr parse_expr() {
    expect('(');
    const std::string_view head = token();
    LExpr out;
    if (head == "one") {
      out = LExpr::one();
    } else if (head == "gridsin") {
      const double beta = parse_num(token(), "gridsin beta");
      const auto i = parse_index(token(), "gridsin i");
      const auto j = parse_index(token(), "gridsin j");
      out = LExpr::grid_sin(beta, i, j);
    } else if (head == "gauss") {
      const double c = parse_num(token(), "gauss c");
      out = LExpr::gauss_bump(c, parse_index(token(), "gauss i"));
    } else if (head == "poly") {
      const auto i = parse_index(token(), "poly i");
      std::vector<double> coeffs;
      while (!peek(')')) coeffs.push_back(parse_num(token(), "poly coefficient"));
      out = LExpr::poly_even(i, std::move(coeffs));
    } else if (head == "sum" || head == "prod") {
      std::vector<LExpr> kids;
      while (!peek(')')) kids.push_back(parse_expr());
      if (kids.empty()) error(std::string(head) + " needs at least one operand");
      out = head == "sum" ? LExpr::sum(std::move(kids)) : LExpr::product(std::move(kids));
    } else {
      error("unknown atom '" + std::string(head) + "'");
    }
    expect(')');
    return out;
  }
};

double atom_value(const UnaryAtom& a, double x) {
  switch (a.kind) {
    case UnaryAtom::Kind::Cos: return boost::math::cos_pi(a.param * x);
    case UnaryAtom::Kind::Sin: return boost::math::sin_pi(a.param * x);
    case UnaryAtom::Kind::Gauss: return std::exp(-a.param * x * x);
    case UnaryAtom::Kind::Poly: {
      const double x2 = x * x;
      double v = 0.0;
      for (std::size_t k = a.coeffs.size(); k-- > 0;) v = v * x2 + a.coeffs[k];
      return v;
    }
  }
  return 0.0;
}

double atom_derivative(const UnaryAtom& a, double x) {
  switch (a.kind) {
    case UnaryAtom::Kind::Cos: return -kPi * a.param * boost::math::sin_pi(a.param * x);
    case UnaryAtom::Kind::Sin: return kPi * a.param * boost::math::cos_pi(a.param * x);
    case UnaryAtom::Kind::Gauss: return -2.0 * a.param * x * std::exp(-a.param * x * x);
    case UnaryAtom::Kind::Poly: {
      double v = 0.0;
      for (std::size_t k = 1; k < a.coeffs.size(); ++k) {
        const double e = 2.0 * static_cast<double>(k);
        v += a.coeffs[k] * e * std::pow(x, e - 1.0);
      }
      return v;
    }
  }
  return 0.0;
}

std::vector<SeparableTerm> expand(const LExpr& e, std::size_t d) {
  auto unit = [d] { return SeparableTerm{1.0, std::vector<UnaryFactor>(d)}; };
  if (std::holds_alternative<LOne>(e.node)) return {unit()};
  if (const auto* g = std::get_if<LGridSin>(&e.node)) {
    // sin^2((a-b)w/2) = 1/2 - 1/2 cos(wa)cos(wb) - 1/2 sin(wa)sin(wb), w = 2 pi / beta
    const double w = 2.0 / g->beta;  // in half turns
    SeparableTerm c0 = unit();
    c0.coeff = 0.5;
    SeparableTerm cc = unit();
    cc.coeff = -0.5;
    cc.factors[g->i].atoms.push_back({UnaryAtom::Kind::Cos, w, {}});
    cc.factors[g->j].atoms.push_back({UnaryAtom::Kind::Cos, w, {}});
    SeparableTerm ss = unit();
    ss.coeff = -0.5;
    ss.factors[g->i].atoms.push_back({UnaryAtom::Kind::Sin, w, {}});
    ss.factors[g->j].atoms.push_back({UnaryAtom::Kind::Sin, w, {}});
    return {c0, cc, ss};
  }
  if (const auto* b = std::get_if<LGaussBump>(&e.node)) {
    SeparableTerm t = unit();
    t.factors[b->i].atoms.push_back({UnaryAtom::Kind::Gauss, b->c, {}});
    return {t};
  }
  if (const auto* p = std::get_if<LPolyEven>(&e.node)) {
    SeparableTerm t = unit();
    t.factors[p->i].atoms.push_back({UnaryAtom::Kind::Poly, 0.0, p->coeffs});
    return {t};
  }
  if (const auto* s = std::get_if<LSum>(&e.node)) {
    std::vector<SeparableTerm> out;
    for (const auto& t : s->terms) {
      auto part = expand(t, d);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  const auto& pr = std::get<LProduct>(e.node);
  std::vector<SeparableTerm> acc{unit()};
  for (const auto& f : pr.factors) {
    const auto rhs = expand(f, d);
    std::vector<SeparableTerm> next;
    next.reserve(acc.size() * rhs.size());
    for (const auto& a : acc) {
      for (const auto& b : rhs) {
        SeparableTerm t{a.coeff * b.coeff, std::vector<UnaryFactor>(d)};
        for (std::size_t k = 0; k < d; ++k) t.factors[k] = a.factors[k].times(b.factors[k]);
        next.push_back(std::move(t));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

void check_coords(const LExpr& e, std::size_t d) {
  for_each_atom(e, [d](const LExpr& a) {
    if (const auto* g = std::get_if<LGridSin>(&a.node)) {
      if (g->i >= d || g->j >= d) throw ConfigError("kernel: gridsin coordinate out of range");
      if (g->i == g->j) throw ConfigError("kernel: gridsin needs two distinct coordinates");
      if (!(g->beta > 0.0) || !std::isfinite(g->beta)) throw ConfigError("kernel: gridsin requires beta > 0");
    } else if (const auto* b = std::get_if<LGaussBump>(&a.node)) {
      if (b->i >= d) throw ConfigError("kernel: gauss coordinate out of range");
      if (!std::isfinite(b->c)) throw ConfigError("kernel: gauss c must be finite");
    } else if (const auto* p = std::get_if<LPolyEven>(&a.node)) {
      if (p->i >= d) throw ConfigError("kernel: poly coordinate out of range");
      if (p->coeffs.empty()) throw ConfigError("kernel: poly needs at least one coefficient");
    }
  });
}

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_num(v[i]);
  }
  return out;
}

std::vector<double> split_nums(std::string_view s, std::string_view what) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_num(piece, what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::JumpLLN: return "JumpLLN";
    case Regime::JumpCLT: return "JumpCLT";
    case Regime::MixedLLN: return "MixedLLN";
    case Regime::MixedCLT: return "MixedCLT";
    case Regime::GridTest: return "GridTest";
  }
  return "?";
}

Regime parse_regime(std::string_view s) {
  for (Regime r : {Regime::JumpLLN, Regime::JumpCLT, Regime::MixedLLN, Regime::MixedCLT, Regime::GridTest})
    if (to_string(r) == s) return r;
  throw ConfigError("kernel: unknown regime '" + std::string(s) + "'");
}

double l_value(const LExpr& e, std::span<const double> x) {
  if (const auto* s = std::get_if<LSum>(&e.node)) {
    double v = 0.0;
    for (const auto& t : s->terms) v += l_value(t, x);
    return v;
  }
  if (const auto* p = std::get_if<LProduct>(&e.node)) {
    double v = 1.0;
    for (const auto& t : p->factors) v *= l_value(t, x);
    return v;
  }
  if (std::holds_alternative<LOne>(e.node)) return 1.0;
  if (const auto* g = std::get_if<LGridSin>(&e.node)) {
    const double s = std::sin(kPi * (x[g->i] - x[g->j]) / g->beta);
    return s * s;
  }
  if (const auto* b = std::get_if<LGaussBump>(&e.node)) return std::exp(-b->c * x[b->i] * x[b->i]);
  const auto& pe = std::get<LPolyEven>(e.node);
  const double x2 = x[pe.i] * x[pe.i];
  double v = 0.0;
  for (std::size_t k = pe.coeffs.size(); k-- > 0;) v = v * x2 + pe.coeffs[k];
  return v;
}

LJet l_jet(const LExpr& e, std::span<const double> x) {
  const std::size_t d = x.size();
  if (const auto* s = std::get_if<LSum>(&e.node)) {
    LJet acc = make_jet(d);
    for (const auto& t : s->terms) {
      const LJet j = l_jet(t, x);
      acc.value += j.value;
      for (std::size_t a = 0; a < d; ++a) acc.grad[a] += j.grad[a];
      for (std::size_t a = 0; a < d * d; ++a) acc.hess[a] += j.hess[a];
    }
    return acc;
  }
  if (const auto* p = std::get_if<LProduct>(&e.node)) {
    LJet acc = make_jet(d);
    acc.value = 1.0;
    for (const auto& t : p->factors) {
      const LJet g = l_jet(t, x);
      LJet next = make_jet(d);
      next.value = acc.value * g.value;
      for (std::size_t a = 0; a < d; ++a) next.grad[a] = acc.grad[a] * g.value + acc.value * g.grad[a];
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          next.hess[a * d + b] = acc.hess[a * d + b] * g.value + acc.value * g.hess[a * d + b] +
                                 acc.grad[a] * g.grad[b] + g.grad[a] * acc.grad[b];
      acc = std::move(next);
    }
    return acc;
  }
  return atom_jet(e, x);
}

std::string to_prefix(const LExpr& e) {
  std::ostringstream os;
  write_prefix(e, os);
  return os.str();
}

LExpr parse_prefix(std::string_view text) { return PrefixParser(text).parse_all(); }

std::vector<bool> l_dependencies(const LExpr& e, std::size_t d) {
  std::vector<bool> dep(d, false);
  for_each_atom(e, [&](const LExpr& a) {
    if (const auto* g = std::get_if<LGridSin>(&a.node)) {
      dep[g->i] = dep[g->j] = true;
    } else if (const auto* b = std::get_if<LGaussBump>(&a.node)) {
      if (b->c != 0.0) dep[b->i] = true;
    } else if (const auto* p = std::get_if<LPolyEven>(&a.node)) {
      for (std::size_t k = 1; k < p->coeffs.size(); ++k)
        if (p->coeffs[k] != 0.0) dep[p->i] = true;
    }
  });
  return dep;
}

double UnaryFactor::operator()(double x) const {
  double v = abs_pow(x, power);
  for (const auto& a : atoms) v *= atom_value(a, x);
  return v;
}

double UnaryFactor::derivative(double x) const {
  // Product rule over |x|^power and the atoms.
  double rest = 1.0;
  for (const auto& a : atoms) rest *= atom_value(a, x);
  double out = 0.0;
  if (power != 0.0 && x != 0.0) out += power * sgn(x) * abs_pow(x, power - 1.0) * rest;
  const double base = abs_pow(x, power);
  if (base != 0.0) {
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      double term = atom_derivative(atoms[k], x);
      for (std::size_t m = 0; m < atoms.size(); ++m)
        if (m != k) term *= atom_value(atoms[m], x);
      out += base * term;
    }
  }
  return out;
}

UnaryFactor UnaryFactor::times(const UnaryFactor& other) const {
  UnaryFactor out = *this;
  out.power += other.power;
  out.atoms.insert(out.atoms.end(), other.atoms.begin(), other.atoms.end());
  return out;
}

std::vector<SeparableTerm> separable_expansion(const LExpr& e, std::size_t d) {
  check_coords(e, d);
  return expand(e, d);
}

void KernelSpec::validate() const {
  if (d < 1) throw ConfigError("kernel: d must be >= 1");
  if (l > d) throw ConfigError("kernel: l must satisfy 0 <= l <= d");
  if (powers.size() != d) throw ConfigError("kernel: expected d powers (l values of p, d-l values of q)");
  for (double p : powers)
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("kernel: powers must be finite and >= 0");
  check_coords(L, d);
  if (name.empty() || name.find_first_of(" \t\n=") != std::string::npos)
    throw ConfigError("kernel: name must be a non-empty token");
}

std::string KernelSpec::to_text() const {
  std::ostringstream os;
  os << name << " regime=" << to_string(regime) << " d=" << d << " l=" << l << " p=" << join(p())
     << " q=" << join(q()) << " L=" << to_prefix(L);
  return os.str();
}

KernelSpec KernelSpec::parse(std::string_view text) {
  KernelSpec k;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  };
  k.name = std::string(next_token());
  if (k.name.empty() || k.name.find('=') != std::string::npos) throw ConfigError("kernel: text must start with a name");
  bool seen_regime = false, seen_d = false, seen_l = false, seen_L = false;
  std::vector<double> p, q;
  for (;;) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    if (text.substr(pos, 2) == "L=") {
      k.L = parse_prefix(text.substr(pos + 2));
      seen_L = true;
      break;
    }
    const auto tok = next_token();
    const auto eq = tok.find('=');
    if (eq == std::string_view::npos) throw ConfigError("kernel: expected key=value, got '" + std::string(tok) + "'");
    const auto key = tok.substr(0, eq);
    const auto val = tok.substr(eq + 1);
    if (key == "regime") {
      k.regime = parse_regime(val);
      seen_regime = true;
    } else if (key == "d") {
      k.d = parse_index(val, "d");
      seen_d = true;
    } else if (key == "l") {
      k.l = parse_index(val, "l");
      seen_l = true;
    } else if (key == "p") {
      p = split_nums(val, "p");
    } else if (key == "q") {
      q = split_nums(val, "q");
    } else {
      throw ConfigError("kernel: unknown key '" + std::string(key) + "'");
    }
  }
  if (!seen_regime || !seen_d || !seen_l || !seen_L)
    throw ConfigError("kernel: regime, d, l and L are required");
  if (p.size() != k.l || q.size() != k.d - std::min(k.l, k.d))
    throw ConfigError("kernel: p must have l entries and q must have d-l entries");
  k.powers = p;
  k.powers.insert(k.powers.end(), q.begin(), q.end());
  k.validate();
  return k;
}

KernelSpec power_kernel(Regime regime, std::size_t l, std::vector<double> powers) {
  KernelSpec k;
  k.name = "power";
  k.regime = regime;
  k.d = powers.size();
  k.l = l;
  k.powers = std::move(powers);
  k.L = LExpr::one();
  k.validate();
  return k;
}

KernelSpec grid_test_kernel(double beta) {
  KernelSpec k;
  k.name = "gridtest";
  k.regime = Regime::GridTest;
  k.d = 2;
  k.l = 2;
  k.powers = {4.0, 4.0};
  k.L = LExpr::grid_sin(beta, 0, 1);
  k.validate();
  return k;
}

double eval_h(const KernelSpec& k, std::span<const double> point) {
  if (point.size() != k.d) throw DomainError("eval_h: point has wrong dimension");
  double v = 1.0;
  for (std::size_t i = 0; i < k.d; ++i) v *= abs_pow(point[i], k.powers[i]);
  if (v == 0.0) return 0.0;
  return v * l_value(k.L, point);
}

double partial_h(const KernelSpec& k, std::size_t j, std::span<const double> point) {
  if (point.size() != k.d || j >= k.d) throw DomainError("partial_h: bad coordinate or dimension");
  const double pj = k.powers[j];
  if (point[j] == 0.0 && pj > 0.0 && pj <= 1.0)
    throw DomainError("partial_h: derivative at 0 requested for a coordinate with power <= 1");
  double others = 1.0;
  for (std::size_t i = 0; i < k.d; ++i)
    if (i != j) others *= abs_pow(point[i], k.powers[i]);
  if (others == 0.0) return 0.0;
  const LJet jet = l_jet(k.L, point);
  double out = 0.0;
  if (pj != 0.0 && point[j] != 0.0) out += pj * sgn(point[j]) * abs_pow(point[j], pj - 1.0) * jet.value;
  out += abs_pow(point[j], pj) * jet.grad[j];
  return others * out;
}

std::vector<SeparableTerm> separable_form(const KernelSpec& k) {
  auto terms = separable_expansion(k.L, k.d);
  for (auto& t : terms)
    for (std::size_t i = 0; i < k.d; ++i) t.factors[i].power += k.powers[i];
  return terms;
}

}  // namespace hfuv
