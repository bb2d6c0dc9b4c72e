#include "srusk/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace srusk {

struct ExprNode {
  Op op = Op::Const;
  Rational value;     // Const
  Rational exponent;  // Pow
  Coord coord;        // Var
  std::string name;   // Param
  std::vector<Expr> args;
  std::size_t hash = 0;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_rational(const Rational& r) {
  return mix(std::hash<std::int64_t>{}(r.num()), std::hash<std::int64_t>{}(r.den()));
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    default: return "?";
  }
}

}  // namespace

// Raw node construction; callers guarantee canonical form.
struct ExprFactory {
  static Expr make(ExprNode node) {
    std::size_t h = std::hash<int>{}(static_cast<int>(node.op));
    switch (node.op) {
      case Op::Const: h = mix(h, hash_rational(node.value)); break;
      case Op::Var:
        h = mix(h, static_cast<std::size_t>(node.coord.kind));
        h = mix(h, static_cast<std::size_t>(node.coord.index));
        break;
      case Op::Param: h = mix(h, std::hash<std::string>{}(node.name)); break;
      case Op::Pow: h = mix(h, hash_rational(node.exponent)); [[fallthrough]];
      default:
        for (const auto& a : node.args) h = mix(h, a.hash());
    }
    node.hash = h;
    return Expr(std::make_shared<const ExprNode>(std::move(node)));
  }
  static Expr constant(const Rational& r) {
    ExprNode n;
    n.op = Op::Const;
    n.value = r;
    return make(std::move(n));
  }
  static Expr nary(Op op, std::vector<Expr> args) {
    ExprNode n;
    n.op = op;
    n.args = std::move(args);
    return make(std::move(n));
  }
  static Expr power(const Expr& base, const Rational& e) {
    ExprNode n;
    n.op = Op::Pow;
    n.exponent = e;
    n.args = {base};
    return make(std::move(n));
  }
  static Expr function(Op op, const Expr& a) { return nary(op, {a}); }
};

namespace {

const Expr& zero_expr() {
  static const Expr z = ExprFactory::constant(Rational(0));
  return z;
}

}  // namespace

Expr::Expr() : node_(zero_expr().node_) {}

Expr::Expr(Rational value) : node_(ExprFactory::constant(value).node_) {}

Expr Expr::var(Coord c) {
  if (c.indexed() && c.index < 1) throw std::invalid_argument("coordinate index must be >= 1");
  ExprNode n;
  n.op = Op::Var;
  n.coord = c;
  return ExprFactory::make(std::move(n));
}

Expr Expr::param(std::string name) {
  ExprNode n;
  n.op = Op::Param;
  n.name = std::move(name);
  return ExprFactory::make(std::move(n));
}

Op Expr::op() const { return node_->op; }
bool Expr::is_zero_constant() const { return node_->op == Op::Const && node_->value.is_zero(); }
bool Expr::is_one_constant() const { return node_->op == Op::Const && node_->value.is_one(); }
const Rational& Expr::value() const { return node_->value; }
const Coord& Expr::coord() const { return node_->coord; }
const std::string& Expr::name() const { return node_->name; }
const Rational& Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }
std::string Expr::str() const { return to_string(*this); }

int compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
  switch (a.op()) {
    case Op::Const:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Op::Var:
      if (a.coord() == b.coord()) return 0;
      return a.coord() < b.coord() ? -1 : 1;
    case Op::Param: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Op::Pow: {
      int c = compare(a.arg(0), b.arg(0));
      if (c != 0) return c;
      if (a.exponent() == b.exponent()) return 0;
      return a.exponent() < b.exponent() ? -1 : 1;
    }
    default: {
      auto aa = a.args();
      auto bb = b.args();
      std::size_t m = std::min(aa.size(), bb.size());
      for (std::size_t i = 0; i < m; ++i) {
        int c = compare(aa[i], bb[i]);
        if (c != 0) return c;
      }
      if (aa.size() == bb.size()) return 0;
      return aa.size() < bb.size() ? -1 : 1;
    }
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

namespace {

// Splits a canonical term into (coefficient, rest).
std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.is_const()) return {term.value(), Expr(1)};
  if (term.op() == Op::Mul && term.arg(0).is_const()) {
    auto args = term.args();
    if (args.size() == 2) return {args[0].value(), args[1]};
    return {args[0].value(), ExprFactory::nary(Op::Mul, std::vector<Expr>(args.begin() + 1, args.end()))};
  }
  return {Rational(1), term};
}

Expr scale_term(const Expr& base, const Rational& coef) {
  if (coef.is_one()) return base;
  if (base.op() == Op::Mul) {
    std::vector<Expr> args{ExprFactory::constant(coef)};
    args.insert(args.end(), base.args().begin(), base.args().end());
    return ExprFactory::nary(Op::Mul, std::move(args));
  }
  return ExprFactory::nary(Op::Mul, {ExprFactory::constant(coef), base});
}

std::pair<Expr, Rational> split_power(const Expr& f) {
  if (f.op() == Op::Pow) return {f.arg(0), f.exponent()};
  return {f, Rational(1)};
}

// Largest integer r with r^k <= v (v >= 0), or -1 when not exact.
std::int64_t exact_root(std::int64_t v, std::int64_t k) {
  if (v < 0) return -1;
  if (v <= 1) return v;
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(k))));
  for (std::int64_t cand = std::max<std::int64_t>(0, r - 1); cand <= r + 1; ++cand) {
    __int128 p = 1;
    bool over = false;
    for (std::int64_t i = 0; i < k; ++i) {
      p *= cand;
      if (p > v) {
        over = true;
        break;
      }
    }
    if (!over && p == v) return cand;
  }
  return -1;
}

}  // namespace

Expr add(std::vector<Expr> terms) {
  Rational constant(0);
  std::map<Expr, Rational, ExprLess> collected;
  std::vector<Expr> stack = std::move(terms);
  std::vector<Expr> flat;
  while (!stack.empty()) {
    Expr t = std::move(stack.back());
    stack.pop_back();
    if (t.op() == Op::Add) {
      for (const auto& a : t.args()) stack.push_back(a);
    } else {
      flat.push_back(std::move(t));
    }
  }
  for (const auto& t : flat) {
    if (t.is_const()) {
      constant += t.value();
      continue;
    }
    auto [coef, base] = split_coefficient(t);
    auto it = collected.find(base);
    if (it == collected.end()) {
      collected.emplace(base, coef);
    } else {
      it->second += coef;
    }
  }
  std::vector<Expr> out;
  for (const auto& [base, coef] : collected) {
    if (coef.is_zero()) continue;
    out.push_back(scale_term(base, coef));
  }
  if (!constant.is_zero()) out.push_back(ExprFactory::constant(constant));
  if (out.empty()) return Expr(0);
  if (out.size() == 1) return out.front();
  return ExprFactory::nary(Op::Add, std::move(out));
}

Expr mul(std::vector<Expr> factors) {
  Rational coef(1);
  std::map<Expr, Rational, ExprLess> powers;
  std::vector<Expr> stack = std::move(factors);
  while (!stack.empty()) {
    Expr f = std::move(stack.back());
    stack.pop_back();
    if (f.op() == Op::Mul) {
      for (const auto& a : f.args()) stack.push_back(a);
      continue;
    }
    if (f.is_const()) {
      coef *= f.value();
      continue;
    }
    auto [base, e] = split_power(f);
    auto it = powers.find(base);
    if (it == powers.end()) {
      powers.emplace(base, e);
    } else {
      it->second += e;
    }
  }
  if (coef.is_zero()) return Expr(0);

  std::vector<Expr> out;
  bool needs_refold = false;
  for (const auto& [base, e] : powers) {
    if (e.is_zero()) continue;
    Expr f = pow(base, e);
    if (f.is_const() || f.op() == Op::Mul) needs_refold = true;
    out.push_back(std::move(f));
  }
  if (needs_refold) {
    out.push_back(ExprFactory::constant(coef));
    return mul(std::move(out));
  }
  std::sort(out.begin(), out.end(), ExprLess{});
  if (out.empty()) return ExprFactory::constant(coef);
  if (out.size() == 1) {
    if (coef.is_one()) return out.front();
    if (out.front().op() == Op::Add) {
      std::vector<Expr> scaled;
      for (const auto& t : out.front().args()) scaled.push_back(mul({ExprFactory::constant(coef), t}));
      return add(std::move(scaled));
    }
  }
  if (!coef.is_one()) out.insert(out.begin(), ExprFactory::constant(coef));
  return ExprFactory::nary(Op::Mul, std::move(out));
}

Expr pow(const Expr& base, const Rational& e) {
  if (e.is_zero()) return Expr(1);
  if (e.is_one()) return base;
  if (base.is_const()) {
    const Rational& v = base.value();
    if (e.is_integer()) return Expr(v.pow(e.num()));
    if (v.is_zero()) {
      if (e.is_negative()) throw std::domain_error("zero raised to a negative power");
      return Expr(0);
    }
    if (v.is_one()) return Expr(1);
    if (!v.is_negative()) {
      std::int64_t rn = exact_root(v.num(), e.den());
      std::int64_t rd = exact_root(v.den(), e.den());
      if (rn >= 0 && rd >= 0) return Expr(Rational(rn, rd).pow(e.num()));
    }
    return ExprFactory::power(base, e);
  }
  if (base.op() == Op::Pow && e.is_integer()) return pow(base.arg(0), base.exponent() * e);
  if (base.op() == Op::Mul && e.is_integer()) {
    std::vector<Expr> fs;
    for (const auto& f : base.args()) fs.push_back(pow(f, e));
    return mul(std::move(fs));
  }
  return ExprFactory::power(base, e);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (!exponent.is_const()) throw std::invalid_argument("exponent must be a rational constant: " + to_string(exponent));
  return pow(base, exponent.value());
}

Expr sin(const Expr& a) {
  if (a.is_zero_constant()) return Expr(0);
  return ExprFactory::function(Op::Sin, a);
}

Expr cos(const Expr& a) {
  if (a.is_zero_constant()) return Expr(1);
  return ExprFactory::function(Op::Cos, a);
}

Expr exp(const Expr& a) {
  if (a.is_zero_constant()) return Expr(1);
  return ExprFactory::function(Op::Exp, a);
}

Expr log(const Expr& a) {
  if (a.is_one_constant()) return Expr(0);
  if (a.is_const() && !(a.value() > Rational(0))) throw std::domain_error("log of nonpositive constant");
  return ExprFactory::function(Op::Log, a);
}

Expr sqrt(const Expr& a) { return pow(a, Rational(1, 2)); }

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, Rational(-1))}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }

Expr diff(const Expr& e, Coord c) {
  if (c.indexed() && c.index < 1) throw std::invalid_argument("unknown coordinate index in diff");
  switch (e.op()) {
    case Op::Const:
    case Op::Param: return Expr(0);
    case Op::Var: return e.coord() == c ? Expr(1) : Expr(0);
    case Op::Add: {
      std::vector<Expr> terms;
      for (const auto& a : e.args()) terms.push_back(diff(a, c));
      return add(std::move(terms));
    }
    case Op::Mul: {
      auto args = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < args.size(); ++i) {
        Expr d = diff(args[i], c);
        if (d.is_zero_constant()) continue;
        std::vector<Expr> fs;
        for (std::size_t j = 0; j < args.size(); ++j) fs.push_back(j == i ? d : args[j]);
        terms.push_back(mul(std::move(fs)));
      }
      return add(std::move(terms));
    }
    case Op::Pow: {
      Expr d = diff(e.arg(0), c);
      if (d.is_zero_constant()) return Expr(0);
      return mul({Expr(e.exponent()), pow(e.arg(0), e.exponent() - Rational(1)), d});
    }
    case Op::Sin: {
      Expr d = diff(e.arg(0), c);
      return d.is_zero_constant() ? Expr(0) : mul({cos(e.arg(0)), d});
    }
    case Op::Cos: {
      Expr d = diff(e.arg(0), c);
      return d.is_zero_constant() ? Expr(0) : mul({Expr(-1), sin(e.arg(0)), d});
    }
    case Op::Exp: {
      Expr d = diff(e.arg(0), c);
      return d.is_zero_constant() ? Expr(0) : mul({e, d});
    }
    case Op::Log: {
      Expr d = diff(e.arg(0), c);
      return d.is_zero_constant() ? Expr(0) : mul({pow(e.arg(0), Rational(-1)), d});
    }
  }
  return Expr(0);
}

Expr diff(const Expr& e, Coord c, int n) {
  c.check(n);
  return diff(e, c);
}

namespace {

Expr rebuild(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& leaf) {
  switch (e.op()) {
    case Op::Const: return e;
    case Op::Var:
    case Op::Param: {
      auto r = leaf(e);
      return r ? *r : e;
    }
    case Op::Add: {
      std::vector<Expr> ts;
      for (const auto& a : e.args()) ts.push_back(rebuild(a, leaf));
      return add(std::move(ts));
    }
    case Op::Mul: {
      std::vector<Expr> fs;
      for (const auto& a : e.args()) fs.push_back(rebuild(a, leaf));
      return mul(std::move(fs));
    }
    case Op::Pow: return pow(rebuild(e.arg(0), leaf), e.exponent());
    case Op::Sin: return sin(rebuild(e.arg(0), leaf));
    case Op::Cos: return cos(rebuild(e.arg(0), leaf));
    case Op::Exp: return exp(rebuild(e.arg(0), leaf));
    case Op::Log: return log(rebuild(e.arg(0), leaf));
  }
  return e;
}

void collect(const Expr& e, std::set<Coord>* coords, std::set<std::string>* params) {
  switch (e.op()) {
    case Op::Var:
      if (coords) coords->insert(e.coord());
      return;
    case Op::Param:
      if (params) params->insert(e.name());
      return;
    case Op::Const: return;
    default:
      for (const auto& a : e.args()) collect(a, coords, params);
  }
}

}  // namespace

Expr simplify(const Expr& e) {
  return rebuild(e, [](const Expr&) -> std::optional<Expr> { return std::nullopt; });
}

namespace {

std::vector<Expr> summands(const Expr& e) {
  if (e.op() == Op::Add) return {e.args().begin(), e.args().end()};
  return {e};
}

Expr expand_product(const std::vector<Expr>& factors) {
  std::vector<Expr> acc{Expr(1)};
  for (const auto& f : factors) {
    std::vector<Expr> next;
    for (const auto& a : acc)
      for (const auto& b : summands(f)) next.push_back(mul({a, b}));
    acc = summands(add(std::move(next)));
  }
  return add(std::move(acc));
}

}  // namespace

Expr expand(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Var:
    case Op::Param: return e;
    case Op::Add: {
      std::vector<Expr> ts;
      for (const auto& a : e.args()) ts.push_back(expand(a));
      return add(std::move(ts));
    }
    case Op::Mul: {
      std::vector<Expr> fs;
      for (const auto& a : e.args()) fs.push_back(expand(a));
      return expand_product(fs);
    }
    case Op::Pow: {
      Expr base = expand(e.arg(0));
      const Rational& k = e.exponent();
      if (base.op() == Op::Add && k.is_integer() && k.num() > 1 && k.num() <= 8)
        return expand_product(std::vector<Expr>(static_cast<std::size_t>(k.num()), base));
      return pow(base, k);
    }
    case Op::Sin: return sin(expand(e.arg(0)));
    case Op::Cos: return cos(expand(e.arg(0)));
    case Op::Exp: return exp(expand(e.arg(0)));
    case Op::Log: return log(expand(e.arg(0)));
  }
  return e;
}

Expr substitute(const Expr& e, const std::map<Coord, Expr>& replacements) {
  if (replacements.empty()) return e;
  return rebuild(e, [&](const Expr& leaf) -> std::optional<Expr> {
    if (leaf.op() != Op::Var) return std::nullopt;
    auto it = replacements.find(leaf.coord());
    if (it == replacements.end()) return std::nullopt;
    return it->second;
  });
}

Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& replacements) {
  if (replacements.empty()) return e;
  return rebuild(e, [&](const Expr& leaf) -> std::optional<Expr> {
    if (leaf.op() != Op::Param) return std::nullopt;
    auto it = replacements.find(leaf.name());
    if (it == replacements.end()) return std::nullopt;
    return it->second;
  });
}

std::set<Coord> coords_of(const Expr& e) {
  std::set<Coord> out;
  collect(e, &out, nullptr);
  return out;
}

std::set<std::string> params_of(const Expr& e) {
  std::set<std::string> out;
  collect(e, nullptr, &out);
  return out;
}

bool depends_on(const Expr& e, Coord c) {
  if (e.op() == Op::Var) return e.coord() == c;
  for (const auto& a : e.args())
    if (depends_on(a, c)) return true;
  return false;
}

bool has_negative_lead(const Expr& e) {
  switch (e.op()) {
    case Op::Const: return e.value().is_negative();
    case Op::Mul: return e.arg(0).is_const() && e.arg(0).value().is_negative();
    case Op::Add: return has_negative_lead(e.arg(0));
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecPow = 4;

std::string render(const Expr& e, int parent);

std::string render_const(const Rational& v, int parent) {
  std::string s = v.str();
  bool compound = v.is_negative() || !v.is_integer();
  if (compound && parent >= kPrecMul) return "(" + s + ")";
  return s;
}

std::string render_exponent(const Rational& r) {
  if (r.is_integer() && !r.is_negative()) return r.str();
  return "(" + r.str() + ")";
}

// Product with a non-negative coefficient; `factors` exclude the coefficient.
std::string render_product(const Rational& coef, std::span<const Expr> factors) {
  std::vector<std::string> num;
  std::vector<std::string> den;
  for (const auto& f : factors) {
    if (f.op() == Op::Pow && f.exponent().is_negative()) {
      Expr inv = pow(f.arg(0), -f.exponent());
      den.push_back(render(inv, kPrecPow));
    } else {
      num.push_back(render(f, kPrecMul + 1));
    }
  }
  std::string out;
  if (!coef.is_one()) {
    out = coef.str();
  }
  for (const auto& s : num) {
    if (!out.empty()) out += "*";
    out += s;
  }
  if (out.empty()) out = "1";
  for (const auto& s : den) out += "/" + s;
  return out;
}

std::string render_unsigned_term(const Expr& term) {
  // term has a negative lead; render its negation.
  if (term.is_const()) return (-term.value()).str();
  auto args = term.args();
  return render_product(-args[0].value(), args.subspan(1));
}

std::string render(const Expr& e, int parent) {
  switch (e.op()) {
    case Op::Const: return render_const(e.value(), parent);
    case Op::Var: return e.coord().name();
    case Op::Param: return e.name();
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Log: return std::string(function_name(e.op())) + "(" + render(e.arg(0), 0) + ")";
    case Op::Pow: {
      if (e.exponent().is_negative()) {
        std::string s = render_product(Rational(1), std::span<const Expr>(&e, 1));
        return parent >= kPrecMul ? "(" + s + ")" : s;
      }
      std::string s = render(e.arg(0), kPrecPow + 1) + "^" + render_exponent(e.exponent());
      return parent > kPrecPow ? "(" + s + ")" : s;
    }
    case Op::Mul: {
      std::string s;
      auto args = e.args();
      if (args[0].is_const()) {
        Rational c = args[0].value();
        if (c.is_negative()) {
          s = "-" + render_product(-c, args.subspan(1));
          return parent >= kPrecAdd ? "(" + s + ")" : s;
        }
        s = render_product(c, args.subspan(1));
      } else {
        s = render_product(Rational(1), args);
      }
      return parent > kPrecMul ? "(" + s + ")" : s;
    }
    case Op::Add: {
      std::string s;
      bool first = true;
      for (const auto& t : e.args()) {
        bool neg = has_negative_lead(t);
        if (first) {
          s = neg ? "-" + render_unsigned_term(t) : render(t, kPrecAdd);
        } else {
          s += neg ? " - " + render_unsigned_term(t) : " + " + render(t, kPrecAdd);
        }
        first = false;
      }
      return parent >= kPrecAdd ? "(" + s + ")" : s;
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return render(e, 0); }

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

// ---------------------------------------------------------------------------
// Evaluation

Point::Point(int n) : n_(n), values_(static_cast<std::size_t>(mixed_dim(n)), std::numeric_limits<double>::quiet_NaN()) {}

void Point::set(Coord c, double v) {
  values_.at(static_cast<std::size_t>(mixed_index(c, n_))) = v;
}

double Point::get(Coord c) const {
  if (c.indexed() && (c.index < 1 || c.index > n_))
    throw EvalError(EvalError::Kind::Unbound, c.name(), "unknown coordinate " + c.name());
  return values_[static_cast<std::size_t>(mixed_index(c, n_))];
}

namespace {

[[noreturn]] void domain_error(const Expr& e, const std::string& what) {
  std::string sub = to_string(e);
  throw EvalError(EvalError::Kind::Domain, sub, what + " in " + sub);
}

double checked(double v, const Expr& e) {
  if (!std::isfinite(v)) domain_error(e, "non-finite value");
  return v;
}

}  // namespace

double eval(const Expr& e, const Point& point) {
  switch (e.op()) {
    case Op::Const: return e.value().to_double();
    case Op::Var: {
      double v = point.get(e.coord());
      if (std::isnan(v))
        throw EvalError(EvalError::Kind::Unbound, e.coord().name(), "unbound coordinate " + e.coord().name());
      return v;
    }
    case Op::Param: {
      auto it = point.params().find(e.name());
      if (it == point.params().end())
        throw EvalError(EvalError::Kind::Unbound, e.name(), "unbound parameter " + e.name());
      return it->second;
    }
    case Op::Add: {
      double s = 0.0;
      for (const auto& a : e.args()) s += eval(a, point);
      return s;
    }
    case Op::Mul: {
      double s = 1.0;
      for (const auto& a : e.args()) s *= eval(a, point);
      return s;
    }
    case Op::Pow: {
      double b = eval(e.arg(0), point);
      const Rational& r = e.exponent();
      if (r.is_integer()) {
        if (b == 0.0 && r.is_negative()) domain_error(e, "division by zero");
        return checked(std::pow(b, static_cast<double>(r.num())), e);
      }
      if (b < 0.0) domain_error(e, "fractional power of negative value");
      if (b == 0.0 && r.is_negative()) domain_error(e, "division by zero");
      return checked(std::pow(b, r.to_double()), e);
    }
    case Op::Sin: return std::sin(eval(e.arg(0), point));
    case Op::Cos: return std::cos(eval(e.arg(0), point));
    case Op::Exp: return checked(std::exp(eval(e.arg(0), point)), e);
    case Op::Log: {
      double a = eval(e.arg(0), point);
      if (a <= 0.0) domain_error(e, "log of nonpositive value");
      return std::log(a);
    }
  }
  return 0.0;
}

double eval_scale(const Expr& e, const Point& point) {
  if (e.op() != Op::Add) return std::abs(eval(e, point));
  double m = 0.0;
  for (const auto& a : e.args()) m = std::max(m, std::abs(eval(a, point)));
  return m;
}

bool is_zero(const Expr& e, int trials, std::uint64_t seed) {
  ZeroTestOptions o;
  o.trials = trials;
  o.seed = seed;
  return is_zero(e, o);
}

bool is_zero(const Expr& e, const ZeroTestOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("is_zero needs at least one trial");
  Expr s = simplify(e);
  if (s.is_const()) return s.is_zero_constant();

  auto coords = coords_of(s);
  auto params = params_of(s);
  int n = 1;
  for (const auto& c : coords) n = std::max(n, c.index);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-options.box, options.box);
  int successes = 0;
  for (int trial = 0; trial < options.trials; ++trial) {
    for (int attempt = 0; attempt < options.max_retries; ++attempt) {
      Point p(n);
      for (const auto& c : coords) p.set(c, dist(rng));
      for (const auto& name : params) {
        auto fixed = options.fixed_params.find(name);
        p.set_param(name, fixed != options.fixed_params.end() ? fixed->second : dist(rng));
      }
      double v = 0.0;
      double scale = 0.0;
      try {
        v = eval(s, p);
        scale = eval_scale(s, p);
      } catch (const EvalError& err) {
        if (err.kind() == EvalError::Kind::Unbound) throw;
        continue;
      }
      if (std::abs(v) > options.tolerance * std::max(1.0, scale)) return false;
      ++successes;
      break;
    }
  }
  return successes > 0;
}

}  // namespace srusk
