#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srusk/coord.hpp"
#include "srusk/rational.hpp"

namespace srusk {

// Node kinds, listed in canonical sort order.
enum class Op { Const, Var, Param, Sin, Cos, Exp, Log, Pow, Mul, Add };

struct ExprNode;

// Immutable expression over the phase-space coordinates and named parameters.
//
// Every Expr is built through canonicalizing constructors: sums and products
// are flattened, constants folded, like terms collected and arguments sorted.
// Two expressions that compare equal structurally are the same canonical tree.
class Expr {
 public:
  Expr();  // the constant 0
  Expr(Rational value);  // NOLINT(implicit)
  Expr(std::int64_t value) : Expr(Rational(value)) {}  // NOLINT(implicit)
  Expr(int value) : Expr(Rational(value)) {}  // NOLINT(implicit)

  static Expr var(Coord c);
  static Expr param(std::string name);

  Op op() const;
  bool is_const() const { return op() == Op::Const; }
  bool is_zero_constant() const;
  bool is_one_constant() const;

  const Rational& value() const;    // Const
  const Coord& coord() const;       // Var
  const std::string& name() const;  // Param
  const Rational& exponent() const; // Pow
  std::span<const Expr> args() const;
  const Expr& arg(std::size_t i) const { return args()[i]; }

  std::size_t hash() const;
  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator<(const Expr& a, const Expr& b);
  friend int compare(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  friend struct ExprFactory;

  std::shared_ptr<const ExprNode> node_;
};

// Total structural order; 0 iff structurally equal.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
// Exponent must simplify to a rational constant.
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr& operator+=(Expr& a, const Expr& b);

// Exact partial derivative; coordinates are independent symbols.
Expr diff(const Expr& e, Coord c);
// Same, rejecting coordinates outside the declared fibre dimension.
Expr diff(const Expr& e, Coord c, int n);

// Re-canonicalizes bottom-up. Idempotent.
Expr simplify(const Expr& e);
// simplify plus distribution of products over sums (small integer powers too).
Expr expand(const Expr& e);

Expr substitute(const Expr& e, const std::map<Coord, Expr>& replacements);
Expr substitute_params(const Expr& e, const std::map<std::string, Expr>& replacements);

std::set<Coord> coords_of(const Expr& e);
std::set<std::string> params_of(const Expr& e);
bool depends_on(const Expr& e, Coord c);

// Leading sign of the canonical form: negative when the first term carries a
// negative coefficient. Used to normalize constraint functions.
bool has_negative_lead(const Expr& e);

// Renders in the model-file expression syntax (parseable back to the same tree).
std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// Values for coordinates (fixed mixed-space order, NaN = unbound) and parameters.
class Point {
 public:
  Point() = default;
  explicit Point(int n);

  int n() const { return n_; }
  void set(Coord c, double v);
  double get(Coord c) const;  // NaN when unbound; throws for indices beyond n
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void set_param(const std::string& name, double v) { params_[name] = v; }
  const std::map<std::string, double, std::less<>>& params() const { return params_; }
  std::map<std::string, double, std::less<>>& params() { return params_; }

 private:
  int n_ = 0;
  std::vector<double> values_;
  std::map<std::string, double, std::less<>> params_;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { Unbound, Domain };
  EvalError(Kind kind, std::string subexpression, const std::string& message)
      : std::runtime_error(message), kind_(kind), subexpression_(std::move(subexpression)) {}
  Kind kind() const { return kind_; }
  const std::string& subexpression() const { return subexpression_; }

 private:
  Kind kind_;
  std::string subexpression_;
};

double eval(const Expr& e, const Point& point);
// Largest absolute value among the top-level summands (|e| for non-sums);
// the reference magnitude for relative zero tests.
double eval_scale(const Expr& e, const Point& point);

struct ZeroTestOptions {
  int trials = 16;
  std::uint64_t seed = 42;
  double tolerance = 1e-9;
  double box = 2.0;
  int max_retries = 20;  // per trial, on evaluation domain errors
  // Parameters listed here are held fixed instead of sampled.
  std::map<std::string, double> fixed_params;
};

// Probabilistic zero test: structural zero short-circuits, otherwise the
// expression must vanish (relative tolerance) at seeded random points.
bool is_zero(const Expr& e, int trials = 16, std::uint64_t seed = 42);
bool is_zero(const Expr& e, const ZeroTestOptions& options);

inline Expr var(Coord c) { return Expr::var(c); }
inline Expr t_() { return Expr::var(Coord::time()); }
inline Expr tau_() { return Expr::var(Coord::tau()); }
inline Expr q_(int a) { return Expr::var(Coord::position(a)); }
inline Expr qd_(int a) { return Expr::var(Coord::velocity(a)); }
inline Expr p_(int a) { return Expr::var(Coord::momentum(a)); }

}  // namespace srusk

template <>
struct std::hash<srusk::Expr> {
  std::size_t operator()(const srusk::Expr& e) const noexcept { return e.hash(); }
};
