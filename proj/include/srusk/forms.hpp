#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "srusk/expr.hpp"
#include "srusk/model.hpp"

namespace srusk {

// 1-form sum_i coeffs[i] dx^i over the coordinates of `chart`.
struct OneFormField {
  Chart chart;
  std::vector<Expr> coeffs;

  static OneFormField zero(const Chart& chart);
  const Expr& at(Coord c) const;
  std::size_t dim() const { return coeffs.size(); }
};

// Antisymmetric coefficient matrix: the form is sum_{i<j} coeffs[i][j] dx^i ^ dx^j,
// so (dx^a ^ dx^b) has +1 at [a][b] and -1 at [b][a].
struct TwoFormField {
  Chart chart;
  std::vector<std::vector<Expr>> coeffs;

  static TwoFormField zero(const Chart& chart);
  const Expr& at(Coord a, Coord b) const;
  // this += c * (dx^a ^ dx^b)
  void add_wedge(Coord a, Coord b, const Expr& c);
  std::size_t dim() const { return coeffs.size(); }
};

TwoFormField operator+(const TwoFormField& a, const TwoFormField& b);
TwoFormField operator-(const TwoFormField& a, const TwoFormField& b);
TwoFormField operator*(const Expr& s, const TwoFormField& a);

struct HamiltonianFn {
  Expr h;                      // p_A qd^A + tau - L
  std::vector<Expr> dh_dqd;    // p_A - dL/dqd^A
  Expr dh_dtau;                // 1
};

// dt on any chart containing t.
OneFormField build_eta(const Chart& chart);
// dq^A ^ dp_A + dt ^ dtau on the mixed chart; `sign` = -1 builds the corrupted
// control form used by the negative verification test.
TwoFormField build_omega(int n, int sign = 1);
HamiltonianFn build_hamiltonian(const SystemSpec& spec);
// omega + dH ^ eta.
TwoFormField build_omega_H(const SystemSpec& spec, int omega_sign = 1);

struct PoincareCartan {
  OneFormField theta;  // (L - qd.dL/dqd) dt + dL/dqd^A dq^A
  TwoFormField omega;  // -d theta
};
PoincareCartan build_poincare_cartan(const SystemSpec& spec);

OneFormField differential(const Expr& f, const Chart& chart);
TwoFormField wedge(const OneFormField& a, const OneFormField& b);
TwoFormField exterior_derivative(const OneFormField& theta);

// Pullback along x = phi(y): `embedding` gives each coordinate of the source
// chart as an expression in the target chart; coordinates absent from the map
// are taken as the identically named target coordinate.
TwoFormField pullback(const TwoFormField& form, const Chart& target, const std::map<Coord, Expr>& embedding);
OneFormField pullback(const OneFormField& form, const Chart& target, const std::map<Coord, Expr>& embedding);

// pr_2^* omega_L on the mixed chart (tau and p rows vanish).
TwoFormField pullback_omega_L(const SystemSpec& spec);

TwoFormField substitute(const TwoFormField& form, const std::map<Coord, Expr>& replacements);

// Interior products with a vector given by its components in the form's chart.
std::vector<Expr> interior(const std::vector<Expr>& v, const TwoFormField& form);
Expr interior(const std::vector<Expr>& v, const OneFormField& form);

Eigen::MatrixXd evaluate(const TwoFormField& form, const Point& point);
Eigen::VectorXd evaluate(const OneFormField& form, const Point& point);

// Singular values below max(rel_tol * sigma_max, abs_tol) count as zero.
int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9, double abs_tol = 0.0);
int rank_at(const TwoFormField& form, const Point& point);

bool is_antisymmetric(const TwoFormField& form, const ZeroTestOptions& options = {});

// Sparse exterior form on a chart of dimension <= 64: basis monomials are
// bitmasks, dx^{i1} ^ ... ^ dx^{ik} with i1 < ... < ik.
class KForm {
 public:
  KForm(int dim, int degree) : dim_(dim), degree_(degree) {}
  static KForm scalar(int dim, const Expr& value);
  static KForm from(const OneFormField& form);
  static KForm from(const TwoFormField& form);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<std::uint64_t, Expr>& terms() const { return terms_; }
  // Coefficient of the monomial with the given (ascending) coordinate indices.
  Expr coefficient(const std::vector<int>& indices) const;

  KForm wedge(const KForm& other) const;
  KForm power(int k) const;

  // True if every coefficient passes is_zero.
  bool vanishes(const ZeroTestOptions& options = {}) const;

 private:
  void accumulate(std::uint64_t mask, const Expr& c);

  int dim_;
  int degree_;
  std::map<std::uint64_t, Expr> terms_;
};

}  // namespace srusk
