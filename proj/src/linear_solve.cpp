#include "srusk/linear_solve.hpp"

#include <Eigen/Dense>

#include "srusk/forms.hpp"

namespace srusk {

namespace {

Expr clean(const Expr& e, const ConstraintSet& level) {
  if (e.is_zero_constant()) return e;
  Expr r = expand(level.reduce(e));
  if (r.is_const()) return r;
  return level.vanishes(r) ? Expr(0) : r;
}

void check_rank(const LinearSystem& sys, const ConstraintSet& level, std::size_t pivots) {
  if (sys.a.empty() || sys.a[0].empty()) return;
  const auto m = static_cast<Eigen::Index>(sys.a.size());
  const auto n = static_cast<Eigen::Index>(sys.a[0].size());
  std::vector<std::vector<Expr>> reduced(sys.a.size());
  for (std::size_t i = 0; i < sys.a.size(); ++i)
    for (const Expr& e : sys.a[i]) reduced[i].push_back(level.reduce(e));
  for (const Point& w : level.witnesses()) {
    Eigen::MatrixXd a(m, n);
    try {
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          a(i, j) = eval(reduced[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], w);
    } catch (const EvalError&) {
      continue;
    }
    int r = numeric_rank(a, 1e-9, 1e-12);
    if (r != static_cast<int>(pivots))
      throw VariableRankError("coefficient rank " + std::to_string(r) + " at a witness point differs from generic rank " +
                              std::to_string(pivots) + "; constant-rank hypothesis violated");
  }
}

}  // namespace

Reduction reduce_on_level(const LinearSystem& system, const ConstraintSet& level) {
  Reduction red;
  const std::size_t m = system.a.size();
  red.unknowns = m ? system.a[0].size() : 0;
  const std::size_t n = red.unknowns;
  std::vector<std::vector<Expr>> a(m);
  std::vector<Expr> b(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (const Expr& e : system.a[i]) a[i].push_back(clean(e, level));
    b[i] = clean(system.b[i], level);
  }

  std::vector<bool> row_used(m, false);
  std::vector<bool> col_used(n, false);
  std::vector<std::size_t> pivot_rows;
  while (true) {
    std::ptrdiff_t br = -1;
    std::ptrdiff_t bc = -1;
    bool best_const = false;
    double best_mag = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (col_used[j] || a[i][j].is_zero_constant()) continue;
        bool is_const = a[i][j].is_const();
        double mag = is_const ? std::abs(a[i][j].value().to_double()) : level.min_abs(a[i][j]);
        // Strict comparisons keep the lowest row, then column, on ties.
        if (br < 0 || (is_const && !best_const) || (is_const == best_const && mag > best_mag)) {
          br = static_cast<std::ptrdiff_t>(i);
          bc = static_cast<std::ptrdiff_t>(j);
          best_const = is_const;
          best_mag = mag;
        }
      }
    }
    if (br < 0) break;
    auto r = static_cast<std::size_t>(br);
    auto c = static_cast<std::size_t>(bc);

    Expr inv = pow(a[r][c], Rational(-1));
    for (std::size_t j = 0; j < n; ++j)
      if (j != c && !a[r][j].is_zero_constant()) a[r][j] = clean(a[r][j] * inv, level);
    a[r][c] = Expr(1);
    b[r] = clean(b[r] * inv, level);

    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || a[i][c].is_zero_constant()) continue;
      Expr f = a[i][c];
      for (std::size_t j = 0; j < n; ++j)
        if (j != c && !a[r][j].is_zero_constant()) a[i][j] = clean(a[i][j] - f * a[r][j], level);
      a[i][c] = Expr(0);
      if (!b[r].is_zero_constant()) b[i] = clean(b[i] - f * b[r], level);
    }
    row_used[r] = true;
    col_used[c] = true;
    pivot_rows.push_back(r);
    red.pivot_cols.push_back(static_cast<int>(c));
  }

  for (std::size_t r : pivot_rows) {
    red.rows.push_back(a[r]);
    red.rhs.push_back(b[r]);
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!col_used[j]) red.free_cols.push_back(static_cast<int>(j));
  for (std::size_t i = 0; i < m; ++i)
    if (!row_used[i] && !b[i].is_zero_constant()) red.residuals.push_back(b[i]);

  check_rank(system, level, red.pivot_cols.size());
  return red;
}

std::vector<Expr> Reduction::solution(const std::vector<Expr>& free_values) const {
  if (free_values.size() != free_cols.size()) throw std::invalid_argument("wrong number of free values");
  std::vector<Expr> x(unknowns);
  for (std::size_t k = 0; k < free_cols.size(); ++k) x[static_cast<std::size_t>(free_cols[k])] = free_values[k];
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    std::vector<Expr> terms{rhs[i]};
    for (int f : free_cols) {
      const Expr& coef = rows[i][static_cast<std::size_t>(f)];
      if (!coef.is_zero_constant()) terms.push_back(-(coef * x[static_cast<std::size_t>(f)]));
    }
    x[static_cast<std::size_t>(pivot_cols[i])] = add(std::move(terms));
  }
  return x;
}

}  // namespace srusk
