#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "srusk/constraint_set.hpp"
#include "srusk/expr.hpp"

namespace srusk {

// Rows of A x = b over the expression field.
struct LinearSystem {
  std::vector<std::vector<Expr>> a;
  std::vector<Expr> b;
  std::vector<std::string> row_labels;  // optional, for diagnostics
};

class VariableRankError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Reduction {
  std::size_t unknowns = 0;
  // Gauss-Jordan form: pivot row i has a 1 in column pivot_cols[i] and zeros in
  // every other pivot column.
  std::vector<int> pivot_cols;
  std::vector<std::vector<Expr>> rows;
  std::vector<Expr> rhs;
  std::vector<int> free_cols;
  // Right-hand sides of rows whose coefficients vanish on the level; each must
  // itself vanish for the system to be solvable.
  std::vector<Expr> residuals;

  // Solution with the free unknowns set to the given expressions.
  std::vector<Expr> solution(const std::vector<Expr>& free_values) const;
};

// Symbolic Gauss-Jordan where "zero" means "vanishes on the level". Pivots:
// constant entries first, then the largest minimum magnitude over the level's
// witnesses, ties to the lowest row then column. Throws VariableRankError when
// the numeric rank of A differs between witnesses or from the symbolic rank.
Reduction reduce_on_level(const LinearSystem& system, const ConstraintSet& level);

}  // namespace srusk
