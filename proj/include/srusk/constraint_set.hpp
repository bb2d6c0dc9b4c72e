#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srusk/expr.hpp"
#include "srusk/model.hpp"

namespace srusk {

struct ConstraintSetOptions {
  int witnesses = 12;
  std::uint64_t seed = 42;
  double box = 2.0;
  double tolerance = 1e-9;  // relative, for vanishing tests
  int max_attempts = 200;   // random restarts for the whole witness set
  int newton_iterations = 60;
};

// A constraint submanifold of a coordinate patch, represented by its defining
// functions plus a set of numerically found points on it ("witnesses").
//
// Constraints that can be solved for a coordinate with constant coefficient
// are kept as a substitution coord -> expression, always fully reduced: no
// right-hand side mentions a solved coordinate.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(Chart chart, Point base, ConstraintSetOptions options = {});

  const Chart& chart() const { return chart_; }
  const std::vector<Expr>& constraints() const { return constraints_; }
  const std::map<Coord, Expr>& solved() const { return solved_; }
  const std::vector<Point>& witnesses() const { return witnesses_; }
  const ConstraintSetOptions& options() const { return options_; }
  const Point& base() const { return base_; }
  bool empty() const { return empty_; }

  // Substitutes the solved-form constraints.
  Expr reduce(const Expr& e) const;
  // e vanishes on the set: structurally after reduction, or numerically at
  // every witness where it can be evaluated (relative tolerance).
  bool vanishes(const Expr& e) const;
  // Largest |e| over the witnesses (0 if none evaluable).
  double max_abs(const Expr& e) const;
  double min_abs(const Expr& e) const;

  // Appends constraints, re-solves and regenerates witnesses. Candidates that
  // already vanish on the set are skipped; returns the accepted ones.
  // `witness_seed` makes the witness search reproducible per level.
  std::vector<Expr> add(const std::vector<Expr>& candidates, std::uint64_t witness_seed);

  // Finds witness points; false when the search fails (empty set).
  bool regenerate(std::uint64_t seed);

  // Projects a point onto the set: solved coordinates recomputed from the
  // free ones, then Newton on the remaining constraints. Throws on failure.
  Point project(const Point& x) const;

  // Max |constraint| at the point.
  double residual(const Point& x) const;

  // Rank of the constraint Jacobian at a point (w.r.t. the chart coordinates).
  int jacobian_rank(const Point& x) const;

 private:
  void try_solve(const Expr& c);
  bool newton(Point& x, int iterations) const;

  Chart chart_;
  Point base_;
  ConstraintSetOptions options_;
  std::vector<Expr> constraints_;
  std::map<Coord, Expr> solved_;
  std::vector<Expr> unsolved_;  // reduced constraints not in solved form
  std::vector<Point> witnesses_;
  bool empty_ = false;
};

// Preference order for solved-form coordinates: p, qd, tau, q, t.
std::optional<std::pair<Coord, Expr>> solve_for_coordinate(const Expr& constraint, const Chart& chart,
                                                           const std::map<Coord, Expr>& already_solved = {});

// Sign normalization: the solved-form coordinate gets a positive coefficient;
// otherwise the leading term is made positive.
Expr normalize_constraint(const Expr& c, const Chart& chart, const std::map<Coord, Expr>& already_solved = {});

}  // namespace srusk
