#include "srusk/constraint_set.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "srusk/forms.hpp"

namespace srusk {

namespace {

constexpr CoordKind kSolvePreference[] = {CoordKind::Momentum, CoordKind::Velocity, CoordKind::Tau, CoordKind::Position,
                                          CoordKind::Time};

constexpr double kWitnessTol = 1e-12;

}  // namespace

std::optional<std::pair<Coord, Expr>> solve_for_coordinate(const Expr& constraint, const Chart& chart,
                                                           const std::map<Coord, Expr>& already_solved) {
  for (CoordKind kind : kSolvePreference) {
    for (const Coord& c : chart.coords()) {
      if (c.kind != kind || already_solved.count(c) || !depends_on(constraint, c)) continue;
      Expr k = diff(constraint, c);
      if (!k.is_const() || k.is_zero_constant()) continue;
      Expr sol = expand(var(c) - constraint / k);
      if (depends_on(sol, c)) continue;
      return std::make_pair(c, sol);
    }
  }
  return std::nullopt;
}

Expr normalize_constraint(const Expr& c, const Chart& chart, const std::map<Coord, Expr>& already_solved) {
  if (auto sol = solve_for_coordinate(c, chart, already_solved)) {
    Expr k = diff(c, sol->first);
    return k.value().is_negative() ? expand(-c) : c;
  }
  return has_negative_lead(c) ? expand(-c) : c;
}

ConstraintSet::ConstraintSet(Chart chart, Point base, ConstraintSetOptions options)
    : chart_(std::move(chart)), base_(std::move(base)), options_(options) {
  regenerate(options_.seed);
}

Expr ConstraintSet::reduce(const Expr& e) const { return substitute(e, solved_); }

bool ConstraintSet::vanishes(const Expr& e) const {
  Expr r = expand(reduce(e));
  if (r.is_zero_constant()) return true;
  if (r.is_const()) return false;
  int evaluated = 0;
  for (const Point& w : witnesses_) {
    try {
      double v = eval(r, w);
      double scale = std::max(1.0, eval_scale(r, w));
      if (std::abs(v) > options_.tolerance * scale) return false;
      ++evaluated;
    } catch (const EvalError&) {
    }
  }
  return evaluated > 0;
}

double ConstraintSet::max_abs(const Expr& e) const {
  double m = 0.0;
  for (const Point& w : witnesses_) {
    try {
      m = std::max(m, std::abs(eval(e, w)));
    } catch (const EvalError&) {
    }
  }
  return m;
}

double ConstraintSet::min_abs(const Expr& e) const {
  double m = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Point& w : witnesses_) {
    try {
      m = std::min(m, std::abs(eval(e, w)));
      any = true;
    } catch (const EvalError&) {
    }
  }
  return any ? m : 0.0;
}

void ConstraintSet::try_solve(const Expr& c) {
  Expr r = expand(reduce(c));
  if (r.is_zero_constant()) return;
  auto sol = solve_for_coordinate(r, chart_, solved_);
  if (!sol) {
    unsolved_.push_back(r);
    return;
  }
  std::map<Coord, Expr> one{{sol->first, sol->second}};
  for (auto& [k, v] : solved_) v = expand(substitute(v, one));
  solved_.insert(*sol);
  // Earlier unsolved constraints may have become solvable.
  std::vector<Expr> pending;
  pending.swap(unsolved_);
  for (const Expr& u : pending) try_solve(u);
}

std::vector<Expr> ConstraintSet::add(const std::vector<Expr>& candidates, std::uint64_t witness_seed) {
  std::vector<Expr> accepted;
  for (const Expr& cand : candidates) {
    Expr c = normalize_constraint(expand(reduce(cand)), chart_, solved_);
    if (c.is_zero_constant() || vanishes(c)) continue;
    constraints_.push_back(c);
    accepted.push_back(c);
    try_solve(c);
    if (!regenerate(witness_seed + accepted.size())) break;
  }
  return accepted;
}

bool ConstraintSet::newton(Point& x, int iterations) const {
  if (unsolved_.empty()) return true;
  std::vector<Coord> vars;
  for (const Coord& c : chart_.coords())
    if (!solved_.count(c)) vars.push_back(c);
  const auto m = static_cast<Eigen::Index>(unsolved_.size());
  const auto n = static_cast<Eigen::Index>(vars.size());
  std::vector<std::vector<Expr>> jac(unsolved_.size());
  for (std::size_t i = 0; i < unsolved_.size(); ++i)
    for (const Coord& v : vars) jac[i].push_back(diff(unsolved_[i], v));

  auto residual_vec = [&](const Point& p) {
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) g(i) = eval(unsolved_[static_cast<std::size_t>(i)], p);
    return g;
  };
  try {
    Eigen::VectorXd g = residual_vec(x);
    for (int it = 0; it < iterations; ++it) {
      if (g.lpNorm<Eigen::Infinity>() <= kWitnessTol * 1e-1) return true;
      Eigen::MatrixXd j(m, n);
      for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < n; ++c) j(r, c) = eval(jac[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], x);
      Eigen::VectorXd dx = j.completeOrthogonalDecomposition().solve(g);
      double alpha = 1.0;
      bool improved = false;
      for (int half = 0; half < 30; ++half, alpha *= 0.5) {
        Point trial = x;
        for (Eigen::Index c = 0; c < n; ++c) {
          Coord v = vars[static_cast<std::size_t>(c)];
          trial.set(v, x.get(v) - alpha * dx(c));
        }
        try {
          Eigen::VectorXd gt = residual_vec(trial);
          if (gt.norm() < g.norm()) {
            x = trial;
            g = gt;
            improved = true;
            break;
          }
        } catch (const EvalError&) {
        }
      }
      if (!improved) break;
    }
    return g.lpNorm<Eigen::Infinity>() <= kWitnessTol;
  } catch (const EvalError&) {
    return false;
  }
}

Point ConstraintSet::project(const Point& x) const {
  Point y = x;
  for (const auto& kv : base_.params()) y.params().try_emplace(kv.first, kv.second);
  if (!newton(y, options_.newton_iterations)) throw std::runtime_error("projection onto the constraint set failed");
  for (const auto& [c, e] : solved_) y.set(c, eval(e, y));
  return y;
}

double ConstraintSet::residual(const Point& x) const {
  double m = 0.0;
  for (const Expr& c : constraints_) m = std::max(m, std::abs(eval(c, x)));
  return m;
}

int ConstraintSet::jacobian_rank(const Point& x) const {
  if (constraints_.empty()) return 0;
  Eigen::MatrixXd j(static_cast<Eigen::Index>(constraints_.size()), static_cast<Eigen::Index>(chart_.size()));
  for (std::size_t r = 0; r < constraints_.size(); ++r)
    for (std::size_t c = 0; c < chart_.size(); ++c)
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = eval(diff(constraints_[r], chart_[c]), x);
  return numeric_rank(j, 1e-9, 1e-12);
}

bool ConstraintSet::regenerate(std::uint64_t seed) {
  witnesses_.clear();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-options_.box, options_.box);
  for (int attempt = 0; attempt < options_.max_attempts && static_cast<int>(witnesses_.size()) < options_.witnesses; ++attempt) {
    Point x = base_;
    for (const Coord& c : chart_.coords())
      if (!solved_.count(c)) x.set(c, dist(rng));
    if (!newton(x, options_.newton_iterations)) continue;
    try {
      for (const auto& [c, e] : solved_) x.set(c, eval(e, x));
      bool ok = true;
      for (const Expr& c : constraints_) {
        double scale = std::max(1.0, eval_scale(c, x));
        if (std::abs(eval(c, x)) > 1e-10 * scale) ok = false;
      }
      if (ok) witnesses_.push_back(std::move(x));
    } catch (const EvalError&) {
    }
  }
  empty_ = witnesses_.empty();
  return !empty_;
}

}  // namespace srusk
