#include <gtest/gtest.h>

#include "corpus.hpp"
#include "srusk/linear_solve.hpp"

using namespace srusk;

namespace {

ConstraintSet free_level(int n) {
  ConstraintSet s(Chart::mixed(n), Point(n));
  s.regenerate(1);
  return s;
}

}  // namespace

TEST(LinearSolve, UniqueSolution) {
  LinearSystem sys{{{Expr(2), Expr(1)}, {Expr(1), Expr(3)}}, {Expr(3), Expr(5)}, {}};
  Reduction r = reduce_on_level(sys, free_level(1));
  EXPECT_TRUE(r.free_cols.empty());
  EXPECT_TRUE(r.residuals.empty());
  auto x = r.solution({});
  EXPECT_EQ(x[0], Expr(Rational(4, 5)));
  EXPECT_EQ(x[1], Expr(Rational(7, 5)));
}

TEST(LinearSolve, FreeColumnsAndResiduals) {
  // x + y = q1, 2x + 2y = qd1: rank 1, one free column, residual qd1 - 2 q1.
  LinearSystem sys{{{Expr(1), Expr(1)}, {Expr(2), Expr(2)}}, {q_(1), qd_(1)}, {}};
  Reduction r = reduce_on_level(sys, free_level(1));
  EXPECT_EQ(r.pivot_cols, std::vector<int>{0});
  EXPECT_EQ(r.free_cols, std::vector<int>{1});
  ASSERT_EQ(r.residuals.size(), 1u);
  // The residual is a nonzero multiple of qd1 - 2 q1.
  Expr on = substitute(r.residuals[0], {{Coord::velocity(1), Expr(2) * q_(1)}});
  EXPECT_TRUE(is_zero(on));
  EXPECT_FALSE(is_zero(r.residuals[0]));
  auto x = r.solution({Expr::param("u")});
  EXPECT_TRUE(is_zero(substitute(x[0] + Expr::param("u") - q_(1), {{Coord::velocity(1), Expr(2) * q_(1)}})));
}

TEST(LinearSolve, SymbolicPivotVanishingOnLevel) {
  // The coefficient qd1 vanishes on {qd1 = 0}: the column becomes free there.
  SystemSpec s = corpus::load_model("singular2");
  ConstraintSet level(Chart::mixed(2), s.base_point());
  level.add({qd_(1)}, 2);
  LinearSystem sys{{{qd_(1), Expr(0)}, {Expr(0), Expr(1)}}, {Expr(0), q_(1)}, {}};
  Reduction r = reduce_on_level(sys, level);
  EXPECT_EQ(r.free_cols, std::vector<int>{0});
  EXPECT_EQ(r.solution({Expr(7)})[1], q_(1));
}

TEST(LinearSolve, VariableRankDetected) {
  // On {q1 qd1 = 0} the coefficient q1 vanishes on one branch only, so the
  // rank differs between witnesses.
  SystemSpec s = corpus::load_model("oscillator");
  ConstraintSet level(Chart::mixed(1), s.base_point());
  level.add({q_(1) * qd_(1)}, 8);
  ASSERT_FALSE(level.empty());
  LinearSystem sys{{{q_(1)}}, {Expr(1)}, {}};
  EXPECT_THROW(reduce_on_level(sys, level), VariableRankError);
}
