#include <gtest/gtest.h>

#include "corpus.hpp"
#include "srusk/constraint_set.hpp"

using namespace srusk;

TEST(ConstraintSet, SolveForCoordinatePreference) {
  Chart c = Chart::mixed(2);
  auto s = solve_for_coordinate(p_(1) - qd_(1) - q_(2), c);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->first, Coord::momentum(1));
  EXPECT_EQ(s->second, qd_(1) + q_(2));
  auto v = solve_for_coordinate(Expr(2) * qd_(1) - q_(1), c);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->first, Coord::velocity(1));
  EXPECT_EQ(v->second, Expr(Rational(1, 2)) * q_(1));
  // Non-constant coefficient: not solved.
  EXPECT_FALSE(solve_for_coordinate(q_(1) * qd_(1) - Expr(1), Chart::jet(1)));
}

TEST(ConstraintSet, Normalization) {
  Chart c = Chart::mixed(2);
  EXPECT_EQ(normalize_constraint(qd_(1) - p_(1), c), p_(1) - qd_(1));
  EXPECT_EQ(normalize_constraint(-qd_(1), c), qd_(1));
}

TEST(ConstraintSet, WitnessesLieOnTheSet) {
  SystemSpec s = corpus::load_model("singular2");
  ConstraintSet set(Chart::mixed(2), s.base_point());
  auto accepted = set.add({p_(1) - qd_(1) - q_(2), p_(2)}, 3);
  EXPECT_EQ(accepted.size(), 2u);
  EXPECT_FALSE(set.empty());
  EXPECT_EQ(set.witnesses().size(), 12u);
  for (const Point& w : set.witnesses()) EXPECT_LE(set.residual(w), 1e-12);
  EXPECT_TRUE(set.vanishes(p_(1) - qd_(1) - q_(2)));
  EXPECT_TRUE(set.vanishes(p_(2) * sin(q_(1))));
  EXPECT_FALSE(set.vanishes(qd_(1)));
  EXPECT_EQ(set.reduce(p_(1)), qd_(1) + q_(2));
  EXPECT_EQ(set.jacobian_rank(set.witnesses()[0]), 2);
  // Redundant candidate is skipped.
  EXPECT_TRUE(set.add({Expr(2) * p_(2)}, 4).empty());
}

TEST(ConstraintSet, NonlinearConstraintByNewton) {
  SystemSpec s = corpus::load_model("oscillator");
  ConstraintSet set(Chart::mixed(1), s.base_point());
  set.add({pow(q_(1), Rational(2)) + pow(qd_(1), Rational(2)) - Expr(1)}, 5);
  ASSERT_FALSE(set.empty());
  for (const Point& w : set.witnesses()) EXPECT_LE(set.residual(w), 1e-12);
  Point x = set.witnesses()[0];
  x.set(Coord::position(1), x.get(Coord::position(1)) + 0.01);
  Point y = set.project(x);
  EXPECT_LE(set.residual(y), 1e-12);
}

TEST(ConstraintSet, EmptySetDetected) {
  SystemSpec s = corpus::load_model("oscillator");
  ConstraintSet set(Chart::mixed(1), s.base_point());
  set.add({pow(q_(1), Rational(2)) + Expr(1)}, 6);
  EXPECT_TRUE(set.empty());
}

TEST(ConstraintSet, SeedDeterminism) {
  SystemSpec s = corpus::load_model("oscillator");
  ConstraintSet a(Chart::mixed(1), s.base_point()), b(Chart::mixed(1), s.base_point());
  a.add({p_(1) - qd_(1)}, 77);
  b.add({p_(1) - qd_(1)}, 77);
  ASSERT_EQ(a.witnesses().size(), b.witnesses().size());
  for (std::size_t i = 0; i < a.witnesses().size(); ++i) EXPECT_EQ(a.witnesses()[i].values(), b.witnesses()[i].values());
}
