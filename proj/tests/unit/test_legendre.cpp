#include <gtest/gtest.h>

#include "corpus.hpp"
#include "srusk/legendre.hpp"

using namespace srusk;

TEST(Legendre, Classification) {
  EXPECT_EQ(hessian_report(corpus::load_model("oscillator")).classification, Regularity::Regular);
  EXPECT_EQ(hessian_report(corpus::load_model("two_dof")).classification, Regularity::Regular);
  RegularityReport s = hessian_report(corpus::load_model("singular2"));
  EXPECT_EQ(s.classification, Regularity::ConstantRankSingular);
  EXPECT_EQ(s.rank, 1);
  EXPECT_EQ(s.describe(), "Singular rank 1");
  RegularityReport d = hessian_report(corpus::load_model("degenerate"));
  EXPECT_EQ(d.classification, Regularity::ConstantRankSingular);
  EXPECT_EQ(d.rank, 0);
  RegularityReport c = hessian_report(corpus::load_model("cubic"));
  EXPECT_EQ(c.classification, Regularity::VariableRank);
  EXPECT_TRUE(c.sign_change);
  EXPECT_EQ(c.describe(), "Variable rank");
}

TEST(Legendre, HessianAndDeterminant) {
  RegularityReport r = hessian_report(corpus::load_model("two_dof"));
  ASSERT_TRUE(r.determinant.has_value());
  EXPECT_EQ(*r.determinant, Expr(Rational(3, 4)));
  EXPECT_EQ(r.hessian[0][1], Expr(Rational(1, 2)));
  RegularityReport s = hessian_report(corpus::load_model("singular2"));
  EXPECT_TRUE(s.determinant->is_zero_constant());
  for (int rank : s.rank_profile) EXPECT_EQ(rank, 1);
}

TEST(Legendre, AdjugateInverts) {
  ExprMatrix m{{qd_(1), Expr(2), Expr(0)}, {Expr(1), q_(1), Expr(3)}, {Expr(0), Expr(1), Expr(4)}};
  ExprMatrix adj = adjugate(m);
  Expr det = determinant(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < 3; ++k) terms.push_back(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * adj[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]);
      EXPECT_TRUE(is_zero(add(std::move(terms)) - (i == j ? det : Expr(0))));
    }
}

TEST(Legendre, GraphOracles) {
  SystemSpec s = corpus::load_model("oscillator");
  LegendreGraph g = legendre_graph(s);
  EXPECT_EQ(g.momenta[0], qd_(1));
  EXPECT_TRUE(is_zero(g.tau - (Expr(Rational(-1, 2)) * pow(qd_(1), Rational(2)) - Expr(Rational(1, 2)) * pow(q_(1), Rational(2)))));
  EXPECT_TRUE(is_zero(energy_function(s) + g.tau));
  // ic (0, 1, 0) -> (t=0, q=1, tau=-1/2, p=0, qd=0)
  Point x = s.base_point();
  x.set(Coord::time(), 0);
  x.set(Coord::position(1), 1);
  x.set(Coord::velocity(1), 0);
  Point y = g.embed(x);
  EXPECT_DOUBLE_EQ(y.get(Coord::tau()), -0.5);
  EXPECT_DOUBLE_EQ(y.get(Coord::momentum(1)), 0.0);
  // free particle ic (0, 0, 2) -> (0, 0, -2, 2, 2)
  SystemSpec f = corpus::load_model("free_particle");
  Point z = f.base_point();
  z.set(Coord::time(), 0);
  z.set(Coord::position(1), 0);
  z.set(Coord::velocity(1), 2);
  Point w = legendre_graph(f).embed(z);
  EXPECT_DOUBLE_EQ(w.get(Coord::tau()), -2.0);
  EXPECT_DOUBLE_EQ(w.get(Coord::momentum(1)), 2.0);
}

TEST(Legendre, SeededReportIsDeterministic) {
  SystemSpec s = corpus::load_model("cubic");
  EXPECT_EQ(hessian_report(s, 32, 9).rank_profile, hessian_report(s, 32, 9).rank_profile);
}
