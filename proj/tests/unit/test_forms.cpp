#include <gtest/gtest.h>

#include <cmath>

#include "corpus.hpp"
#include "srusk/forms.hpp"

using namespace srusk;

namespace {

int idx(Coord c, int n) { return mixed_index(c, n); }

}  // namespace

TEST(Forms, ChartsAndOrder) {
  Chart m = Chart::mixed(2);
  ASSERT_EQ(m.size(), 8u);
  EXPECT_EQ(m[0], Coord::time());
  EXPECT_EQ(m[3], Coord::tau());
  EXPECT_EQ(m[6], Coord::velocity(1));
  EXPECT_EQ(Chart::jet(1).size(), 3u);
  EXPECT_FALSE(Chart::mixed_without_momenta(2).contains(Coord::momentum(1)));
  EXPECT_FALSE(Chart::dual_mixed(1).contains(Coord::tau()));
}

TEST(Forms, OmegaAndEta) {
  TwoFormField w = build_omega(1);
  // omega = dq^dp + dt^dtau
  EXPECT_EQ(w.at(Coord::position(1), Coord::momentum(1)), Expr(1));
  EXPECT_EQ(w.at(Coord::momentum(1), Coord::position(1)), Expr(-1));
  EXPECT_EQ(w.at(Coord::time(), Coord::tau()), Expr(1));
  OneFormField eta = build_eta(Chart::mixed(1));
  EXPECT_EQ(eta.at(Coord::time()), Expr(1));
  EXPECT_TRUE(eta.at(Coord::tau()).is_zero_constant());
}

TEST(Forms, OmegaHEntries) {
  SystemSpec s = corpus::load_model("oscillator");
  TwoFormField w = build_omega_H(s);
  // omega_H[qd][t] = p - dL/dqd
  EXPECT_EQ(w.at(Coord::velocity(1), Coord::time()), p_(1) - qd_(1));
  EXPECT_EQ(w.at(Coord::time(), Coord::velocity(1)), qd_(1) - p_(1));
  EXPECT_TRUE(is_antisymmetric(w));
  for (std::size_t j = 0; j < w.dim(); ++j) EXPECT_TRUE(w.coeffs[static_cast<std::size_t>(idx(Coord::tau(), 1))][j].is_zero_constant());
}

TEST(Forms, HamiltonianFunction) {
  SystemSpec s = corpus::load_model("oscillator");
  HamiltonianFn h = build_hamiltonian(s);
  EXPECT_TRUE(is_zero(h.h - (p_(1) * qd_(1) + tau_() - s.lagrangian)));
  EXPECT_EQ(h.dh_dqd[0], p_(1) - qd_(1));
  EXPECT_EQ(h.dh_dtau, Expr(1));
}

TEST(Forms, ExteriorDerivativeOfDifferentialVanishes) {
  corpus::ExprGenerator gen(2, {}, 5);
  Chart c = Chart::mixed(2);
  for (int i = 0; i < 20; ++i) {
    TwoFormField dd = exterior_derivative(differential(gen(3), c));
    for (const auto& row : dd.coeffs)
      for (const auto& e : row) EXPECT_TRUE(is_zero(e));
  }
}

TEST(Forms, PoincareCartan) {
  SystemSpec s = corpus::load_model("oscillator");
  PoincareCartan pc = build_poincare_cartan(s);
  // theta = (L - qd^2) dt + qd dq, omega_L = -d theta = dq^dqd + qd dqd^dt - q dq^dt... checked entrywise
  EXPECT_TRUE(is_zero(pc.theta.at(Coord::time()) - (s.lagrangian - pow(qd_(1), Rational(2)))));
  EXPECT_EQ(pc.theta.at(Coord::position(1)), qd_(1));
  EXPECT_EQ(pc.omega.at(Coord::position(1), Coord::velocity(1)), Expr(1));
  EXPECT_TRUE(is_zero(pc.omega.at(Coord::velocity(1), Coord::time()) - qd_(1)));
  EXPECT_TRUE(is_zero(pc.omega.at(Coord::position(1), Coord::time()) - q_(1)));
}

TEST(Forms, InteriorProduct) {
  TwoFormField w = build_omega(1);
  std::vector<Expr> v(5, Expr(0));
  v[static_cast<std::size_t>(idx(Coord::position(1), 1))] = Expr(1);
  std::vector<Expr> iv = interior(v, w);
  // i_{d/dq}(dq^dp) = dp
  EXPECT_EQ(iv[static_cast<std::size_t>(idx(Coord::momentum(1), 1))], Expr(1));
  EXPECT_TRUE(iv[static_cast<std::size_t>(idx(Coord::position(1), 1))].is_zero_constant());
}

TEST(Forms, WedgeSignsAndTopCoefficient) {
  for (int n : {1, 2}) {
    KForm k = KForm::from(build_omega(n));
    KForm e = KForm::from(build_eta(Chart::mixed(n)));
    KForm top = k.power(n).wedge(e);
    std::vector<int> indices{0};
    for (int a = 1; a <= n; ++a) indices.push_back(idx(Coord::position(a), n));
    for (int a = 1; a <= n; ++a) indices.push_back(idx(Coord::momentum(a), n));
    int sign = (n * (n - 1) / 2) % 2 == 0 ? 1 : -1;
    int fact = n == 1 ? 1 : 2;
    EXPECT_EQ(top.coefficient(indices), Expr(sign * fact)) << "n=" << n;
  }
  KForm a = KForm::from(differential(q_(1), Chart::mixed(1)));
  KForm b = KForm::from(differential(p_(1), Chart::mixed(1)));
  EXPECT_TRUE(a.wedge(a).vanishes());
  EXPECT_EQ(a.wedge(b).coefficient({1, 3}), Expr(1));
  EXPECT_EQ(b.wedge(a).coefficient({1, 3}), Expr(-1));
}

TEST(Forms, PullbackToLegendreGraphMatchesOmegaL) {
  SystemSpec s = corpus::load_model("td_oscillator");
  Chart ml = Chart::mixed_without_momenta(1);
  std::map<Coord, Expr> emb{{Coord::momentum(1), qd_(1)}};
  TwoFormField d = pullback(build_omega_H(s), ml, emb) - pullback(pullback_omega_L(s), ml, emb);
  for (const auto& row : d.coeffs)
    for (const auto& e : row) EXPECT_TRUE(is_zero(e));
}

TEST(Forms, NumericRank) {
  SystemSpec s = corpus::load_model("oscillator");
  TwoFormField w = build_omega_H(s);
  Point off = s.base_point();
  for (auto& v : off.values()) v = 0.3;
  off.set(Coord::momentum(1), 1.0);
  EXPECT_EQ(rank_at(w, off), 4);
  Point on = off;
  on.set(Coord::momentum(1), 0.3);
  EXPECT_EQ(rank_at(w, on), 2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(2, 2) = 1e-13;
  EXPECT_EQ(numeric_rank(m), 2);
}
