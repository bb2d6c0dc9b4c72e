#include <gtest/gtest.h>

#include "corpus.hpp"
#include "srusk/constraints.hpp"

using namespace srusk;

namespace {

// Constraint lists match up to sign and order.
void expect_same_constraints(const std::vector<Expr>& got, const std::vector<Expr>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (const Expr& w : want) {
    bool found = false;
    for (const Expr& g : got) found = found || is_zero(g - w) || is_zero(g + w);
    EXPECT_TRUE(found) << "missing " << to_string(w);
  }
}

}  // namespace

TEST(Constraints, PrimaryConstraints) {
  auto c = primary_constraints(corpus::load_model("two_dof"));
  expect_same_constraints(c, {p_(1) - qd_(1) - Expr(Rational(1, 2)) * qd_(2), p_(2) - Expr(Rational(1, 2)) * qd_(1) - qd_(2)});
}

TEST(Constraints, RegularChainsStabilizeAtLevelTwo) {
  for (const auto& name : corpus::regular_corpus()) {
    SystemSpec s = corpus::load_model(name);
    ConstraintChain c = run_algorithm(s);
    EXPECT_EQ(c.status_string(), "Stabilized(2)") << name;
    EXPECT_EQ(c.levels.size(), 2u) << name;
    EXPECT_TRUE(c.levels[0].constraints.empty());
    expect_same_constraints(c.levels[1].constraints, primary_constraints(s));
    // Only d/dtau remains free before the graph refinement.
    EXPECT_EQ(c.free_directions.dimension(), 1) << name;
    ASSERT_EQ(c.free_directions.basis.size(), 1u);
    std::vector<double> v = c.free_directions.basis[0];
    for (std::size_t i = 0; i < v.size(); ++i)
      EXPECT_NEAR(std::abs(v[i]), i == static_cast<std::size_t>(mixed_index(Coord::tau(), s.n)) ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Constraints, SingularTwoDofChain) {
  // Computed chain: M2 = {p1 - qd1 - q2, p2}, M3 = {qd1}, M4 = {qd2}. The last
  // level comes from Z(qd1) = 0 forcing Z_p2 = qd2 = 0 on the mixed space.
  SystemSpec s = corpus::load_model("singular2");
  ConstraintChain c = run_algorithm(s);
  ASSERT_EQ(c.levels.size(), 4u);
  expect_same_constraints(c.levels[1].constraints, {p_(1) - qd_(1) - q_(2), p_(2)});
  expect_same_constraints(c.levels[2].constraints, {qd_(1)});
  expect_same_constraints(c.levels[3].constraints, {qd_(2)});
  EXPECT_EQ(c.status_string(), "Stabilized(4)");
  EXPECT_EQ(c.free_directions.dimension(), 1);
  EXPECT_EQ(to_string(c.levels[1].constraints[0]), "-q2 + p1 - qd1");
}

TEST(Constraints, TotallyDegenerateChain) {
  ConstraintChain c = run_algorithm(corpus::load_model("degenerate"));
  EXPECT_EQ(c.status_string(), "Stabilized(2)");
  expect_same_constraints(c.levels[1].constraints, {p_(1) - Expr(1)});
  EXPECT_EQ(c.free_directions.dimension(), 2);
}

TEST(Constraints, TangencyStepOracle) {
  // Singular 2-dof on M2: unknowns (Z_tau, u1, u2); Z(p2) = dL/dq2 = qd1 gives the residual qd1.
  SystemSpec s = corpus::load_model("singular2");
  ConstraintChain c = run_algorithm(s);
  TangencyResult t = tangency_step(s, c.levels[1].set);
  EXPECT_EQ(t.reduction.unknowns, 3u);
  bool has_qd1 = false;
  for (const Expr& r : t.residuals) has_qd1 = has_qd1 || is_zero(r - qd_(1)) || is_zero(r + qd_(1));
  EXPECT_TRUE(has_qd1);
}

TEST(Constraints, GenericEngineReproducesSkinnerRuskChains) {
  for (const std::string name : {"oscillator", "td_oscillator", "singular2", "degenerate", "two_dof"}) {
    SystemSpec s = corpus::load_model(name);
    ConstraintChain a = run_algorithm(s);
    ConstraintChain b = run_presymplectic(skinner_rusk_system(s));
    ASSERT_EQ(a.levels.size(), b.levels.size()) << name;
    EXPECT_EQ(a.status_string(), b.status_string()) << name;
    for (std::size_t k = 1; k < a.levels.size(); ++k)
      for (const Expr& e : b.levels[k].set.constraints()) EXPECT_TRUE(a.levels[k].set.vanishes(e)) << name << " " << to_string(e);
  }
}

TEST(Constraints, JetChain) {
  ConstraintChain p = run_presymplectic(jet_system(corpus::load_model("singular2")));
  EXPECT_EQ(p.status_string(), "Stabilized(2)");
  expect_same_constraints(p.levels[1].constraints, {qd_(1)});
  EXPECT_EQ(run_presymplectic(jet_system(corpus::load_model("oscillator"))).status_string(), "Stabilized(1)");
}

TEST(Constraints, VariableRankRejected) {
  EXPECT_THROW(run_algorithm(corpus::load_model("cubic")), VariableRankError);
}

TEST(Constraints, FlatMap) {
  SystemSpec s = corpus::load_model("oscillator");
  TwoFormField w = build_omega_H(s);
  OneFormField eta = build_eta(w.chart);
  Point x = s.base_point();
  for (auto& v : x.values()) v = 0.4;
  Eigen::MatrixXd f = flat_map(w, eta, x);
  // flat(d/dtau) = 0; flat(d/dt) has eta-component 1 + (omega part)
  EXPECT_LE(f.col(mixed_index(Coord::tau(), 1)).cwiseAbs().maxCoeff(), 0.0);
  ConstraintChain c = run_algorithm(s);
  for (const Point& p : c.levels[1].set.witnesses()) EXPECT_TRUE(eta_in_flat_image(w, eta, c.levels[1].set, p));
}

TEST(Constraints, FlatImageDetectsLevelThree) {
  SystemSpec s = corpus::load_model("singular2");
  ConstraintChain c = run_algorithm(s);
  TwoFormField w = build_omega_H(s);
  OneFormField eta = build_eta(w.chart);
  const ConstraintSet& m2 = c.levels[1].set;
  int checked = 0;
  for (const Point& p : m2.witnesses()) {
    if (std::abs(p.get(Coord::velocity(1))) < 1e-3) continue;
    EXPECT_FALSE(eta_in_flat_image(w, eta, m2, p));
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(Constraints, SeedDeterminism) {
  SystemSpec s = corpus::load_model("singular2");
  AlgorithmOptions o;
  o.seed = 5;
  ConstraintChain a = run_algorithm(s, o), b = run_algorithm(s, o);
  for (std::size_t k = 0; k < a.levels.size(); ++k)
    for (std::size_t i = 0; i < a.levels[k].set.witnesses().size(); ++i)
      EXPECT_EQ(a.levels[k].set.witnesses()[i].values(), b.levels[k].set.witnesses()[i].values());
}
