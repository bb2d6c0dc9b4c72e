#include "srusk/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "srusk/forms.hpp"

namespace srusk {

std::string RegularityReport::describe() const {
  switch (classification) {
    case Regularity::Regular: return "Regular";
    case Regularity::ConstantRankSingular: return "Singular rank " + std::to_string(rank);
    case Regularity::VariableRank: return "Variable rank";
  }
  return "";
}

ExprMatrix hessian_matrix(const SystemSpec& spec) {
  ExprMatrix h(static_cast<std::size_t>(spec.n), std::vector<Expr>(static_cast<std::size_t>(spec.n)));
  for (int a = 1; a <= spec.n; ++a) {
    Expr la = diff(spec.lagrangian, Coord::velocity(a), spec.n);
    for (int b = a; b <= spec.n; ++b) {
      Expr hab = diff(la, Coord::velocity(b), spec.n);
      h[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = hab;
      h[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(a - 1)] = hab;
    }
  }
  return h;
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, std::size_t row, std::size_t col) {
  ExprMatrix out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == row) continue;
    std::vector<Expr> r;
    for (std::size_t j = 0; j < m.size(); ++j)
      if (j != col) r.push_back(m[i][j]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
  if (m.empty()) return Expr(1);
  if (m.size() == 1) return m[0][0];
  std::vector<Expr> terms;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[0][j].is_zero_constant()) continue;
    Expr cof = m[0][j] * determinant(minor_of(m, 0, j));
    terms.push_back(j % 2 ? -cof : cof);
  }
  return expand(add(std::move(terms)));
}

ExprMatrix adjugate(const ExprMatrix& m) {
  std::size_t n = m.size();
  ExprMatrix adj(n, std::vector<Expr>(n));
  if (n == 1) {
    adj[0][0] = Expr(1);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Expr c = determinant(minor_of(m, i, j));
      adj[j][i] = (i + j) % 2 ? -c : c;
    }
  return adj;
}

RegularityReport hessian_report(const SystemSpec& spec, int samples, std::uint64_t seed) {
  RegularityReport rep;
  rep.hessian = hessian_matrix(spec);
  const auto n = static_cast<Eigen::Index>(spec.n);
  if (spec.n <= 3) rep.determinant = determinant(rep.hessian);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Point base = spec.base_point();
  int signs_seen = 0;  // bit 0: positive, bit 1: negative
  for (int s = 0; s < samples; ++s) {
    Eigen::MatrixXd h(n, n);
    bool ok = false;
    for (int attempt = 0; attempt < 20 && !ok; ++attempt) {
      Point pt = base;
      for (auto& v : pt.values()) v = dist(rng);
      try {
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < n; ++j)
            h(i, j) = eval(rep.hessian[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], pt);
        ok = true;
      } catch (const EvalError&) {
      }
    }
    if (!ok) continue;
    int r = numeric_rank(h, 1e-9, 1e-12);
    rep.rank_profile.push_back(r);
    if (r > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
      std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
      double prod = 1.0;
      for (int i = 0; i < r; ++i) prod *= ev[static_cast<std::size_t>(i)] > 0 ? 1.0 : -1.0;
      signs_seen |= prod > 0 ? 1 : 2;
    }
  }

  bool constant = !rep.rank_profile.empty() &&
                  std::all_of(rep.rank_profile.begin(), rep.rank_profile.end(), [&](int r) { return r == rep.rank_profile[0]; });
  rep.sign_change = signs_seen == 3;
  if (!constant || rep.sign_change) {
    rep.classification = Regularity::VariableRank;
    rep.rank = rep.rank_profile.empty() ? 0 : *std::max_element(rep.rank_profile.begin(), rep.rank_profile.end());
    return rep;
  }
  rep.rank = rep.rank_profile[0];
  bool det_nonzero = !rep.determinant || !is_zero(*rep.determinant, 16, seed);
  if (rep.rank == spec.n && det_nonzero) {
    rep.classification = Regularity::Regular;
  } else if (rep.rank == spec.n) {
    rep.classification = Regularity::VariableRank;
  } else {
    rep.classification = Regularity::ConstantRankSingular;
  }
  return rep;
}

std::map<Coord, Expr> LegendreGraph::embedding() const {
  std::map<Coord, Expr> m;
  for (std::size_t a = 0; a < momenta.size(); ++a) m[Coord::momentum(static_cast<int>(a) + 1)] = momenta[a];
  m[Coord::tau()] = tau;
  return m;
}

Point LegendreGraph::embed(const Point& jet_point) const {
  Point out = jet_point;
  for (std::size_t a = 0; a < momenta.size(); ++a) out.set(Coord::momentum(static_cast<int>(a) + 1), eval(momenta[a], jet_point));
  out.set(Coord::tau(), eval(tau, jet_point));
  return out;
}

LegendreGraph legendre_graph(const SystemSpec& spec) {
  LegendreGraph g;
  std::vector<Expr> terms{spec.lagrangian};
  for (int a = 1; a <= spec.n; ++a) {
    Expr la = diff(spec.lagrangian, Coord::velocity(a), spec.n);
    g.momenta.push_back(la);
    terms.push_back(-(qd_(a) * la));
  }
  g.tau = expand(add(std::move(terms)));
  return g;
}

Expr energy_function(const SystemSpec& spec) { return expand(-legendre_graph(spec).tau); }

}  // namespace srusk
