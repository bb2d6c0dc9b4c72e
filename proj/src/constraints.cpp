#include "srusk/constraints.hpp"

#include <algorithm>

namespace srusk {

namespace {

constexpr std::uint64_t kLevelSeedStride = 0x9E3779B97F4A7C15ULL;

std::uint64_t level_seed(std::uint64_t seed, int level) {
  return seed + static_cast<std::uint64_t>(level) * kLevelSeedStride;
}

ConstraintSetOptions set_options(const AlgorithmOptions& o) {
  ConstraintSetOptions s;
  s.seed = level_seed(o.seed, 1);
  s.witnesses = o.witnesses;
  return s;
}

// Shared driver: `step` returns the residual conditions for a level.
template <class Step>
ConstraintChain iterate(ConstraintSet first, std::vector<Expr> second, const AlgorithmOptions& options, Step step) {
  ConstraintChain chain;
  chain.levels.push_back({1, {}, first});
  ConstraintSet current = first;
  std::vector<Expr> candidates = std::move(second);
  for (int level = 2;; ++level) {
    ConstraintSet next = current;
    std::vector<Expr> accepted = candidates.empty() ? std::vector<Expr>{} : next.add(candidates, level_seed(options.seed, level));
    if (accepted.empty()) {
      chain.status = ChainStatus::Stabilized;
      chain.final_level = level - 1;
      return chain;
    }
    chain.levels.push_back({level, accepted, next});
    chain.final_level = level;
    if (next.empty()) {
      chain.status = ChainStatus::EmptyFinal;
      chain.diagnostic = "no point satisfies the level-" + std::to_string(level) + " constraints";
      return chain;
    }
    if (level >= options.max_levels) {
      chain.status = ChainStatus::MaxIterationsExceeded;
      chain.diagnostic = "chain did not stabilize within " + std::to_string(options.max_levels) + " levels";
      return chain;
    }
    current = next;
    candidates = step(current);
  }
}

}  // namespace

bool FreeDirections::constant() const {
  return std::all_of(dimension_profile.begin(), dimension_profile.end(),
                     [&](int d) { return d == dimension_profile.front(); });
}

std::string ConstraintChain::status_string() const {
  switch (status) {
    case ChainStatus::Stabilized: return "Stabilized(" + std::to_string(final_level) + ")";
    case ChainStatus::EmptyFinal: return "EmptyFinal";
    case ChainStatus::MaxIterationsExceeded: return "MaxIterationsExceeded";
  }
  return "";
}

std::vector<Expr> primary_constraints(const SystemSpec& spec) {
  std::vector<Expr> out;
  for (int a = 1; a <= spec.n; ++a) out.push_back(expand(p_(a) - diff(spec.lagrangian, Coord::velocity(a), spec.n)));
  return out;
}

LinearSystem tangency_system(const SystemSpec& spec, const ConstraintSet& level) {
  const int n = spec.n;
  std::vector<Expr> lq;
  for (int a = 1; a <= n; ++a) lq.push_back(diff(spec.lagrangian, Coord::position(a), n));
  LinearSystem sys;
  for (const Expr& psi : level.constraints()) {
    std::vector<Expr> row{diff(psi, Coord::tau(), n)};
    for (int a = 1; a <= n; ++a) row.push_back(diff(psi, Coord::velocity(a), n));
    std::vector<Expr> forced{diff(psi, Coord::time(), n)};
    for (int a = 1; a <= n; ++a) {
      forced.push_back(qd_(a) * diff(psi, Coord::position(a), n));
      forced.push_back(lq[static_cast<std::size_t>(a - 1)] * diff(psi, Coord::momentum(a), n));
    }
    sys.a.push_back(std::move(row));
    sys.b.push_back(-add(std::move(forced)));
    sys.row_labels.push_back("Z(" + to_string(psi) + ")");
  }
  return sys;
}

TangencyResult tangency_step(const SystemSpec& spec, const ConstraintSet& level) {
  TangencyResult r;
  r.system = tangency_system(spec, level);
  r.reduction = reduce_on_level(r.system, level);
  for (const Expr& res : r.reduction.residuals) r.residuals.push_back(-res);
  return r;
}

PresymplecticSystem skinner_rusk_system(const SystemSpec& spec, int omega_sign) {
  TwoFormField omega = build_omega_H(spec, omega_sign);
  OneFormField eta = build_eta(omega.chart);
  return {std::move(omega), std::move(eta), spec.base_point()};
}

PresymplecticSystem jet_system(const SystemSpec& spec) {
  TwoFormField omega = build_poincare_cartan(spec).omega;
  OneFormField eta = build_eta(omega.chart);
  return {std::move(omega), std::move(eta), spec.base_point()};
}

ConstraintChain run_algorithm(const SystemSpec& spec, const AlgorithmOptions& options) {
  RegularityReport reg = hessian_report(spec, 32, options.seed);
  if (reg.classification == Regularity::VariableRank)
    throw VariableRankError("Hessian rank is not constant (profile varies or its pseudo-determinant changes sign); "
                            "the constraint algorithm requires constant rank");
  ConstraintSet m1(Chart::mixed(spec.n), spec.base_point(), set_options(options));
  ConstraintChain chain = iterate(m1, primary_constraints(spec), options,
                                  [&](const ConstraintSet& level) { return tangency_step(spec, level).residuals; });
  if (chain.stabilized()) {
    PresymplecticSystem sr = skinner_rusk_system(spec);
    chain.free_directions = free_directions(sr.omega, sr.eta, chain.last().set);
  }
  return chain;
}

LinearSystem presymplectic_system(const PresymplecticSystem& sys, const ConstraintSet& level) {
  const std::size_t d = sys.omega.dim();
  LinearSystem ls;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Expr> row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = sys.omega.coeffs[i][j];
    ls.a.push_back(std::move(row));
    ls.b.push_back(Expr(0));
    ls.row_labels.push_back("i_Z Omega [" + sys.omega.chart[j].name() + "]");
  }
  ls.a.push_back(sys.eta.coeffs);
  ls.b.push_back(Expr(1));
  ls.row_labels.push_back("i_Z eta");
  for (const Expr& psi : level.constraints()) {
    std::vector<Expr> row(d);
    for (std::size_t i = 0; i < d; ++i) row[i] = diff(psi, sys.omega.chart[i]);
    ls.a.push_back(std::move(row));
    ls.b.push_back(Expr(0));
    ls.row_labels.push_back("Z(" + to_string(psi) + ")");
  }
  return ls;
}

ConstraintChain run_presymplectic(const PresymplecticSystem& sys, const AlgorithmOptions& options) {
  ConstraintSet m1(sys.omega.chart, sys.base, set_options(options));
  auto step = [&](const ConstraintSet& level) {
    Reduction red = reduce_on_level(presymplectic_system(sys, level), level);
    return red.residuals;
  };
  ConstraintChain chain = iterate(m1, step(m1), options, step);
  if (chain.stabilized()) chain.free_directions = free_directions(sys.omega, sys.eta, chain.last().set);
  return chain;
}

Eigen::MatrixXd flat_map(const TwoFormField& omega, const OneFormField& eta, const Point& point) {
  Eigen::MatrixXd m = evaluate(omega, point);
  Eigen::VectorXd e = evaluate(eta, point);
  return m.transpose() + e * e.transpose();
}

Eigen::MatrixXd tangent_basis(const ConstraintSet& level, const Point& point) {
  const Chart& chart = level.chart();
  const auto d = static_cast<Eigen::Index>(chart.size());
  const auto& cs = level.constraints();
  if (cs.empty()) return Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd j(static_cast<Eigen::Index>(cs.size()), d);
  for (std::size_t r = 0; r < cs.size(); ++r)
    for (std::size_t c = 0; c < chart.size(); ++c)
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = eval(diff(cs[r], chart[c]), point);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
  int rank = numeric_rank(j, 1e-9, 1e-12);
  return svd.matrixV().rightCols(d - rank);
}

bool eta_in_flat_image(const TwoFormField& omega, const OneFormField& eta, const ConstraintSet& level,
                       const Point& point, double tol) {
  Eigen::MatrixXd a = flat_map(omega, eta, point) * tangent_basis(level, point);
  Eigen::VectorXd e = evaluate(eta, point);
  Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(e);
  return (a * c - e).norm() <= tol * std::max(1.0, e.norm());
}

FreeDirections free_directions(const TwoFormField& omega, const OneFormField& eta, const ConstraintSet& level) {
  FreeDirections fd;
  for (const Point& w : level.witnesses()) {
    Eigen::MatrixXd n = tangent_basis(level, w);
    Eigen::MatrixXd m = evaluate(omega, w);
    Eigen::VectorXd e = evaluate(eta, w);
    Eigen::MatrixXd k(m.cols() + 1, n.cols());
    k.topRows(m.cols()) = m.transpose() * n;
    k.bottomRows(1) = e.transpose() * n;
    int rank = numeric_rank(k, 1e-9, 1e-12);
    fd.dimension_profile.push_back(static_cast<int>(n.cols()) - rank);
    if (fd.basis.empty() && n.cols() > rank) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullV);
      Eigen::MatrixXd kernel = n * svd.matrixV().rightCols(n.cols() - rank);
      for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
        std::vector<double> v(static_cast<std::size_t>(kernel.rows()));
        for (Eigen::Index r = 0; r < kernel.rows(); ++r) {
          double x = kernel(r, c);
          v[static_cast<std::size_t>(r)] = std::abs(x) < 1e-12 ? 0.0 : x;
        }
        fd.basis.push_back(std::move(v));
      }
    }
  }
  return fd;
}

}  // namespace srusk
