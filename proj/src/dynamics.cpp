#include "srusk/dynamics.hpp"

namespace srusk {

namespace {

std::size_t idx(Coord c, int n) { return static_cast<std::size_t>(mixed_index(c, n)); }

std::string free_name(int b) { return "u" + std::to_string(b); }

}  // namespace

Expr energy_balance(const SystemSpec& spec, const std::vector<Expr>& components) {
  const int n = spec.n;
  Expr tau_expr = legendre_graph(spec).tau;
  std::vector<Expr> terms{diff(tau_expr, Coord::time(), n) * components[idx(Coord::time(), n)]};
  for (int a = 1; a <= n; ++a) {
    terms.push_back(diff(tau_expr, Coord::position(a), n) * components[idx(Coord::position(a), n)]);
    terms.push_back(diff(tau_expr, Coord::velocity(a), n) * components[idx(Coord::velocity(a), n)]);
  }
  return add(std::move(terms));
}

std::vector<Expr> euler_lagrange_accelerations(const SystemSpec& spec) {
  const int n = spec.n;
  const Expr& l = spec.lagrangian;
  std::vector<Expr> f;
  for (int a = 1; a <= n; ++a) {
    Expr la = diff(l, Coord::velocity(a), n);
    std::vector<Expr> terms{diff(l, Coord::position(a), n), -diff(la, Coord::time(), n)};
    for (int b = 1; b <= n; ++b) terms.push_back(-(qd_(b) * diff(la, Coord::position(b), n)));
    f.push_back(expand(add(std::move(terms))));
  }
  ExprMatrix h = hessian_matrix(spec);
  std::vector<Expr> out;
  if (n <= 3) {
    ExprMatrix adj = adjugate(h);
    Expr inv_det = pow(determinant(h), Rational(-1));
    for (int a = 0; a < n; ++a) {
      std::vector<Expr> terms;
      for (int b = 0; b < n; ++b)
        terms.push_back(adj[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * f[static_cast<std::size_t>(b)]);
      out.push_back(expand(add(std::move(terms))) * inv_det);
    }
    return out;
  }
  ConstraintSet jet(Chart::jet(n), spec.base_point());
  LinearSystem sys{h, f, {}};
  Reduction red = reduce_on_level(sys, jet);
  if (!red.free_cols.empty()) throw std::invalid_argument("Hessian is singular");
  return red.solution({});
}

VectorFieldSpec solve_Z(const SystemSpec& spec, const ConstraintChain& chain, ZMode mode) {
  if (!chain.stabilized()) throw std::invalid_argument("cannot solve for Z: constraint chain status " + chain.status_string());
  const int n = spec.n;
  VectorFieldSpec z;
  z.n = n;
  z.mode = mode;
  z.domain_level = chain.final_level;
  z.domain = chain.last().set;
  z.components.assign(static_cast<std::size_t>(mixed_dim(n)), Expr(0));
  z.components[idx(Coord::time(), n)] = Expr(1);
  for (int a = 1; a <= n; ++a) {
    z.components[idx(Coord::position(a), n)] = qd_(a);
    z.components[idx(Coord::momentum(a), n)] = diff(spec.lagrangian, Coord::position(a), n);
  }

  if (mode == ZMode::GraphRefined) {
    if (hessian_report(spec, 32, chain.last().set.options().seed).classification != Regularity::Regular)
      throw std::invalid_argument("graph_refined mode requires a regular Lagrangian");
    std::vector<Expr> acc = euler_lagrange_accelerations(spec);
    for (int a = 1; a <= n; ++a) z.components[idx(Coord::velocity(a), n)] = acc[static_cast<std::size_t>(a - 1)];
    z.components[idx(Coord::tau(), n)] = energy_balance(spec, z.components);
    z.domain.add({tau_() - legendre_graph(spec).tau}, chain.last().set.options().seed + 0x6a09e667f3bcc909ULL);
    // Tangency to graph_L: the system including tau - tau_expr must have no free column.
    Reduction red = tangency_step(spec, z.domain).reduction;
    z.unique = red.free_cols.empty() && red.residuals.empty();
  } else {
    Reduction red = tangency_step(spec, z.domain).reduction;
    std::vector<Expr> free_values;
    const Expr ztau = Expr::param("__ztau");
    for (int col : red.free_cols) {
      if (col == 0) {
        free_values.push_back(ztau);
      } else {
        free_values.push_back(Expr::param(free_name(col)));
        z.free_params.push_back(free_name(col));
      }
    }
    std::vector<Expr> sol = red.solution(free_values);
    for (int a = 1; a <= n; ++a) z.components[idx(Coord::velocity(a), n)] = sol[static_cast<std::size_t>(a)];
    z.components[idx(Coord::tau(), n)] = energy_balance(spec, z.components);
    Expr ztau_value = red.free_cols.empty() || red.free_cols[0] != 0 ? sol[0] : z.components[idx(Coord::tau(), n)];
    for (auto& c : z.components) c = substitute_params(c, {{"__ztau", ztau_value}});
    z.unique = red.free_cols.empty();
  }
  for (auto& c : z.components) c = expand(z.domain.reduce(c));
  return z;
}

ProjectedField project_to_jet(const SystemSpec& spec, const VectorFieldSpec& z) {
  const int n = spec.n;
  ProjectedField f;
  f.chart = Chart::jet(n);
  for (const Coord& c : f.chart.coords()) f.components.push_back(z.component(c));
  f.free_params = z.free_params;
  return f;
}

ProjectedField project_to_dual(const SystemSpec& spec, const VectorFieldSpec& z) {
  if (hessian_report(spec, 32, z.domain.options().seed).classification != Regularity::Regular)
    throw ProjectionError("projection unavailable for singular Lagrangian");
  ProjectedField f;
  f.chart = Chart::dual_mixed(spec.n);
  for (const Coord& c : f.chart.coords()) f.components.push_back(z.component(c));
  f.warning = "Legendre map checked for local invertibility only; hyperregularity (global) is not verified";
  return f;
}

}  // namespace srusk
