#include "srusk/integrator.hpp"

#include <charconv>
#include <cmath>

namespace srusk {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

Point lift_initial_condition(const SystemSpec& spec, const ConstraintSet& domain, double t0,
                             const std::vector<double>& q, const std::vector<double>& qd, double tol) {
  if (q.size() != static_cast<std::size_t>(spec.n) || qd.size() != static_cast<std::size_t>(spec.n))
    throw InitialConditionError("initial condition needs " + std::to_string(spec.n) + " positions and velocities");
  Point x = domain.base();
  x.set(Coord::time(), t0);
  for (int a = 1; a <= spec.n; ++a) {
    x.set(Coord::position(a), q[static_cast<std::size_t>(a - 1)]);
    x.set(Coord::velocity(a), qd[static_cast<std::size_t>(a - 1)]);
  }
  x = legendre_graph(spec).embed(x);
  std::vector<std::pair<std::string, double>> bad;
  for (const Expr& c : domain.constraints()) {
    double r = std::abs(eval(c, x));
    if (r > tol * std::max(1.0, eval_scale(c, x))) bad.emplace_back(to_string(c), r);
  }
  if (!bad.empty()) {
    std::string msg;
    for (const auto& [c, r] : bad) {
      if (!msg.empty()) msg += "; ";
      msg += "constraint " + c + " = 0 violated (residual " + format_number(r) + ")";
    }
    InitialConditionError err(msg);
    err.residuals = bad;
    throw err;
  }
  return x;
}

Point trajectory_point(const SystemSpec& spec, const Trajectory& traj, std::size_t i) {
  Point x = spec.base_point();
  for (const auto& [k, v] : traj.bindings) x.set_param(k, v);
  x.values() = traj.states[i];
  return x;
}

Trajectory integrate(const SystemSpec& spec, const VectorFieldSpec& z, const Point& x0, const IntegrateOptions& options) {
  if (!(options.h > 0.0) || !(options.T > 0.0)) throw std::invalid_argument("step and horizon must be positive");
  Trajectory traj;
  traj.n = spec.n;
  traj.h = options.h;
  traj.T = options.T;
  traj.projection = options.projection;
  for (const std::string& u : z.free_params) {
    auto it = options.bindings.find(u);
    if (it == options.bindings.end()) {
      traj.bindings[u] = 0.0;
      traj.defaulted.push_back(u);
    } else {
      traj.bindings[u] = it->second;
    }
  }
  for (const auto& [k, v] : options.bindings)
    if (!traj.bindings.count(k)) throw std::invalid_argument("binding for unknown free parameter " + k);

  const auto steps = static_cast<long>(std::ceil(options.T / options.h - 1e-9));
  traj.h_eff = options.T / static_cast<double>(steps);
  const double h = traj.h_eff;
  const double t0 = x0.get(Coord::time());

  Point x = x0;
  for (const auto& [k, v] : traj.bindings) x.set_param(k, v);
  const std::vector<Expr>& constraints = z.domain.constraints();
  const Expr tau_graph = legendre_graph(spec).tau;
  const std::size_t d = z.components.size();

  auto drift_at = [&](const Point& p) {
    double m = 0.0;
    for (const Expr& c : constraints) m = std::max(m, std::abs(eval(c, p)));
    return m;
  };
  auto field = [&](const Point& p, std::vector<double>& out) {
    for (std::size_t i = 0; i < d; ++i) out[i] = eval(z.components[i], p);
  };

  double d0 = drift_at(x);
  if (d0 > options.init_tol) throw InitialConditionError("initial point is off the constraint set (drift " + format_number(d0) + ")");
  traj.states.push_back(x.values());
  traj.drift.push_back(d0);

  std::vector<double> k1(d), k2(d), k3(d), k4(d);
  Point stage = x;
  try {
    for (long s = 1; s <= steps; ++s) {
      const std::vector<double>& y = x.values();
      field(x, k1);
      for (std::size_t i = 0; i < d; ++i) stage.values()[i] = y[i] + 0.5 * h * k1[i];
      field(stage, k2);
      for (std::size_t i = 0; i < d; ++i) stage.values()[i] = y[i] + 0.5 * h * k2[i];
      field(stage, k3);
      for (std::size_t i = 0; i < d; ++i) stage.values()[i] = y[i] + h * k3[i];
      field(stage, k4);
      std::vector<double> next(d);
      for (std::size_t i = 0; i < d; ++i) next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      next[0] = t0 + static_cast<double>(s) * h;
      x.values() = next;
      if (options.projection) {
        x = z.domain.project(x);
        x.set(Coord::tau(), eval(tau_graph, x));
      }
      double dr = drift_at(x);
      traj.states.push_back(x.values());
      traj.drift.push_back(dr);
      if (!(dr <= options.drift_fail))
        throw IntegrationError("constraint drift " + format_number(dr) + " exceeds " + format_number(options.drift_fail) +
                               " at t=" + format_number(next[0]));
    }
  } catch (const EvalError& e) {
    throw IntegrationError("evaluation failed at t=" + format_number(x.get(Coord::time())) + ": " + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const IntegrationError*>(&e)) throw;
    throw IntegrationError(std::string("projection failed at t=") + format_number(x.get(Coord::time())) + ": " + e.what());
  }
  return traj;
}

DriftSummary drift_report(const SystemSpec& spec, const Trajectory& traj, const std::vector<Expr>& constraints) {
  DriftSummary s;
  if (traj.states.empty()) return s;
  s.empty = false;
  std::vector<double> per_sample(traj.size(), 0.0);
  for (const Expr& c : constraints) {
    DriftSummary::Entry e;
    e.constraint = to_string(c);
    double sum = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      double r = std::abs(eval(c, trajectory_point(spec, traj, i)));
      e.max = std::max(e.max, r);
      sum += r;
      per_sample[i] = std::max(per_sample[i], r);
    }
    e.mean = sum / static_cast<double>(traj.size());
    s.max_drift = std::max(s.max_drift, e.max);
    s.per_constraint.push_back(std::move(e));
  }
  // Trend: maxima over ten consecutive windows never decrease and end above the start.
  const std::size_t windows = std::min<std::size_t>(10, traj.size());
  std::vector<double> wmax(windows, 0.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::size_t w = i * windows / traj.size();
    wmax[w] = std::max(wmax[w], per_sample[i]);
  }
  bool monotone = true;
  for (std::size_t w = 1; w < windows; ++w) monotone = monotone && wmax[w] >= wmax[w - 1];
  s.increasing_trend = monotone && windows > 1 && wmax.back() > wmax.front();
  return s;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out;
  for (int i = 0; i < mixed_dim(traj.n); ++i) out += mixed_coord(i, traj.n).name() + ",";
  out += "drift\n";
  for (std::size_t s = 0; s < traj.size(); ++s) {
    for (double v : traj.states[s]) out += format_number(v) + ",";
    out += format_number(traj.drift[s]) + "\n";
  }
  return out;
}

}  // namespace srusk
