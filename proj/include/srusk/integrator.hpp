#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "srusk/dynamics.hpp"

namespace srusk {

struct InitialConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
  std::vector<std::pair<std::string, double>> residuals;  // constraint text, |value|
};

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrateOptions {
  double h = 1e-3;
  double T = 10.0;
  bool projection = true;
  double drift_fail = 1e-3;
  double init_tol = 1e-12;
  std::map<std::string, double> bindings;  // free parameter values
};

struct Trajectory {
  int n = 0;
  double h = 0.0;      // requested step
  double h_eff = 0.0;  // T / steps, so the last sample lands on t0 + T
  double T = 0.0;
  bool projection = true;
  std::vector<std::vector<double>> states;  // mixed chart order
  std::vector<double> drift;                // max |constraint| per sample
  std::map<std::string, double> bindings;   // all free parameters, defaulted ones included
  std::vector<std::string> defaulted;       // free parameters bound to 0 by default

  std::size_t size() const { return states.size(); }
  double time(std::size_t i) const { return states[i][0]; }
};

// Lifts (t0, q0, qd0) to M_1 through the Legendre graph and checks it against
// the cumulative constraints of `domain`.
Point lift_initial_condition(const SystemSpec& spec, const ConstraintSet& domain, double t0,
                             const std::vector<double>& q, const std::vector<double>& qd, double tol = 1e-12);

Trajectory integrate(const SystemSpec& spec, const VectorFieldSpec& z, const Point& x0, const IntegrateOptions& options);

// Point with the spec's parameter defaults and the trajectory's bindings.
Point trajectory_point(const SystemSpec& spec, const Trajectory& traj, std::size_t i);

struct DriftSummary {
  struct Entry {
    std::string constraint;
    double max = 0.0;
    double mean = 0.0;
  };
  std::vector<Entry> per_constraint;
  double max_drift = 0.0;
  bool increasing_trend = false;
  bool empty = true;
};

DriftSummary drift_report(const SystemSpec& spec, const Trajectory& traj, const std::vector<Expr>& constraints);

std::string trajectory_csv(const Trajectory& traj);

// Shortest round-trip decimal text for a double.
std::string format_number(double v);

}  // namespace srusk
