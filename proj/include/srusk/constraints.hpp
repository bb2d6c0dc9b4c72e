#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srusk/constraint_set.hpp"
#include "srusk/forms.hpp"
#include "srusk/legendre.hpp"
#include "srusk/linear_solve.hpp"
#include "srusk/model.hpp"

namespace srusk {

struct ConstraintLevel {
  int level = 1;
  std::vector<Expr> constraints;  // introduced at this level
  ConstraintSet set;              // cumulative constraints and witnesses
};

enum class ChainStatus { Stabilized, EmptyFinal, MaxIterationsExceeded };

// ker Omega ∩ ker eta ∩ T M at witness points of a level.
struct FreeDirections {
  std::vector<int> dimension_profile;      // per witness
  std::vector<std::vector<double>> basis;  // at the first witness, chart order
  int dimension() const { return dimension_profile.empty() ? 0 : dimension_profile.front(); }
  bool constant() const;
};

struct ConstraintChain {
  std::vector<ConstraintLevel> levels;  // levels[0] is M_1
  ChainStatus status = ChainStatus::Stabilized;
  int final_level = 1;
  std::string diagnostic;
  FreeDirections free_directions;

  const ConstraintLevel& last() const { return levels.back(); }
  bool stabilized() const { return status == ChainStatus::Stabilized; }
  std::string status_string() const;  // "Stabilized(2)", "EmptyFinal", ...
};

struct AlgorithmOptions {
  int max_levels = 10;
  std::uint64_t seed = 42;
  int witnesses = 12;
};

// Level 2: phi_A = p_A - dL/dqd^A.
std::vector<Expr> primary_constraints(const SystemSpec& spec);

// Tangency conditions Z(psi) = 0 for every cumulative constraint psi with the
// forced components Z_t = 1, Z_q = qd, Z_p = dL/dq substituted. Unknowns are
// (Z_tau, Z_qd^1 .. Z_qd^n).
LinearSystem tangency_system(const SystemSpec& spec, const ConstraintSet& level);

struct TangencyResult {
  LinearSystem system;
  Reduction reduction;
  std::vector<Expr> residuals;  // conditions on the base point, still unreduced against the level
};
TangencyResult tangency_step(const SystemSpec& spec, const ConstraintSet& level);

// Skinner-Rusk chain on (M_1, omega_H, eta). Throws VariableRankError when the
// Hessian (or a tangency block) has non-constant rank.
ConstraintChain run_algorithm(const SystemSpec& spec, const AlgorithmOptions& options = {});

// Generic presymplectic engine: a chart with a 2-form and a 1-form.
struct PresymplecticSystem {
  TwoFormField omega;
  OneFormField eta;
  Point base;
};

// Rows: i_Z Omega = 0, i_Z eta = 1, Z(psi) = 0 for cumulative psi; unknowns
// are all components of Z in the chart.
LinearSystem presymplectic_system(const PresymplecticSystem& sys, const ConstraintSet& level);
ConstraintChain run_presymplectic(const PresymplecticSystem& sys, const AlgorithmOptions& options = {});

PresymplecticSystem skinner_rusk_system(const SystemSpec& spec, int omega_sign = 1);
// (omega_L, dt) on J^1 pi.
PresymplecticSystem jet_system(const SystemSpec& spec);

// Matrix of v -> i_v Omega + (i_v eta) eta at a point.
Eigen::MatrixXd flat_map(const TwoFormField& omega, const OneFormField& eta, const Point& point);
// Columns span the tangent space of the level at the point.
Eigen::MatrixXd tangent_basis(const ConstraintSet& level, const Point& point);
// eta in flat(T_x M) for the level M through x.
bool eta_in_flat_image(const TwoFormField& omega, const OneFormField& eta, const ConstraintSet& level,
                       const Point& point, double tol = 1e-8);
FreeDirections free_directions(const TwoFormField& omega, const OneFormField& eta, const ConstraintSet& level);

}  // namespace srusk
