#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srusk/integrator.hpp"

namespace srusk {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool numeric_surrogate = false;  // identity checked pointwise instead of symbolically
  std::string detail;
  nlohmann::json witness = nlohmann::json::object();
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  int points = 50;        // rank samples
  int pullback_points = 10;  // M_2 samples for the pulled-back identity
  double h = 1e-3;
  double T = 10.0;
  double gap_tol = 1e-8;
  double el_residual_tol = 1e-8;
  double pullback_tol = 1e-12;
  int omega_sign = 1;  // -1 corrupts omega (negative control)
};

struct VerificationReport {
  std::string model;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool all_passed() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

// i_{d/dtau} omega_H = 0 and i_{d/dtau} eta = 0.
CheckResult check_kernel_direction(const SystemSpec& spec, int omega_sign = 1);
// Wedge identities for omega_H (symbolic for n <= 2) and rank bounds at sampled points.
CheckResult check_rank_relations(const SystemSpec& spec, int points, std::uint64_t seed, int omega_sign = 1);
// Cosymplectic (regular) or precosymplectic rank-r relations for (omega_L, dt).
CheckResult check_cosymplectic_L(const SystemSpec& spec, const RegularityReport& reg, int points, std::uint64_t seed);
// omega_H and pr_2^* omega_L agree after pullback to M_L.
CheckResult check_pullback_identity(const SystemSpec& spec, int points, std::uint64_t seed, double tol, int omega_sign = 1);
// i_Z omega_H = 0, i_Z eta = 1 and tangency, modulo the domain constraints.
CheckResult check_vector_field(const SystemSpec& spec, const VectorFieldSpec& z, std::uint64_t seed, int omega_sign = 1);
// Symbolic tangency residuals vanish exactly where eta lies in flat(T M).
CheckResult check_flat_agreement(const SystemSpec& spec, const ConstraintChain& chain, int omega_sign = 1);
// pr_2 maps each M_{l+1} into the independently computed P_l on J^1 pi.
CheckResult check_chain_correspondence(const SystemSpec& spec, const ConstraintChain& chain, std::uint64_t seed);
// Regular: projected flow vs the direct Euler-Lagrange integration.
// Singular: Euler-Lagrange residual along the projected flow.
CheckResult check_dynamic_equivalence(const SystemSpec& spec, const ConstraintChain& chain, const VectorFieldSpec& z,
                                      const std::vector<InitialCondition>& ics, const VerifyOptions& options);

// Independent reference: RK4 on (t, q, qd) with qdd from a numeric LU solve of
// the Hessian system. Returns states (t, q, qd) at every step.
std::vector<std::vector<double>> integrate_euler_lagrange(const SystemSpec& spec, double t0, const std::vector<double>& q0,
                                                          const std::vector<double>& qd0, double h, double T);

VerificationReport verify_all(const SystemSpec& spec, const VerifyOptions& options, const std::string& model_name = "");

}  // namespace srusk
