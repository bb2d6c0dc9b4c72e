#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "srusk/constraints.hpp"

namespace srusk {

enum class ZMode { Raw, GraphRefined };

// Solution Z of i_Z omega_H = 0, i_Z eta = 1 tangent to its domain.
struct VectorFieldSpec {
  int n = 0;
  ZMode mode = ZMode::Raw;
  std::vector<Expr> components;         // mixed chart order
  std::vector<std::string> free_params;  // u<B>, one per undetermined Z_qd^B
  int domain_level = 0;
  ConstraintSet domain;  // final level, plus tau = L - qd.dL/dqd when graph refined
  bool unique = false;   // the reduced linear system had no free column

  const Expr& component(Coord c) const { return components[static_cast<std::size_t>(mixed_index(c, n))]; }
};

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw: forced components, Z_qd from the tangency reduction on the final level
// (free columns become parameters u<B>), Z_tau from the energy balance.
// GraphRefined (regular only): Z_qd from the inverse Hessian, domain graph_L.
VectorFieldSpec solve_Z(const SystemSpec& spec, const ConstraintChain& chain, ZMode mode);

// Z_tau = Z(L - qd^A dL/dqd^A) given the other components.
Expr energy_balance(const SystemSpec& spec, const std::vector<Expr>& components);

// Right-hand side of the Euler-Lagrange equations solved for qdd (n <= 3
// symbolic via the adjugate; otherwise by symbolic row reduction).
std::vector<Expr> euler_lagrange_accelerations(const SystemSpec& spec);

struct ProjectedField {
  Chart chart;
  std::vector<Expr> components;
  std::vector<std::string> free_params;
  std::string warning;
};

// (1, qd, Z_qd) on J^1 pi.
ProjectedField project_to_jet(const SystemSpec& spec, const VectorFieldSpec& z);
// (1, qd, dL/dq, Z_qd) on (t, q, p, qd). Regular Lagrangians only.
ProjectedField project_to_dual(const SystemSpec& spec, const VectorFieldSpec& z);

}  // namespace srusk
