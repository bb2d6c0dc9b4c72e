#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srusk/expr.hpp"
#include "srusk/model.hpp"

namespace srusk {

using ExprMatrix = std::vector<std::vector<Expr>>;

enum class Regularity { Regular, ConstantRankSingular, VariableRank };

struct RegularityReport {
  ExprMatrix hessian;              // d^2 L / dqd^A dqd^B
  std::optional<Expr> determinant; // symbolic, n <= 3
  std::vector<int> rank_profile;   // numeric rank at each sample
  Regularity classification = Regularity::Regular;
  int rank = 0;                    // n when Regular, r when ConstantRankSingular
  // The rank is constant across samples but the product of the nonzero
  // eigenvalues changes sign, so the rank drops on a hypersurface in between.
  bool sign_change = false;

  std::string describe() const;
};

RegularityReport hessian_report(const SystemSpec& spec, int samples = 32, std::uint64_t seed = 42);

// Image of Leg_L x_E id: p_A = dL/dqd^A, tau = L - qd^A dL/dqd^A.
struct LegendreGraph {
  std::vector<Expr> momenta;
  Expr tau;
  // p_A and tau as expressions in (t, q, qd).
  std::map<Coord, Expr> embedding() const;
  // Completes a point whose t, q, qd (and params) are set.
  Point embed(const Point& jet_point) const;
};

LegendreGraph legendre_graph(const SystemSpec& spec);

// E_L = qd^A dL/dqd^A - L.
Expr energy_function(const SystemSpec& spec);

// Symbolic determinant by cofactor expansion and adjugate (intended for n <= 3).
Expr determinant(const ExprMatrix& m);
ExprMatrix adjugate(const ExprMatrix& m);

ExprMatrix hessian_matrix(const SystemSpec& spec);

}  // namespace srusk
