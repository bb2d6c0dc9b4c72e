#pragma once

#include <nlohmann/json.hpp>

#include "srusk/integrator.hpp"

namespace srusk {

nlohmann::json to_json(const RegularityReport& reg);
// Levels with rendered constraints and witness points in the chain's chart.
nlohmann::json to_json(const ConstraintChain& chain);
nlohmann::json to_json(const VectorFieldSpec& z);
nlohmann::json to_json(const ProjectedField& f);
nlohmann::json to_json(const DriftSummary& d);

struct SimulationConfig {
  std::uint64_t seed = 42;
  std::string model;
  std::string ic;
  std::vector<std::string> ignored_bindings;
};

// Trajectory samples keyed by coordinate, drift, and the effective configuration.
nlohmann::json to_json(const Trajectory& traj, const DriftSummary& drift, const SimulationConfig& config);

}  // namespace srusk
