// srusk analyze|simulate|verify <file.lag>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "srusk/json_io.hpp"
#include "srusk/verification.hpp"

using namespace srusk;
using nlohmann::json;

namespace {

enum Exit { Ok = 0, Other = 1, ModelError = 2, NotStabilized = 3, BadIc = 4, VerifyFailed = 5 };

struct ModelError_ : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SRUSK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable SRUSK_SEED '" << env << "'\n";
    }
  }
  return 42;
}

SystemSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError_(path + ": cannot read file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    SystemSpec spec = parse_system(ss.str());
    validate(spec);
    return spec;
  } catch (const ParseError& e) {
    throw ModelError_(path + ":" + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError_(path + ": " + e.what());
  }
}

std::string model_name(const SystemSpec& spec, const std::string& path) {
  return spec.name.empty() ? std::filesystem::path(path).stem().string() : spec.name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

ConstraintChain analyzed_chain(const SystemSpec& spec, const RegularityReport& reg, std::uint64_t seed) {
  if (reg.classification == Regularity::VariableRank) throw VariableRankError("Hessian has variable rank");
  AlgorithmOptions opts;
  opts.seed = seed;
  ConstraintChain chain = run_algorithm(spec, opts);
  if (!chain.stabilized()) throw VariableRankError("constraint chain did not stabilize: " + chain.status_string() + " " + chain.diagnostic);
  return chain;
}

std::string plural(std::size_t k, const std::string& word) { return std::to_string(k) + " " + word + (k == 1 ? "" : "s"); }

int cmd_analyze(const std::string& file, std::uint64_t seed, const std::string& json_path) {
  SystemSpec spec = load(file);
  RegularityReport reg = hessian_report(spec, 32, seed);
  json out = {{"model", model_name(spec, file)}, {"seed", seed}, {"regularity", to_json(reg)}};
  ConstraintChain chain;
  try {
    chain = analyzed_chain(spec, reg, seed);
  } catch (const VariableRankError& e) {
    std::cout << reg.describe() << "; " << e.what() << "\n";
    out["error"] = e.what();
    if (!json_path.empty()) write_file(json_path, out.dump(2) + "\n");
    return NotStabilized;
  }
  const bool regular = reg.classification == Regularity::Regular;
  VectorFieldSpec z = solve_Z(spec, chain, regular ? ZMode::GraphRefined : ZMode::Raw);
  if (regular)
    std::cout << "Regular; chain stabilized at level " << chain.final_level << "; Z " << (z.unique ? "unique" : "not unique")
              << " on graph_L\n";
  else
    std::cout << reg.describe() << "; chain levels " << chain.final_level << "; " << plural(z.free_params.size(), "free parameter") << "\n";

  std::cout << "chain " << chain.status_string() << "\n";
  for (const auto& l : chain.levels) {
    std::cout << "  M" << l.level << ":";
    if (l.constraints.empty()) std::cout << " (no new constraints)";
    for (std::size_t i = 0; i < l.constraints.size(); ++i) std::cout << (i ? ", " : " ") << to_string(l.constraints[i]);
    std::cout << "\n";
  }
  std::cout << "Z (" << (regular ? "graph_refined" : "raw") << ", domain M" << z.domain_level << "):\n";
  for (int i = 0; i < mixed_dim(spec.n); ++i)
    std::cout << "  Z_" << mixed_coord(i, spec.n).name() << " = " << to_string(z.components[static_cast<std::size_t>(i)]) << "\n";
  if (!z.free_params.empty()) {
    std::cout << "free parameters:";
    for (const auto& u : z.free_params) std::cout << " " << u;
    std::cout << "\n";
  }

  out["chain"] = to_json(chain);
  out["vector_field"] = to_json(z);
  out["jet_projection"] = to_json(project_to_jet(spec, z));
  if (regular) out["dual_projection"] = to_json(project_to_dual(spec, z));
  if (!json_path.empty()) write_file(json_path, out.dump(2) + "\n");
  return Ok;
}

InitialCondition resolve_ic(const SystemSpec& spec, const std::string& ic) {
  if (ic.empty()) {
    if (spec.initial_conditions.empty()) throw InitialConditionError("no --ic given and the model declares no 'ic' block");
    return spec.initial_conditions.front();
  }
  if (const InitialCondition* named = spec.find_ic(ic)) return *named;
  std::vector<double> vals;
  std::stringstream ss(ic);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InitialConditionError("--ic '" + ic + "' is neither a declared label nor a list of numbers");
    }
  }
  const auto n = static_cast<std::size_t>(spec.n);
  if (vals.size() != 2 * n + 1)
    throw InitialConditionError("--ic needs t, q1..q" + std::to_string(n) + ", qd1..qd" + std::to_string(n) + " (" +
                                std::to_string(2 * n + 1) + " numbers), got " + std::to_string(vals.size()));
  InitialCondition out;
  out.label = ic;
  out.t = vals[0];
  out.q.assign(vals.begin() + 1, vals.begin() + 1 + static_cast<long>(n));
  out.qd.assign(vals.begin() + 1 + static_cast<long>(n), vals.end());
  return out;
}

struct SimulateArgs {
  std::string ic;
  double h = 1e-3;
  double T = 10.0;
  std::vector<std::string> binds;
  std::string out;
  bool no_projection = false;
};

int cmd_simulate(const std::string& file, std::uint64_t seed, const SimulateArgs& args) {
  SystemSpec spec = load(file);
  RegularityReport reg = hessian_report(spec, 32, seed);
  ConstraintChain chain = analyzed_chain(spec, reg, seed);
  const bool regular = reg.classification == Regularity::Regular;
  VectorFieldSpec z = solve_Z(spec, chain, regular ? ZMode::GraphRefined : ZMode::Raw);

  IntegrateOptions io;
  io.h = args.h;
  io.T = args.T;
  io.projection = !args.no_projection;
  SimulationConfig config;
  config.seed = seed;
  config.model = model_name(spec, file);
  for (const auto& b : args.binds) {
    auto eq = b.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--bind expects name=value, got '" + b + "'");
    std::string name = b.substr(0, eq);
    double v = std::stod(b.substr(eq + 1));
    if (std::find(z.free_params.begin(), z.free_params.end(), name) == z.free_params.end()) {
      std::cerr << "warning: " << name << " is not a free parameter of Z; binding ignored\n";
      config.ignored_bindings.push_back(name);
      continue;
    }
    io.bindings[name] = v;
  }
  InitialCondition ic = resolve_ic(spec, args.ic);
  config.ic = ic.label;
  Point x0 = lift_initial_condition(spec, z.domain, ic.t, ic.q, ic.qd);
  Trajectory traj = integrate(spec, z, x0, io);
  for (const auto& u : traj.defaulted) std::cerr << "warning: free parameter " << u << " defaulted to 0\n";
  DriftSummary drift = drift_report(spec, traj, z.domain.constraints());

  const std::string prefix = args.out.empty() ? config.model : args.out;
  write_file(prefix + ".csv", trajectory_csv(traj));
  write_file(prefix + ".json", to_json(traj, drift, config).dump(2) + "\n");
  std::cout << "wrote " << prefix << ".csv and " << prefix << ".json (" << traj.size() << " samples, h_eff "
            << format_number(traj.h_eff) << ", max drift " << format_number(drift.max_drift) << ")\n";
  return Ok;
}

int cmd_verify(const std::string& file, std::uint64_t seed, int points, bool flip, const std::string& report_path) {
  SystemSpec spec = load(file);
  VerifyOptions opts;
  opts.seed = seed;
  opts.points = points;
  opts.omega_sign = flip ? -1 : 1;
  VerificationReport rep = verify_all(spec, opts, model_name(spec, file));
  std::cout << rep.to_text();
  const std::string path = report_path.empty() ? model_name(spec, file) + ".verify.json" : report_path;
  write_file(path, rep.to_json().dump(2) + "\n");
  if (!rep.all_passed()) {
    std::cerr << "verification failed; report: " << path << "\n";
    return VerifyFailed;
  }
  return Ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skinner-Rusk analysis of time-dependent Lagrangians"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "random seed (default: SRUSK_SEED or 42)");

  std::string file;
  auto* analyze = app.add_subcommand("analyze", "regularity, constraint chain and Z");
  std::string analyze_json;
  analyze->add_option("file", file, ".lag model")->required();
  analyze->add_option("--seed", seed_flag, "random seed");
  analyze->add_option("--json", analyze_json, "write the analysis as JSON");

  auto* simulate = app.add_subcommand("simulate", "integrate Z from an initial condition");
  SimulateArgs sim;
  simulate->set_help_flag("--help", "print help");
  simulate->add_option("file", file, ".lag model")->required();
  simulate->add_option("--seed", seed_flag, "random seed");
  simulate->add_option("--ic", sim.ic, "ic label from the file, or \"t,q1..qn,qd1..qdn\"");
  simulate->add_option("--h", sim.h, "step size")->check(CLI::PositiveNumber);
  simulate->add_option("--T", sim.T, "horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--bind", sim.binds, "free parameter value, name=value (repeatable)");
  simulate->add_option("--out", sim.out, "output prefix for .csv and .json");
  simulate->add_flag("--no-projection", sim.no_projection, "do not re-impose constraints after each step");

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  int points = 50;
  bool flip = false;
  std::string report;
  verify->add_option("file", file, ".lag model")->required();
  verify->add_option("--seed", seed_flag, "random seed");
  verify->add_option("--points", points, "sample points for rank checks")->check(CLI::PositiveNumber);
  verify->add_option("--report", report, "JSON report path");
  verify->add_flag("--flip-omega-sign", flip, "negate the canonical form (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::uint64_t seed = resolve_seed(seed_flag);
  try {
    if (*analyze) return cmd_analyze(file, seed, analyze_json);
    if (*simulate) return cmd_simulate(file, seed, sim);
    if (*verify) return cmd_verify(file, seed, points, flip, report);
  } catch (const ModelError_& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ModelError;
  } catch (const VariableRankError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return NotStabilized;
  } catch (const InitialConditionError& e) {
    std::cerr << "error: inconsistent initial condition: " << e.what() << "\n";
    return BadIc;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Other;
  }
  return Other;
}
