#include "srusk/json_io.hpp"

namespace srusk {

using nlohmann::json;

namespace {

json rendered(const std::vector<Expr>& es) {
  json a = json::array();
  for (const Expr& e : es) a.push_back(to_string(e));
  return a;
}

json point_json(const Chart& chart, const Point& p) {
  json o = json::object();
  for (const Coord& c : chart.coords()) o[c.name()] = p.get(c);
  return o;
}

std::string regularity_name(Regularity r) {
  switch (r) {
    case Regularity::Regular: return "regular";
    case Regularity::ConstantRankSingular: return "constant_rank_singular";
    case Regularity::VariableRank: return "variable_rank";
  }
  return "unknown";
}

}  // namespace

json to_json(const RegularityReport& reg) {
  json hess = json::array();
  for (const auto& row : reg.hessian) hess.push_back(rendered(row));
  json j = {{"classification", regularity_name(reg.classification)},
            {"description", reg.describe()},
            {"rank", reg.rank},
            {"rank_profile", reg.rank_profile},
            {"sign_change", reg.sign_change},
            {"hessian", hess}};
  j["determinant"] = reg.determinant ? json(to_string(*reg.determinant)) : json(nullptr);
  return j;
}

json to_json(const ConstraintChain& chain) {
  json levels = json::array();
  for (const auto& l : chain.levels) {
    json w = json::array();
    for (const Point& p : l.set.witnesses()) w.push_back(point_json(l.set.chart(), p));
    levels.push_back({{"level", l.level},
                      {"new_constraints", rendered(l.constraints)},
                      {"cumulative_constraints", rendered(l.set.constraints())},
                      {"witnesses", w}});
  }
  return {{"status", chain.status_string()},
          {"final_level", chain.final_level},
          {"diagnostic", chain.diagnostic},
          {"levels", levels},
          {"free_directions", {{"dimension", chain.free_directions.dimension()},
                               {"dimension_profile", chain.free_directions.dimension_profile},
                               {"basis", chain.free_directions.basis}}}};
}

json to_json(const VectorFieldSpec& z) {
  json comps = json::object();
  for (int i = 0; i < mixed_dim(z.n); ++i) comps[mixed_coord(i, z.n).name()] = to_string(z.components[static_cast<std::size_t>(i)]);
  return {{"mode", z.mode == ZMode::Raw ? "raw" : "graph_refined"},
          {"components", comps},
          {"order", [&] {
             json o = json::array();
             for (int i = 0; i < mixed_dim(z.n); ++i) o.push_back(mixed_coord(i, z.n).name());
             return o;
           }()},
          {"free_params", z.free_params},
          {"domain_level", z.domain_level},
          {"domain_constraints", rendered(z.domain.constraints())},
          {"unique", z.unique}};
}

json to_json(const ProjectedField& f) {
  json comps = json::object();
  json order = json::array();
  for (std::size_t i = 0; i < f.chart.size(); ++i) {
    comps[f.chart[i].name()] = to_string(f.components[i]);
    order.push_back(f.chart[i].name());
  }
  json j = {{"components", comps}, {"order", order}, {"free_params", f.free_params}};
  if (!f.warning.empty()) j["warning"] = f.warning;
  return j;
}

json to_json(const DriftSummary& d) {
  json per = json::array();
  for (const auto& e : d.per_constraint) per.push_back({{"constraint", e.constraint}, {"max", e.max}, {"mean", e.mean}});
  return {{"empty", d.empty}, {"max_drift", d.max_drift}, {"increasing_trend", d.increasing_trend}, {"per_constraint", per}};
}

json to_json(const Trajectory& traj, const DriftSummary& drift, const SimulationConfig& config) {
  json columns = json::array();
  for (int i = 0; i < mixed_dim(traj.n); ++i) columns.push_back(mixed_coord(i, traj.n).name());
  return {{"config",
           {{"model", config.model},
            {"seed", config.seed},
            {"ic", config.ic},
            {"h", traj.h},
            {"h_effective", traj.h_eff},
            {"T", traj.T},
            {"projection", traj.projection},
            {"bindings", traj.bindings},
            {"defaulted_bindings", traj.defaulted},
            {"ignored_bindings", config.ignored_bindings}}},
          {"columns", columns},
          {"samples", traj.states},
          {"drift", traj.drift},
          {"drift_report", to_json(drift)}};
}

}  // namespace srusk
