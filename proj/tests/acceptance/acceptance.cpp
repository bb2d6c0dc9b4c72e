// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "corpus.hpp"
#include "srusk/verification.hpp"

using namespace srusk;

namespace {

int failures = 0;

void report(int k, bool ok, const std::string& detail) {
  std::cout << "AC" << k << " " << (ok ? "PASS" : "FAIL") << ": " << detail << std::endl;
  if (!ok) ++failures;
}

bool same_constraints(const std::vector<Expr>& got, const std::vector<Expr>& want) {
  if (got.size() != want.size()) return false;
  for (const Expr& w : want) {
    bool found = false;
    for (const Expr& g : got) found = found || is_zero(g - w) || is_zero(g + w);
    if (!found) return false;
  }
  return true;
}

std::string chain_text(const ConstraintChain& c) {
  std::string out;
  for (std::size_t k = 1; k < c.levels.size(); ++k) {
    out += k > 1 ? " -> {" : "{";
    for (std::size_t i = 0; i < c.levels[k].constraints.size(); ++i) out += (i ? ", " : "") + to_string(c.levels[k].constraints[i]);
    out += "}";
  }
  return out + " " + c.status_string();
}

VectorFieldSpec refined(const SystemSpec& s) { return solve_Z(s, run_algorithm(s), ZMode::GraphRefined); }

std::vector<std::string> with_two_dof() {
  auto names = corpus::models();
  names.push_back("two_dof");
  return names;
}

void ac1() {
  bool ok = true;
  std::string detail;
  for (const std::string name : {"oscillator", "td_oscillator"}) {
    auto start = std::chrono::steady_clock::now();
    SystemSpec s = corpus::load_model(name);
    ConstraintChain chain = run_algorithm(s);
    VectorFieldSpec z = solve_Z(s, chain, ZMode::GraphRefined);
    CheckResult r = check_dynamic_equivalence(s, chain, z, s.initial_conditions, VerifyOptions{});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double gap = r.witness["runs"][0].value("max_gap", INFINITY);
    bool pass = r.passed && gap <= 1e-8 && secs < 10.0;
    ok = ok && pass;
    detail += name + " gap " + format_number(gap) + " in " + format_number(std::round(secs * 1000) / 1000) + "s; ";
  }
  report(1, ok, detail + "tol 1e-8, h 1e-3, T 10");
}

void ac2() {
  bool ok = true;
  std::string detail;
  for (const auto& name : corpus::regular_corpus()) {
    SystemSpec s = corpus::load_model(name);
    VectorFieldSpec z = refined(s);
    CheckResult r = check_vector_field(s, z, 42);
    bool pass = r.passed && z.free_params.empty() && z.unique;
    ok = ok && pass;
    detail += name + (pass ? " ok; " : " FAILED; ");
  }
  report(2, ok, detail + "free_params empty, i_Z omega_H and tangency residuals vanish");
}

void ac3() {
  bool ok = true;
  std::string detail;
  for (const auto& name : with_two_dof()) {
    SystemSpec s = corpus::load_model(name);
    CheckResult r = check_rank_relations(s, 50, 42);
    bool symbolic = r.witness.contains("symbolic");
    ok = ok && r.passed && symbolic;
    detail += name + "(n=" + std::to_string(s.n) + ")" + (r.passed && symbolic ? " ok; " : " FAILED; ");
  }
  report(3, ok, detail + "symbolic wedges, 50 points off and on M_L");
}

void ac4() {
  SystemSpec s = corpus::load_model("singular2");
  ConstraintChain c = run_algorithm(s);
  // Golden chain: {p1 - qd1 - q2, p2} -> {qd1} -> stabilized.
  bool golden = c.stabilized() && c.levels.size() == 3 &&
                same_constraints(c.levels[1].constraints, {p_(1) - qd_(1) - q_(2), p_(2)}) &&
                same_constraints(c.levels[2].constraints, {qd_(1)});
  SystemSpec d = corpus::load_model("degenerate");
  ConstraintChain dc = run_algorithm(d);
  VectorFieldSpec dz = solve_Z(d, dc, ZMode::Raw);
  bool degenerate = dc.status_string() == "Stabilized(2)" && dz.free_params == std::vector<std::string>{"u1"};
  report(4, golden && degenerate,
         "singular2 " + chain_text(c) + (golden ? " matches" : " differs from") +
             " the golden {p1 - qd1 - q2, p2} -> {qd1} -> stabilized; degenerate " + dc.status_string() + " with " +
             std::to_string(dz.free_params.size()) + " free velocity parameter" + (degenerate ? " ok" : " FAILED"));
}

void ac5() {
  bool ok = true;
  double worst = 0;
  for (const auto& name : with_two_dof()) {
    CheckResult r = check_pullback_identity(corpus::load_model(name), 10, 42, 1e-12);
    ok = ok && r.passed;
    worst = std::max(worst, r.witness["max_abs_difference_on_TM2"].get<double>());
  }
  report(5, ok, "symbolic pullback identity on every model; numeric max " + format_number(worst) + " at 10 M_2 points (tol 1e-12)");
}

void ac6() {
  bool ok = true;
  std::string detail;
  for (const auto& name : corpus::regular_corpus()) {
    SystemSpec s = corpus::load_model(name);
    VectorFieldSpec z = refined(s);
    const InitialCondition& ic = s.initial_conditions.front();
    Trajectory tr = integrate(s, z, lift_initial_condition(s, z.domain, ic.t, ic.q, ic.qd), IntegrateOptions{});
    const Expr& ztau = z.component(Coord::tau());
    double balance = 0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
      double dtau = (trajectory_point(s, tr, i + 1).get(Coord::tau()) - trajectory_point(s, tr, i - 1).get(Coord::tau())) / (2 * tr.h_eff);
      balance = std::max(balance, std::abs(dtau - eval(ztau, trajectory_point(s, tr, i))));
    }
    bool pass = balance <= 1e-5;
    detail += name + " |dtau/dt - Z_tau| " + format_number(balance);
    if (!depends_on(s.lagrangian, Coord::time())) {
      Expr e = energy_function(s);
      double e0 = eval(e, trajectory_point(s, tr, 0));
      double drift = 0;
      for (std::size_t i = 0; i < tr.size(); ++i) drift = std::max(drift, std::abs(eval(e, trajectory_point(s, tr, i)) - e0));
      pass = pass && drift <= 1e-8;
      detail += ", E_L drift " + format_number(drift);
    }
    detail += "; ";
    ok = ok && pass;
  }
  report(6, ok, detail + "tol 1e-5 and 1e-8");
}

void ac7() {
  SystemSpec s = corpus::load_model("oscillator");
  VectorFieldSpec z = refined(s);
  auto err = [&](double h) {
    IntegrateOptions io;
    io.h = h;
    io.T = 10;
    Trajectory tr = integrate(s, z, lift_initial_condition(s, z.domain, 0, {1}, {0}), io);
    return std::abs(tr.states.back()[static_cast<std::size_t>(mixed_index(Coord::position(1), 1))] - std::cos(10.0));
  };
  double e1 = err(0.1), e2 = err(0.05);
  report(7, e1 / e2 >= 12.0, "endpoint error h=0.1 " + format_number(e1) + ", h=0.05 " + format_number(e2) + ", ratio " + format_number(e1 / e2));
}

void ac8() {
  int round_trips = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SystemSpec s = corpus::random_model(seed);
    try {
      if (parse_system(render_system(s)) == s) ++round_trips;
    } catch (const std::exception&) {
    }
  }
  int fixtures = 0, rejected = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SRUSK_FIXTURES_DIR "/invalid")) {
    ++fixtures;
    try {
      validate(parse_system(corpus::read_file(entry.path().string())));
    } catch (const ParseError& e) {
      if (e.line() >= 1 && e.column() >= 1) ++rejected;
    } catch (const std::exception&) {
    }
  }
  report(8, round_trips == 20 && fixtures > 0 && rejected == fixtures,
         std::to_string(round_trips) + "/20 generated models round-trip; " + std::to_string(rejected) + "/" + std::to_string(fixtures) +
             " invalid fixtures rejected with line:column");
}

}  // namespace

int main() {
  for (auto* f : {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8}) {
    try {
      f();
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "exception: " << e.what() << std::endl;
    }
  }
  return failures == 0 ? 0 : 1;
}
