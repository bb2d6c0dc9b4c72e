#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "srusk/model.hpp"

namespace srusk::corpus {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SystemSpec load_model(const std::string& name) {
  SystemSpec spec = parse_system(read_file(std::string(SRUSK_MODELS_DIR) + "/" + name + ".lag"));
  validate(spec);
  return spec;
}

inline const std::vector<std::string>& models() {
  static const std::vector<std::string> names{"free_particle", "oscillator", "td_oscillator", "singular2", "degenerate"};
  return names;
}

inline const std::vector<std::string>& regular_corpus() {
  static const std::vector<std::string> names{"free_particle", "oscillator", "td_oscillator", "two_dof"};
  return names;
}

// Random expression over t, q, qd and the given parameters.
class ExprGenerator {
 public:
  ExprGenerator(int n, std::vector<std::string> params, std::uint64_t seed) : n_(n), params_(std::move(params)), rng_(seed) {}

  Expr leaf() {
    int k = pick(params_.empty() ? 4 : 5);
    switch (k) {
      case 0: return Expr(Rational(pick(19) - 9, 1 + pick(6)));
      case 1: return t_();
      case 2: return q_(1 + pick(n_));
      case 3: return qd_(1 + pick(n_));
      default: return Expr::param(params_[static_cast<std::size_t>(pick(static_cast<int>(params_.size())))]);
    }
  }

  Expr operator()(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    switch (pick(8)) {
      case 0: return (*this)(depth - 1) + (*this)(depth - 1);
      case 1: return (*this)(depth - 1) - (*this)(depth - 1);
      case 2:
      case 3: return (*this)(depth - 1) * (*this)(depth - 1);
      case 4: return pow((*this)(depth - 1), Rational(2 + pick(3)));
      case 5: return sin((*this)(depth - 1));
      case 6: return cos((*this)(depth - 1));
      default: return exp((*this)(depth - 1) * Expr(Rational(1, 4)));
    }
  }

  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng_); }
  double real() { return std::uniform_real_distribution<double>(-3.0, 3.0)(rng_); }

 private:
  int n_;
  std::vector<std::string> params_;
  std::mt19937_64 rng_;
};

inline SystemSpec random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SystemSpec spec;
  spec.n = 1 + static_cast<int>(rng() % 3);
  spec.name = "generated_" + std::to_string(seed);
  if (rng() % 2) spec.description = "seeded model " + std::to_string(seed);
  std::vector<std::string> params;
  for (int k = 0; k < static_cast<int>(rng() % 3); ++k) params.push_back("k" + std::to_string(k + 1));
  ExprGenerator gen(spec.n, params, seed ^ 0x5bd1e995);
  for (const auto& p : params) spec.params[p] = gen.real();
  // Kinetic part keeps most generated models regular; the rest is arbitrary.
  std::vector<Expr> terms;
  for (int a = 1; a <= spec.n; ++a) terms.push_back(Expr(Rational(1, 2)) * pow(qd_(a), Rational(2)));
  terms.push_back(gen(3));
  spec.lagrangian = add(std::move(terms));
  for (int i = 0; i < static_cast<int>(rng() % 3); ++i) {
    InitialCondition ic;
    ic.label = "ic" + std::to_string(i);
    ic.t = gen.real();
    for (int a = 0; a < spec.n; ++a) {
      ic.q.push_back(gen.real());
      ic.qd.push_back(gen.real());
    }
    spec.initial_conditions.push_back(ic);
  }
  return spec;
}

}  // namespace srusk::corpus
