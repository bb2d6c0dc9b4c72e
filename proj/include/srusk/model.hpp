#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srusk/expr.hpp"

namespace srusk {

struct InitialCondition {
  std::string label;
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> qd;

  friend bool operator==(const InitialCondition&, const InitialCondition&) = default;
};

// A parsed `.lag` model: a Lagrangian on J^1pi with parameters and labeled
// initial data.
struct SystemSpec {
  int n = 0;
  Expr lagrangian;
  std::map<std::string, double> params;
  std::vector<InitialCondition> initial_conditions;
  std::string name;
  std::string description;

  // A point of dimension n with every parameter bound to its default.
  Point base_point() const;
  const InitialCondition* find_ic(std::string_view label) const;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Grammar (statements end with ';', '#' starts a line comment):
//   dim <n>;
//   param <name> [= <number>];
//   L = <expr>;
//   ic <label>: t=<number>, q1=<number>, ..., qd1=<number>, ...;
//   name "<text>";  description "<text>";
SystemSpec parse_system(std::string_view source);
std::string render_system(const SystemSpec& spec);

// Throws std::invalid_argument if the spec breaks a SystemSpec invariant.
void validate(const SystemSpec& spec);

// Standalone expression parser: t, tau, q<k>, qd<k>, p<k> are coordinates,
// any other identifier is a parameter.
Expr parse_expression(std::string_view text);

}  // namespace srusk
