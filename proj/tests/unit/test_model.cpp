#include <gtest/gtest.h>

#include <filesystem>

#include "corpus.hpp"

using namespace srusk;

TEST(Model, ParsesOscillator) {
  SystemSpec s = corpus::load_model("oscillator");
  EXPECT_EQ(s.n, 1);
  EXPECT_EQ(s.name, "oscillator");
  EXPECT_EQ(s.lagrangian, Expr(Rational(1, 2)) * pow(qd_(1), Rational(2)) - Expr(Rational(1, 2)) * pow(q_(1), Rational(2)));
  ASSERT_EQ(s.initial_conditions.size(), 1u);
  EXPECT_EQ(s.initial_conditions[0], (InitialCondition{"rest", 0.0, {1.0}, {0.0}}));
  EXPECT_NE(s.find_ic("rest"), nullptr);
  EXPECT_EQ(s.find_ic("other"), nullptr);
}

TEST(Model, ParametersAndDefaults) {
  SystemSpec s = corpus::load_model("td_oscillator");
  EXPECT_EQ(s.params.at("eps"), 0.1);
  SystemSpec d = parse_system("dim 1; param k; L = qd1^2 - k*q1^2;");
  EXPECT_EQ(d.params.at("k"), 0.0);
  EXPECT_EQ(d.base_point().params().at("k"), 0.0);
}

TEST(Model, TimeIsAllowedInL) {
  SystemSpec s = parse_system("dim 1; L = qd1^2/2 - t*q1;");
  EXPECT_TRUE(depends_on(s.lagrangian, Coord::time()));
}

TEST(Model, PositionedDiagnostics) {
  try {
    parse_system("dim 1;\nL = p1*qd1;\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 5);
    EXPECT_EQ(e.message(), "momentum coordinate not allowed in L");
    EXPECT_STREQ(e.what(), "2:5: momentum coordinate not allowed in L");
  }
}

TEST(Model, FreeParameterNamesAreReserved) {
  EXPECT_THROW(parse_system("dim 1; param u1 = 2; L = qd1^2;"), ParseError);
}

TEST(Model, InvalidFixturesAreRejectedWithPositions) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SRUSK_FIXTURES_DIR "/invalid")) {
    std::string text = corpus::read_file(entry.path().string());
    // First line: "# expect <line>:<col> <message fragment>"
    std::string header = text.substr(0, text.find('\n'));
    ASSERT_EQ(header.rfind("# expect ", 0), 0u) << entry.path();
    std::string expect = header.substr(9);
    std::string position = expect.substr(0, expect.find(' '));
    std::string fragment = expect.find(' ') == std::string::npos ? "" : expect.substr(expect.find(' ') + 1);
    try {
      validate(parse_system(text));
      ADD_FAILURE() << entry.path() << " was accepted";
    } catch (const ParseError& e) {
      EXPECT_EQ(std::to_string(e.line()) + ":" + std::to_string(e.column()), position) << entry.path() << ": " << e.what();
      EXPECT_NE(e.message().find(fragment), std::string::npos) << entry.path() << ": " << e.what();
    }
    ++seen;
  }
  EXPECT_GE(seen, 10);
}

TEST(Model, RoundTripCorpus) {
  for (const auto& name : corpus::models()) {
    SystemSpec s = corpus::load_model(name);
    EXPECT_EQ(parse_system(render_system(s)), s) << name;
  }
}

TEST(Model, RoundTripGenerated) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SystemSpec s = corpus::random_model(seed);
    std::string text = render_system(s);
    EXPECT_EQ(parse_system(text), s) << text;
    EXPECT_EQ(render_system(parse_system(text)), text);
  }
}

TEST(Model, ValidateCatchesBrokenSpecs) {
  SystemSpec s = corpus::load_model("oscillator");
  s.lagrangian = s.lagrangian + p_(1);
  EXPECT_THROW(validate(s), std::invalid_argument);
  SystemSpec t = corpus::load_model("oscillator");
  t.initial_conditions[0].q.push_back(1.0);
  EXPECT_THROW(validate(t), std::invalid_argument);
}

TEST(Model, StandaloneExpressionParser) {
  EXPECT_EQ(parse_expression("p1 - qd1 - q2"), p_(1) - qd_(1) - q_(2));
  EXPECT_EQ(parse_expression("tau + k*t"), tau_() + Expr::param("k") * t_());
  EXPECT_EQ(parse_expression("2^3"), Expr(8));
  EXPECT_THROW(parse_expression("q1 +"), ParseError);
}
