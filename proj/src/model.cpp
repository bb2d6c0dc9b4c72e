#include "srusk/model.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <set>

namespace srusk {

namespace {

enum class Tok { Ident, Number, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token tok;
      tok.line = line_;
      tok.col = col_;
      if (pos_ >= src_.size()) {
        tok.kind = Tok::End;
        out.push_back(tok);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          tok.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        tok.kind = Tok::Number;
        lex_number(tok);
      } else if (c == '"') {
        tok.kind = Tok::String;
        advance();
        while (true) {
          if (pos_ >= src_.size() || src_[pos_] == '\n') throw ParseError(tok.line, tok.col, "unterminated string");
          char ch = advance();
          if (ch == '"') break;
          if (ch == '\\') {
            if (pos_ >= src_.size()) throw ParseError(tok.line, tok.col, "unterminated string");
            char esc = advance();
            if (esc == 'n') ch = '\n';
            else if (esc == '"' || esc == '\\') ch = esc;
            else throw ParseError(line_, col_ - 1, std::string("unknown escape \\") + esc);
          }
          tok.text += ch;
        }
      } else if (std::string_view(";:,=+-*/^()").find(c) != std::string_view::npos) {
        tok.kind = Tok::Symbol;
        tok.text = std::string(1, advance());
      } else {
        throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
      }
      out.push_back(tok);
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& tok) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) tok.text += advance();
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      tok.text += advance();
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        while (pos_ < look) tok.text += advance();
        digits();
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Syntax tree for expressions, resolved against the declarations afterwards.
struct Ast {
  enum class Kind { Number, Ident, Call, Neg, Binary } kind = Kind::Number;
  std::string text;  // number literal, identifier, function name or operator
  std::vector<Ast> children;
  int line = 0;
  int col = 0;
};

std::optional<int> suffix_index(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string_view digits = name.substr(prefix.size());
  for (char c : digits)
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  if (digits.size() > 1 && digits[0] == '0') return std::nullopt;
  int v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return v;
}

// Coordinate spelled by an identifier, if any.
std::optional<Coord> coordinate_name(std::string_view name, int* index_out) {
  if (name == "t") return Coord::time();
  if (name == "tau") return Coord::tau();
  if (auto k = suffix_index(name, "qd")) {
    *index_out = *k;
    return Coord{CoordKind::Velocity, *k};
  }
  if (auto k = suffix_index(name, "q")) {
    *index_out = *k;
    return Coord{CoordKind::Position, *k};
  }
  if (auto k = suffix_index(name, "p")) {
    *index_out = *k;
    return Coord{CoordKind::Momentum, *k};
  }
  return std::nullopt;
}

bool is_function_name(std::string_view s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "log" || s == "sqrt";
}

bool is_keyword(std::string_view s) {
  return s == "dim" || s == "param" || s == "L" || s == "ic" || s == "name" || s == "description";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  bool at_symbol(char c) const { return peek().kind == Tok::Symbol && peek().text[0] == c; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const Token& tok, const std::string& msg) const { throw ParseError(tok.line, tok.col, msg); }

  std::string describe(const Token& tok) const {
    switch (tok.kind) {
      case Tok::End: return "end of input";
      case Tok::String: return "string \"" + tok.text + "\"";
      default: return "'" + tok.text + "'";
    }
  }

  void expect_symbol(char c) {
    if (!at_symbol(c)) fail(peek(), std::string("expected '") + c + "', found " + describe(peek()));
    next();
  }

  Token expect_ident() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected identifier, found " + describe(peek()));
    return next();
  }

  double signed_number() {
    const Token& start = peek();
    double sign = 1.0;
    if (at_symbol('-') || at_symbol('+')) {
      sign = next().text == "-" ? -1.0 : 1.0;
    }
    if (peek().kind != Tok::Number) fail(peek(), "expected number, found " + describe(peek()));
    const Token& tok = next();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) fail(start, "malformed number '" + tok.text + "'");
    return sign * v;
  }

  Ast expression() {
    Ast lhs = term();
    while (at_symbol('+') || at_symbol('-')) {
      const Token& op = next();
      Ast rhs = term();
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

 private:
  Ast binary(const Token& op, Ast lhs, Ast rhs) {
    Ast a;
    a.kind = Ast::Kind::Binary;
    a.text = op.text;
    a.line = op.line;
    a.col = op.col;
    a.children.push_back(std::move(lhs));
    a.children.push_back(std::move(rhs));
    return a;
  }

  Ast term() {
    Ast lhs = unary();
    while (at_symbol('*') || at_symbol('/')) {
      const Token& op = next();
      Ast rhs = unary();
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Ast unary() {
    if (at_symbol('-') || at_symbol('+')) {
      const Token& op = next();
      Ast inner = unary();
      if (op.text == "+") return inner;
      Ast a;
      a.kind = Ast::Kind::Neg;
      a.line = op.line;
      a.col = op.col;
      a.children.push_back(std::move(inner));
      return a;
    }
    return power();
  }

  Ast power() {
    Ast base = primary();
    if (at_symbol('^')) {
      const Token& op = next();
      Ast exponent = unary();
      return binary(op, std::move(base), std::move(exponent));
    }
    return base;
  }

  Ast primary() {
    const Token& tok = peek();
    Ast a;
    a.line = tok.line;
    a.col = tok.col;
    if (tok.kind == Tok::Number) {
      a.kind = Ast::Kind::Number;
      a.text = next().text;
      return a;
    }
    if (tok.kind == Tok::Ident) {
      a.text = next().text;
      if (at_symbol('(')) {
        next();
        a.kind = Ast::Kind::Call;
        a.children.push_back(expression());
        expect_symbol(')');
      } else {
        a.kind = Ast::Kind::Ident;
      }
      return a;
    }
    if (at_symbol('(')) {
      next();
      Ast inner = expression();
      expect_symbol(')');
      return inner;
    }
    fail(tok, "expected expression, found " + describe(tok));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Identifier policy used while turning an Ast into an Expr.
struct Resolver {
  // Returns the expression for an identifier or throws ParseError.
  std::function<Expr(const Ast&)> ident;

  Expr operator()(const Ast& a) const {
    switch (a.kind) {
      case Ast::Kind::Number:
        try {
          return Expr(Rational::from_decimal(a.text));
        } catch (const std::exception& e) {
          throw ParseError(a.line, a.col, e.what());
        }
      case Ast::Kind::Ident: return ident(a);
      case Ast::Kind::Call: {
        Expr arg = (*this)(a.children[0]);
        try {
          if (a.text == "sin") return sin(arg);
          if (a.text == "cos") return cos(arg);
          if (a.text == "exp") return exp(arg);
          if (a.text == "log") return log(arg);
          if (a.text == "sqrt") return sqrt(arg);
        } catch (const std::exception& e) {
          throw ParseError(a.line, a.col, e.what());
        }
        throw ParseError(a.line, a.col, "unknown function '" + a.text + "'");
      }
      case Ast::Kind::Neg: return -(*this)(a.children[0]);
      case Ast::Kind::Binary: {
        Expr l = (*this)(a.children[0]);
        Expr r = (*this)(a.children[1]);
        try {
          switch (a.text[0]) {
            case '+': return l + r;
            case '-': return l - r;
            case '*': return l * r;
            case '/':
              if (r.is_zero_constant()) throw std::domain_error("division by zero");
              return l / r;
            case '^':
              if (!r.is_const()) throw std::invalid_argument("exponent must be a rational constant");
              return pow(l, r.value());
          }
        } catch (const ParseError&) {
          throw;
        } catch (const std::exception& e) {
          throw ParseError(a.children[1].line, a.children[1].col, e.what());
        }
      }
    }
    throw ParseError(a.line, a.col, "malformed expression");
  }
};

void check_no_calls_to_unknown(const Ast& a) {
  if (a.kind == Ast::Kind::Call && !is_function_name(a.text))
    throw ParseError(a.line, a.col, "unknown function '" + a.text + "'");
  for (const auto& c : a.children) check_no_calls_to_unknown(c);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// u<k> names the free velocity parameters of singular dynamics.
bool reserved_symbol(std::string_view name) {
  int idx = 0;
  return is_keyword(name) || is_function_name(name) || coordinate_name(name, &idx).has_value() ||
         suffix_index(name, "u").has_value();
}

}  // namespace

Point SystemSpec::base_point() const {
  Point p(n);
  for (const auto& [k, v] : params) p.set_param(k, v);
  return p;
}

const InitialCondition* SystemSpec::find_ic(std::string_view label) const {
  for (const auto& ic : initial_conditions)
    if (ic.label == label) return &ic;
  return nullptr;
}

SystemSpec parse_system(std::string_view source) {
  Parser p(Lexer(source).run());
  SystemSpec spec;
  std::optional<Token> dim_tok;
  std::optional<Ast> lagrangian;
  Token lagrangian_tok;
  bool have_name = false;
  bool have_description = false;

  struct PendingIc {
    Token label_tok;
    std::vector<std::pair<Token, double>> entries;
  };
  std::vector<PendingIc> pending_ics;

  while (!p.at_end()) {
    Token kw = p.expect_ident();
    if (kw.text == "dim") {
      if (dim_tok) p.fail(kw, "duplicate 'dim' declaration");
      if (p.peek().kind != Tok::Number) p.fail(p.peek(), "expected fibre dimension, found " + p.describe(p.peek()));
      Token num = p.next();
      int n = 0;
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), n);
      if (ec != std::errc() || ptr != num.text.data() + num.text.size() || n < 1)
        p.fail(num, "fibre dimension must be a positive integer");
      spec.n = n;
      dim_tok = kw;
    } else if (kw.text == "param") {
      Token name = p.expect_ident();
      if (reserved_symbol(name.text)) p.fail(name, "parameter name '" + name.text + "' collides with a reserved name");
      if (spec.params.count(name.text)) p.fail(name, "duplicate parameter '" + name.text + "'");
      double value = 0.0;
      if (p.at_symbol('=')) {
        p.next();
        value = p.signed_number();
      }
      spec.params[name.text] = value;
    } else if (kw.text == "L") {
      if (lagrangian) p.fail(kw, "duplicate Lagrangian");
      p.expect_symbol('=');
      lagrangian_tok = kw;
      lagrangian = p.expression();
    } else if (kw.text == "ic") {
      PendingIc ic;
      ic.label_tok = p.expect_ident();
      for (const auto& other : pending_ics)
        if (other.label_tok.text == ic.label_tok.text) p.fail(ic.label_tok, "duplicate initial condition '" + ic.label_tok.text + "'");
      p.expect_symbol(':');
      while (true) {
        Token key = p.expect_ident();
        p.expect_symbol('=');
        ic.entries.emplace_back(key, p.signed_number());
        if (!p.at_symbol(',')) break;
        p.next();
      }
      pending_ics.push_back(std::move(ic));
    } else if (kw.text == "name" || kw.text == "description") {
      bool& seen = kw.text == "name" ? have_name : have_description;
      if (seen) p.fail(kw, "duplicate '" + kw.text + "'");
      if (p.peek().kind != Tok::String) p.fail(p.peek(), "expected string, found " + p.describe(p.peek()));
      (kw.text == "name" ? spec.name : spec.description) = p.next().text;
      seen = true;
    } else {
      p.fail(kw, "unknown statement '" + kw.text + "'");
    }
    p.expect_symbol(';');
  }

  const Token& eof = p.peek();
  if (!dim_tok) p.fail(eof, "missing 'dim' declaration");
  if (!lagrangian) p.fail(eof, "missing Lagrangian 'L = ...'");

  check_no_calls_to_unknown(*lagrangian);
  Resolver resolve;
  resolve.ident = [&](const Ast& a) -> Expr {
    int idx = 0;
    if (auto c = coordinate_name(a.text, &idx)) {
      switch (c->kind) {
        case CoordKind::Tau: throw ParseError(a.line, a.col, "coordinate tau not allowed in L");
        case CoordKind::Momentum: throw ParseError(a.line, a.col, "momentum coordinate not allowed in L");
        case CoordKind::Time: return Expr::var(*c);
        default:
          if (idx < 1 || idx > spec.n)
            throw ParseError(a.line, a.col, "coordinate " + a.text + " exceeds declared dimension " + std::to_string(spec.n));
          return Expr::var(*c);
      }
    }
    if (is_function_name(a.text)) throw ParseError(a.line, a.col, "function '" + a.text + "' used without arguments");
    if (spec.params.count(a.text)) return Expr::param(a.text);
    throw ParseError(a.line, a.col, "undeclared symbol '" + a.text + "'");
  };
  spec.lagrangian = resolve(*lagrangian);

  for (const auto& pic : pending_ics) {
    InitialCondition ic;
    ic.label = pic.label_tok.text;
    ic.q.assign(static_cast<std::size_t>(spec.n), 0.0);
    ic.qd.assign(static_cast<std::size_t>(spec.n), 0.0);
    std::set<std::string> seen;
    for (const auto& [key, value] : pic.entries) {
      if (!seen.insert(key.text).second) p.fail(key, "duplicate entry '" + key.text + "' in initial condition");
      int idx = 0;
      auto c = coordinate_name(key.text, &idx);
      if (!c || c->kind == CoordKind::Tau || c->kind == CoordKind::Momentum)
        p.fail(key, "initial condition entries must be t, q<k> or qd<k>, found '" + key.text + "'");
      if (c->kind == CoordKind::Time) {
        ic.t = value;
        continue;
      }
      if (idx < 1 || idx > spec.n)
        p.fail(key, "coordinate " + key.text + " exceeds declared dimension " + std::to_string(spec.n));
      (c->kind == CoordKind::Position ? ic.q : ic.qd)[static_cast<std::size_t>(idx - 1)] = value;
    }
    for (int a = 1; a <= spec.n; ++a) {
      for (const char* prefix : {"q", "qd"}) {
        std::string k = prefix + std::to_string(a);
        if (!seen.count(k)) p.fail(pic.label_tok, "initial condition '" + ic.label + "' is missing " + k);
      }
    }
    spec.initial_conditions.push_back(std::move(ic));
  }
  return spec;
}

std::string render_system(const SystemSpec& spec) {
  std::string out;
  if (!spec.name.empty()) out += "name " + quote(spec.name) + ";\n";
  if (!spec.description.empty()) out += "description " + quote(spec.description) + ";\n";
  out += "dim " + std::to_string(spec.n) + ";\n";
  for (const auto& [k, v] : spec.params) out += "param " + k + " = " + format_double(v) + ";\n";
  out += "L = " + to_string(spec.lagrangian) + ";\n";
  for (const auto& ic : spec.initial_conditions) {
    out += "ic " + ic.label + ": t=" + format_double(ic.t);
    for (int a = 1; a <= spec.n; ++a) out += ", q" + std::to_string(a) + "=" + format_double(ic.q[static_cast<std::size_t>(a - 1)]);
    for (int a = 1; a <= spec.n; ++a) out += ", qd" + std::to_string(a) + "=" + format_double(ic.qd[static_cast<std::size_t>(a - 1)]);
    out += ";\n";
  }
  return out;
}

void validate(const SystemSpec& spec) {
  if (spec.n < 1) throw std::invalid_argument("fibre dimension must be positive");
  for (const auto& c : coords_of(spec.lagrangian)) {
    if (c.kind == CoordKind::Tau || c.kind == CoordKind::Momentum)
      throw std::invalid_argument("Lagrangian depends on " + c.name() + "; it must live on J^1pi");
    c.check(spec.n);
  }
  for (const auto& name : params_of(spec.lagrangian))
    if (!spec.params.count(name)) throw std::invalid_argument("undeclared parameter " + name);
  for (const auto& ic : spec.initial_conditions)
    if (ic.q.size() != static_cast<std::size_t>(spec.n) || ic.qd.size() != static_cast<std::size_t>(spec.n))
      throw std::invalid_argument("initial condition " + ic.label + " has wrong dimension");
}

Expr parse_expression(std::string_view text) {
  Parser p(Lexer(text).run());
  Ast a = p.expression();
  if (!p.at_end()) p.fail(p.peek(), "unexpected " + p.describe(p.peek()) + " after expression");
  check_no_calls_to_unknown(a);
  Resolver resolve;
  resolve.ident = [](const Ast& node) -> Expr {
    int idx = 0;
    if (auto c = coordinate_name(node.text, &idx)) {
      if (c->indexed() && idx < 1) throw ParseError(node.line, node.col, "coordinate index must be >= 1");
      return Expr::var(*c);
    }
    if (is_function_name(node.text)) throw ParseError(node.line, node.col, "function '" + node.text + "' used without arguments");
    return Expr::param(node.text);
  };
  return resolve(a);
}

}  // namespace srusk
