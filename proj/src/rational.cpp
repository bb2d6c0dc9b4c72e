#include "srusk/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace srusk {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = make(num, den);
}

Rational Rational::make(__int128 num, __int128 den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits64(num) || !fits64(den)) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const { return make(-static_cast<__int128>(num_), den_); }

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                        static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<__int128>(a.num_) * b.num_,
                        static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("division by zero");
  return Rational::make(static_cast<__int128>(a.num_) * b.den_,
                        static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
  __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::pow(std::int64_t exponent) const {
  if (exponent < 0) {
    if (num_ == 0) throw std::domain_error("zero raised to a negative power");
    return Rational(1) / pow(-exponent);
  }
  Rational result(1);
  Rational base = *this;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Rational Rational::from_decimal(const std::string& text) {
  std::size_t i = 0;
  __int128 mantissa = 0;
  int scale = 0;
  bool any_digit = false;
  auto push_digit = [&](char c) {
    mantissa = mantissa * 10 + (c - '0');
    if (mantissa > std::numeric_limits<std::int64_t>::max())
      throw std::overflow_error("numeric literal too large: " + text);
    any_digit = true;
  };
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) push_digit(text[i++]);
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      push_digit(text[i++]);
      --scale;
    }
  }
  if (!any_digit) throw std::invalid_argument("malformed numeric literal: " + text);
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    int sign = 1;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) sign = text[i++] == '-' ? -1 : 1;
    int exp = 0;
    bool exp_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      exp = exp * 10 + (text[i++] - '0');
      exp_digit = true;
      if (exp > 40) throw std::overflow_error("numeric literal exponent too large: " + text);
    }
    if (!exp_digit) throw std::invalid_argument("malformed numeric literal: " + text);
    scale += sign * exp;
  }
  if (i != text.size()) throw std::invalid_argument("malformed numeric literal: " + text);
  Rational r = make(mantissa, 1);
  return r * Rational(10).pow(scale);
}

}  // namespace srusk
