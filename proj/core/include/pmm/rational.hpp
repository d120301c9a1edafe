#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace pmm {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Parses a decimal string ("0.6875", "1e-3", "-2.5e+1") or a fraction
// string ("11/14") into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw std::invalid_argument("not a decimal or fraction: '" + std::string(text) + "'"); };
  if (text.empty()) fail();

  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const std::string num(text.substr(0, slash));
    const std::string den(text.substr(slash + 1));
    if (num.empty() || den.empty()) fail();
    BigInt n(num), d(den);
    if (d.is_zero()) fail();
    return Rational(n, d);
  }

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  BigInt mantissa = 0;
  long frac_digits = 0;
  bool any_digit = false;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      any_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      fail();
    }
  }
  if (!any_digit) fail();
  long exponent = 0;
  if (pos < text.size()) {  // at 'e'
    ++pos;
    if (pos >= text.size()) fail();
    bool exp_neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
      exp_neg = text[pos] == '-';
      ++pos;
    }
    if (pos >= text.size()) fail();
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c < '0' || c > '9') fail();
      exponent = exponent * 10 + (c - '0');
      if (exponent > 100000) fail();
    }
    if (exp_neg) exponent = -exponent;
  }
  exponent -= frac_digits;
  Rational value(mantissa);
  if (exponent > 0) {
    value *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent)));
  } else if (exponent < 0) {
    value /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-exponent)));
  }
  if (negative) value = -value;
  return value;
}

inline std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace pmm
