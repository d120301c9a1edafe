#pragma once

#include <cmath>
#include <limits>

#include "pmm/rational.hpp"

namespace pmm {

// All dynamic programming runs over one of two weight domains.
//
// LogDomain: doubles holding log-probabilities, with -inf as the exact
// representation of probability zero. -inf is absorbing under mul and never
// produces NaN (we never add +inf). Equality classification uses an absolute
// tolerance on log values; strictness for node tests uses a wider margin so
// that "strict" is never claimed inside float noise.
//
// ExactDomain: nonnegative rationals with exact arithmetic. Used for
// discrete models whose probabilities were given as decimal/fraction
// strings; every comparison is exact.

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();
inline constexpr double kLogEqTol = 1e-12;      // equality classification
inline constexpr double kStrictMargin = 1e-10;  // node/barrier strictness

struct LogDomain {
  using Weight = double;
  static constexpr Weight zero() { return kLogZero; }
  static constexpr Weight one() { return 0.0; }
  static bool is_zero(Weight a) { return a == kLogZero; }
  static Weight mul(Weight a, Weight b) { return a + b; }
  static Weight div(Weight a, Weight b) { return is_zero(a) ? zero() : a - b; }
  static Weight max(Weight a, Weight b) { return a > b ? a : b; }
  // a and b represent the same value up to tolerance
  static bool eq(Weight a, Weight b) {
    if (is_zero(a) || is_zero(b)) return is_zero(a) && is_zero(b);
    return std::abs(a - b) <= kLogEqTol;
  }
  static bool lt(Weight a, Weight b) { return !eq(a, b) && a < b; }
  static bool le(Weight a, Weight b) { return eq(a, b) || a < b; }
  // strictly greater by more than the strictness margin
  static bool strictly_greater(Weight a, Weight b) {
    if (is_zero(a)) return false;
    if (is_zero(b)) return true;
    return a - b > kStrictMargin;
  }
  static double to_log(Weight a) { return a; }
};

struct ExactDomain {
  using Weight = Rational;
  static Weight zero() { return Rational(0); }
  static Weight one() { return Rational(1); }
  static bool is_zero(const Weight& a) { return a.is_zero(); }
  static Weight mul(const Weight& a, const Weight& b) { return a * b; }
  static Weight div(const Weight& a, const Weight& b) {
    return a.is_zero() ? Weight(0) : Weight(a / b);
  }
  static Weight max(const Weight& a, const Weight& b) { return a > b ? a : b; }
  static bool eq(const Weight& a, const Weight& b) { return a == b; }
  static bool lt(const Weight& a, const Weight& b) { return a < b; }
  static bool le(const Weight& a, const Weight& b) { return a <= b; }
  static bool strictly_greater(const Weight& a, const Weight& b) { return a > b; }
  static double to_log(const Weight& a) {
    if (a.is_zero()) return kLogZero;
    // log(num) - log(den) via double conversion of scaled parts
    const BigInt num = boost::multiprecision::numerator(a);
    const BigInt den = boost::multiprecision::denominator(a);
    const auto bits = [](const BigInt& v) { return boost::multiprecision::msb(v); };
    auto log_big = [&](const BigInt& v) {
      const unsigned b = bits(v);
      if (b <= 900) return std::log(v.convert_to<double>());
      const BigInt shifted = v >> (b - 512);
      return std::log(shifted.convert_to<double>()) + (b - 512) * std::log(2.0);
    };
    return log_big(num) - log_big(den);
  }
};

}  // namespace pmm
