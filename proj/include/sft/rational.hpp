#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

#include "sft/errors.hpp"

namespace sft {

// Exact rational with 64-bit numerator and denominator, normalized so that
// den > 0 and gcd(|num|, den) = 1. Arithmetic that would leave the 64-bit
// range fails loudly instead of wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static std::int64_t clamp64(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
      fail(Errc::internal_inconsistency,
           std::string("rational arithmetic overflow in ") + what);
    return static_cast<std::int64_t>(v);
  }

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) fail(Errc::bad_parameter, "rational with zero denominator");
    if (d < 0) {
      if (n == INT64_MIN || d == INT64_MIN)
        fail(Errc::internal_inconsistency, "rational arithmetic overflow in make");
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return Rational{n, d};
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const __int128 n = static_cast<__int128>(a.num) * b.den +
                       static_cast<__int128>(b.num) * a.den;
    const __int128 d = static_cast<__int128>(a.den) * b.den;
    const __int128 g = gcd128(n, d);
    return make(clamp64(n / g, "add"), clamp64(d / g, "add"));
  }

  friend Rational operator-(const Rational& a) { return Rational{-a.num, a.den}; }

  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }

  friend Rational operator*(const Rational& a, const Rational& b) {
    const __int128 n = static_cast<__int128>(a.num) * b.num;
    const __int128 d = static_cast<__int128>(a.den) * b.den;
    const __int128 g = gcd128(n, d);
    return make(clamp64(n / g, "multiply"), clamp64(d / g, "multiply"));
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

  bool is_zero() const { return num == 0; }

  std::string to_string() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 r = a % b;
      a = b;
      b = r;
    }
    return a == 0 ? 1 : a;
  }
};

}  // namespace sft
