#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nrstream {

// Exact rational with canonical reduced form (den > 0, gcd(|num|, den) = 1).
// Confidences are sums of fractions whose denominators divide
// ell^t * 4 * k * (q-1) * N_inner, so magnitudes stay small; intermediates
// go through __int128 and overflow of the reduced result throws rather than
// wrapping silently.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) { *this = make(n, d); }

  static Rational make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    Rational r;
    r.num = narrow(n);
    r.den = narrow(d);
    return r;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return make((__int128)a.num * b.den + (__int128)b.num * a.den,
                (__int128)a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return make((__int128)a.num * b.den - (__int128)b.num * a.den,
                (__int128)a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::domain_error("Rational: division by zero");
    return make((__int128)a.num * b.den, (__int128)a.den * b.num);
  }
  Rational operator-() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  bool negative() const { return num < 0; }

  double to_double() const { return (double)num / (double)den; }

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }

  static Rational clamp(const Rational& v, const Rational& lo, const Rational& hi) {
    if (v < lo) return lo;
    if (hi < v) return hi;
    return v;
  }

 private:
  static constexpr __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }
  static std::int64_t narrow(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN)
      throw std::overflow_error("Rational: reduced value exceeds 64 bits");
    return (std::int64_t)v;
  }
};

}  // namespace nrstream
