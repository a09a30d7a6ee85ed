#ifndef CYLFIN_RATIONAL_HPP_
#define CYLFIN_RATIONAL_HPP_

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>

namespace cylfin {

// Exact rational with overflow-checked arithmetic. Operations that would
// overflow int64 return nullopt; callers fall back to floating point.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  bool is_integer() const { return den == 1; }
  bool is_zero() const { return num == 0; }
  bool is_one() const { return num == 1 && den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }

  static std::optional<Rational> make_checked(__int128 n, __int128 d) {
    if (d == 0) return std::nullopt;
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 an = n < 0 ? -n : n;
    std::int64_t g = gcd128(an, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) return std::nullopt;
    Rational r;
    r.num = static_cast<std::int64_t>(n);
    r.den = static_cast<std::int64_t>(d);
    if (r.num == 0) r.den = 1;
    return r;
  }

  static std::optional<Rational> add(const Rational& a, const Rational& b) {
    return make_checked((__int128)a.num * b.den + (__int128)b.num * a.den,
                        (__int128)a.den * b.den);
  }
  static std::optional<Rational> sub(const Rational& a, const Rational& b) {
    return make_checked((__int128)a.num * b.den - (__int128)b.num * a.den,
                        (__int128)a.den * b.den);
  }
  static std::optional<Rational> mul(const Rational& a, const Rational& b) {
    return make_checked((__int128)a.num * b.num, (__int128)a.den * b.den);
  }
  static std::optional<Rational> div(const Rational& a, const Rational& b) {
    if (b.num == 0) return std::nullopt;
    return make_checked((__int128)a.num * b.den, (__int128)a.den * b.num);
  }

  // Integer powers of rationals, checked.
  static std::optional<Rational> pow_int(const Rational& base, std::int64_t e) {
    Rational b = base;
    if (e < 0) {
      if (b.num == 0) return std::nullopt;
      b = Rational(base.den, base.num);
      e = -e;
    }
    Rational acc(1);
    for (std::int64_t i = 0; i < e; ++i) {
      auto next = mul(acc, b);
      if (!next) return std::nullopt;
      acc = *next;
    }
    return acc;
  }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static std::int64_t gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a > INT64_MAX ? 1 : static_cast<std::int64_t>(a);
  }
};

}  // namespace cylfin

#endif  // CYLFIN_RATIONAL_HPP_
