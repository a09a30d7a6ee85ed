#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cylfin/expr.hpp"

using namespace cylfin;

namespace {
double ev(const Expression& e, double x0, double r, double s, double z) {
  return evaluate(e, {{"x0", x0}, {"r", r}, {"s", s}, {"z", z}});
}
}  // namespace

TEST_CASE("parse/print round-trip is structurally stable") {
  for (const char* text : {
           "sqrt(1 + r^2 - s^2 + exp(x0) * z^2) + s / (1 + r^2)",
           "z * 0.5 + (1 / (1 + r^2)) * (1 + (2 * (1 + r^2)^2 * z^2 + 1) / sqrt((1 + r^2)^2 * z^2 + 1))",
           "-sin(x0) * cos(r) + log(2 + z) - s^(3/2)",
           "x0^4 / (r + 1) - 2^3 + z^(-2)",
       }) {
    Expression e = parse(text);
    Expression again = parse(print(e));
    CHECK(structurally_equal(e, again));
    CHECK(print(e) == print(again));
  }
}

TEST_CASE("precedence and unary minus") {
  CHECK(ev(parse("2 + 3 * 4"), 0, 0, 0, 0) == 14.0);
  CHECK(ev(parse("-2^2"), 0, 0, 0, 0) == -4.0);        // exponent binds tighter
  CHECK(ev(parse("(-2)^2"), 0, 0, 0, 0) == 4.0);
  CHECK(ev(parse("2 - 3 - 4"), 0, 0, 0, 0) == -5.0);   // left associative
  CHECK(ev(parse("12 / 3 / 2"), 0, 0, 0, 0) == 2.0);
  CHECK(ev(parse("r^2 * s"), 0, 3, 5, 0) == 45.0);
}

TEST_CASE("parse errors carry a byte offset") {
  auto expect_error_at = [](const std::string& text, std::size_t offset) {
    try {
      parse(text);
      FAIL("expected ParseError for: ", text);
    } catch (const ParseError& pe) {
      CHECK(pe.offset == offset);
    }
  };
  expect_error_at("1 + ", 4);          // missing operand
  expect_error_at("(1 + 2", 6);        // unbalanced paren
  expect_error_at("sqrt(1,2)", 6);     // builtins are unary
  expect_error_at("1 + $", 4);         // stray character
}

TEST_CASE("differentiate matches hand derivatives") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(0.2, 1.5);
  struct Case {
    const char* f;
    Axis var;
    const char* df;
  };
  for (const Case& c : {
           Case{"sqrt(1 + r^2 + z^2)", Axis::r, "r / sqrt(1 + r^2 + z^2)"},
           Case{"exp(x0) * z^2", Axis::x0, "exp(x0) * z^2"},
           Case{"exp(x0) * z^2", Axis::z, "2 * exp(x0) * z"},
           Case{"s / (1 + r^2)", Axis::r, "-2 * r * s / (1 + r^2)^2"},
           Case{"log(2 + z) - s^(3/2)", Axis::s, "-(3/2) * s^(1/2)"},
           Case{"sin(x0) * cos(x0)", Axis::x0, "cos(x0)^2 - sin(x0)^2"},
       }) {
    Expression got = differentiate(parse(c.f), c.var);
    Expression want = parse(c.df);
    for (int i = 0; i < 25; ++i) {
      double x0 = un(rng), r = un(rng), s = un(rng), z = un(rng);
      CHECK(ev(got, x0, r, s, z) == doctest::Approx(ev(want, x0, r, s, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("differentiate of a fourth-order chain stays finite and exact") {
  Expression e = parse("sqrt(1 + r^2 - s^2 + exp(x0) * z^2)");
  Expression d = e;
  for (int k = 0; k < 4; ++k) d = differentiate(d, Axis::z);
  // Compare against the direct series of f(w) = sqrt(a + b w^2) in w = z.
  double x0 = 0.3, r = 0.7, s = 0.2, z = 0.4;
  double a = 1 + r * r - s * s, b = std::exp(x0);
  double q = a + b * z * z;
  // d^4/dz^4 sqrt(a + b z^2), computed symbolically offline.
  double want = -3 * b * b * (a * a - 4 * a * b * z * z) / std::pow(q, 3.5);
  CHECK(ev(d, x0, r, s, z) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("depends_on and node_count") {
  Expression e = parse("sqrt(1 + r^2) + k * z");
  CHECK(depends_on(e, Axis::r));
  CHECK(depends_on(e, Axis::z));
  CHECK(!depends_on(e, Axis::s));
  CHECK(!depends_on(e, Axis::x0));
  CHECK(node_count(e) > 5);
}

TEST_CASE("evaluate reports unbound names and domain errors") {
  CHECK_THROWS_AS(evaluate(parse("k * 2"), {}), EvalError);
  CHECK_THROWS_AS(ev(parse("1 / (r - 1)"), 0, 1, 0, 0), EvalError);
  CHECK_THROWS_AS(ev(parse("sqrt(s - 2)"), 0, 0, 0, 0), EvalError);
  CHECK_THROWS_AS(ev(parse("log(z)"), 0, 0, 0, 0), EvalError);
  CHECK(evaluate(parse("k * 2"), {{"k", 3.0}}) == 6.0);
}

TEST_CASE("DerivCache returns identical expression objects on repeat lookups") {
  DerivCache cache;
  Expression e = parse("sqrt(1 + r^2 - s^2 + z^2)");
  Expression d1 = cache.get(e, Axis::s);
  Expression d2 = cache.get(e, Axis::s);
  CHECK(d1.get() == d2.get());  // cached, not recomputed
  CHECK(structurally_equal(d1, differentiate(e, Axis::s)));
}

TEST_CASE("rational powers evaluate exactly on negative-exponent cases") {
  CHECK(ev(parse("z^(-2)"), 0, 0, 0, 2) == 0.25);
  CHECK(ev(parse("r^(1/2)"), 0, 9, 0, 0) == 3.0);
  CHECK_THROWS_AS(ev(parse("s^(1/2)"), 0, 0, -1, 0), EvalError);
}
