#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cylfin/finsler.hpp"
#include "cylfin/jets.hpp"

using namespace cylfin;

namespace {
PhiModel test_model() {
  PhiModel m;
  m.phi = parse("sqrt(1 + r^2 - s^2 + exp(x0) * z^2) + s / (1 + r^2)");
  return m;
}

ReducedPoint pt(double x0, double r, double s, double z) { return {x0, r, s, z, 1.0}; }
}  // namespace

TEST_CASE("Jet4 partials agree with the symbolic derivative table") {
  PhiModel m = test_model();
  ReducedPoint p = pt(0.3, 0.7, 0.25, 0.6);
  Jet4 j = phi_jet4(m, p, {1, 1, 4, 4});
  PhiJet sym(m, p);
  // Total order capped at 6: the symbolic table is exact at any order but its
  // unsimplified expressions grow geometrically with each derivative.
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int c = 0; c <= 4; ++c)
        for (int d = 0; c + d <= 4 && a + b + c + d <= 6; ++d)
          CHECK(j.partial(a, b, c, d) == doctest::Approx(sym.at(a, b, c, d)).epsilon(1e-12));
}

TEST_CASE("Jet4 arithmetic and analytic functions reproduce compound fields") {
  PhiModel m = test_model();
  ReducedPoint p = pt(-0.2, 0.5, -0.3, 1.1);
  Jet4 phi = phi_jet4(m, p, {1, 1, 3, 3});

  // f = log(phi^2) / (1 + phi) built through jet ops vs symbolically.
  Jet4 f = log(phi * phi) / (Jet4::constant({1, 1, 3, 3}, 1.0) + phi);
  Expression ef = parse("log((" + print(m.phi) + ")^2) / (1 + " + print(m.phi) + ")");
  PhiModel mf;
  mf.phi = ef;
  PhiJet sym(mf, p);
  for (int c = 0; c <= 3; ++c)
    for (int d = 0; d + c <= 3; ++d)
      CHECK(f.partial(0, 0, c, d) == doctest::Approx(sym.at(0, 0, c, d)).epsilon(1e-11));
}

TEST_CASE("Jet4 derivative tracking refuses exhausted axes") {
  PhiModel m = test_model();
  Jet4 j = phi_jet4(m, pt(0, 0.5, 0.1, 0.4), {1, 1, 2, 2});
  Jet4 dz = j.deriv(Axis::z);
  Jet4 dzz = dz.deriv(Axis::z);
  CHECK(dzz.valid[3] == 0);
  CHECK_THROWS_AS(dzz.deriv(Axis::z), std::logic_error);
  CHECK_THROWS_AS(j.deriv(Axis::x0).deriv(Axis::x0), std::logic_error);
}

TEST_CASE("SZJet: derivative tables, psi operator, z-power multiplication") {
  PhiModel m = test_model();
  ReducedPoint p = pt(0.1, 0.6, 0.2, 0.8);
  Jet4 j = phi_jet4(m, p, {0, 0, 5, 5});
  SZJet t = SZJet::from_jet4(j, p.s, p.z);

  // psi(T) = -s T_s - z T_z, checked value-wise and on one more derivative.
  SZJet pt_ = psi(t);
  CHECK(pt_.at(0, 0) ==
        doctest::Approx(-p.s * t.at(1, 0) - p.z * t.at(0, 1)).epsilon(1e-14));
  CHECK(pt_.ds().at(0, 0) ==
        doctest::Approx(-t.at(1, 0) - p.s * t.at(2, 0) - p.z * t.at(1, 1)).epsilon(1e-14));

  // mul_zpow against explicit Leibniz for m = 3 and m = -2.
  for (int mm : {3, -2}) {
    SZJet zt = mul_zpow(t, mm);
    double z = p.z;
    double zm = std::pow(z, mm);
    CHECK(zt.at(0, 0) == doctest::Approx(zm * t.at(0, 0)).epsilon(1e-13));
    CHECK(zt.at(0, 1) ==
          doctest::Approx(zm * t.at(0, 1) + mm * std::pow(z, mm - 1) * t.at(0, 0))
              .epsilon(1e-13));
    CHECK(zt.at(1, 1) ==
          doctest::Approx(zm * t.at(1, 1) + mm * std::pow(z, mm - 1) * t.at(1, 0))
              .epsilon(1e-13));
  }

  CHECK_THROWS_AS(t.at(6, 0), std::logic_error);
  CHECK_THROWS_AS(psi(SZJet(p.s, p.z, 0, 0)), std::logic_error);
}

TEST_CASE("MultiJet partials of a closed-form function of three variables") {
  auto sp = MJSpace::get(3, 4);
  double a = 0.4, b = -0.7, c = 1.2;
  MultiJet X = MultiJet::variable(sp, 0, a);
  MultiJet Y = MultiJet::variable(sp, 1, b);
  MultiJet Z = MultiJet::variable(sp, 2, c);
  MultiJet f = exp(X * Y) + sqrt(MultiJet(sp, 4.0) + Z * Z) / X;

  double q = std::sqrt(4 + c * c);
  CHECK(f.value() == doctest::Approx(std::exp(a * b) + q / a).epsilon(1e-14));
  // df/dx = b e^{xy} - sqrt(4+z^2)/x^2
  CHECK(f.partial({1, 0, 0}) ==
        doctest::Approx(b * std::exp(a * b) - q / (a * a)).epsilon(1e-13));
  // d^2 f / dx dy = (1 + xy) e^{xy}
  CHECK(f.partial({1, 1, 0}) ==
        doctest::Approx((1 + a * b) * std::exp(a * b)).epsilon(1e-13));
  // d^3 f / dz^3 = d/dz [ (1/x)(1/q - z^2/q^3) ] = (1/x)(-3z/q^3 + 3z^3/q^5)
  CHECK(f.partial({0, 0, 3}) ==
        doctest::Approx((-3 * c / std::pow(q * q + 0, 1.5) +
                         3 * c * c * c / std::pow(q, 5.0)) /
                        a)
            .epsilon(1e-12));
  // deriv(var) shifts the whole table.
  CHECK(f.deriv(2).partial({0, 0, 2}) == doctest::Approx(f.partial({0, 0, 3})).epsilon(1e-12));
}

TEST_CASE("compose_sz: an (s,z) value table evaluated on MultiJet arguments") {
  PhiModel m = test_model();
  ReducedPoint p0 = pt(0.2, 0.55, 0.15, 0.7);
  Jet4 j = phi_jet4(m, p0, {0, 0, 4, 4});
  SZJet table = SZJet::from_jet4(j, p0.s, p0.z);

  // Arguments s(t1,t2) = s0 + t1 + t1 t2, z(t1,t2) = z0 + t2^2 around 0.
  auto sp = MJSpace::get(2, 3);
  MultiJet t1 = MultiJet::variable(sp, 0, 0.0);
  MultiJet t2 = MultiJet::variable(sp, 1, 0.0);
  MultiJet sArg = MultiJet(sp, p0.s) + t1 + t1 * t2;
  MultiJet zArg = MultiJet(sp, p0.z) + t2 * t2;
  MultiJet composed = compose_sz(table, sArg, zArg);

  // Chain rule by hand at the base point.
  auto D = [&](int c, int d) { return table.at(c, d); };
  CHECK(composed.value() == doctest::Approx(D(0, 0)).epsilon(1e-14));
  CHECK(composed.partial({1, 0}) == doctest::Approx(D(1, 0)).epsilon(1e-13));
  CHECK(composed.partial({0, 1}) == doctest::Approx(0.0).epsilon(1e-13));
  // d^2/dt1 dt2: s_{t1 t2} = 1 contributes D(1,0); s_{t1} s_{t2} = 0.
  CHECK(composed.partial({1, 1}) == doctest::Approx(D(1, 0)).epsilon(1e-13));
  // d^2/dt2^2: z_{t2 t2} = 2 contributes 2 D(0,1).
  CHECK(composed.partial({0, 2}) == doctest::Approx(2 * D(0, 1)).epsilon(1e-13));
  CHECK(composed.partial({2, 0}) == doctest::Approx(D(2, 0)).epsilon(1e-13));
}

TEST_CASE("compose_sz reproduces a full Douglas-sized table against direct jets") {
  // Evaluate the same scalar field two ways: directly as a Jet4 at a shifted
  // point, and by composing its (s,z) Taylor table with affine arguments.
  PhiModel m = test_model();
  ReducedPoint p0 = pt(0.0, 0.5, 0.1, 0.6);
  Jet4 j = phi_jet4(m, p0, {0, 0, 6, 6});
  SZJet table = SZJet::from_jet4(j, p0.s, p0.z);

  auto sp = MJSpace::get(2, 4);
  MultiJet t1 = MultiJet::variable(sp, 0, 0.0);
  MultiJet t2 = MultiJet::variable(sp, 1, 0.0);
  double as = 0.31, az = -0.47;
  MultiJet composed = compose_sz(table, MultiJet(sp, p0.s) + t1 * as,
                                 MultiJet(sp, p0.z) + t2 * az);
  for (int c = 0; c <= 4; ++c)
    for (int d = 0; c + d <= 4; ++d) {
      double want = table.at(c, d) * std::pow(as, c) * std::pow(az, d);
      std::vector<int> idx{c, d};
      CHECK(composed.partial(idx) == doctest::Approx(want).epsilon(1e-11));
    }
}
