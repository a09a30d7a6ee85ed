#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cylfin/catalog.hpp"
#include "cylfin/spray.hpp"

using namespace cylfin;

namespace {
PhiModel randers_like(int n = 3) {
  PhiModel m;
  m.phi = parse("sqrt(1 + r^2 - s^2 + exp(x0) * z^2) + s / (1 + r^2)");
  m.n = n;
  return m;
}
}  // namespace

TEST_CASE("spray scalars satisfy their defining relations") {
  PhiModel m = randers_like();
  for (const FullSample& fs : draw_samples(m, SampleSet{.count = 25, .seed = 4})) {
    const ReducedPoint& p = fs.p;
    SprayFields f = spray_fields(m, p);
    PhiJet d(m, p);
    double phi = d.at(0, 0, 0, 0);
    double varphi = p.z * d.at(1, 0, 0, 0) + (p.s / p.r) * d.at(0, 1, 0, 0) + d.at(0, 0, 1, 0);
    CHECK(f.varphi == doctest::Approx(varphi).epsilon(1e-12));
    // 2 Lambda U = p1 phi_zz - p2 phi_sz and 2 Lambda V = p1 phi_sz - p2 phi_ss.
    CHECK(2 * f.Lambda * f.U ==
          doctest::Approx(f.p1 * d.at(0, 0, 0, 2) - f.p2 * d.at(0, 0, 1, 1)).epsilon(1e-11));
    CHECK(2 * f.Lambda * f.V ==
          doctest::Approx(f.p1 * d.at(0, 0, 1, 1) - f.p2 * d.at(0, 0, 2, 0)).epsilon(1e-11));
    double r2ms2 = p.r * p.r - p.s * p.s;
    CHECK(f.L ==
          doctest::Approx(f.Omega / (2 * f.Lambda) * f.p2 - r2ms2 * f.V).epsilon(1e-11));
    CHECK(phi * f.W ==
          doctest::Approx(0.5 * f.varphi - p.s * phi * f.U - d.at(0, 0, 0, 1) * f.L -
                          r2ms2 * d.at(0, 0, 1, 0) * f.U)
              .epsilon(1e-11));
  }
}

TEST_CASE("closed-form spray equals the P/Q oracle") {
  for (int n : {3, 4}) {
    PhiModel m = randers_like(n);
    for (const FullSample& fs : draw_samples(m, SampleSet{.count = 30, .seed = 6})) {
      SprayCoefficients a = spray_coefficients(m, fs.x, fs.y);
      SprayCoefficients b = spray_oracle_pq(m, fs.x, fs.y);
      double scale = std::max({1.0, std::abs(a.G0), std::abs(b.G0)});
      CHECK(std::abs(a.G0 - b.G0) / scale < 1e-10);
      for (int i = 0; i < n; ++i) {
        double si = std::max({1.0, std::abs(a.Gi[i]), std::abs(b.Gi[i])});
        CHECK(std::abs(a.Gi[i] - b.Gi[i]) / si < 1e-10);
      }
    }
  }
}

TEST_CASE("spray coefficients are positively 2-homogeneous in y") {
  PhiModel m = randers_like();
  for (const FullSample& fs : draw_samples(m, SampleSet{.count = 10, .seed = 8})) {
    for (double lam : {0.5, 2.0, 3.7}) {
      TangentVector ys = fs.y;
      ys.y0 *= lam;
      for (double& v : ys.ybar) v *= lam;
      SprayCoefficients a = spray_coefficients(m, fs.x, fs.y);
      SprayCoefficients b = spray_coefficients(m, fs.x, ys);
      CHECK(b.G0 == doctest::Approx(lam * lam * a.G0).epsilon(1e-11));
      for (int i = 0; i < m.n; ++i)
        CHECK(b.Gi[i] == doctest::Approx(lam * lam * a.Gi[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("Gbar lies in span{ybar, xbar} and is O(n)-equivariant") {
  PhiModel m = randers_like();
  for (const FullSample& fs : draw_samples(m, SampleSet{.count = 15, .seed = 10})) {
    SprayCoefficients g = spray_coefficients(m, fs.x, fs.y);
    // Solve G^i = W u y^i + U u^2 x^i in the least-squares sense; the residual
    // must vanish since the two vectors span the relevant plane.
    Eigen::MatrixXd A(m.n, 2);
    Eigen::VectorXd rhs(m.n);
    for (int i = 0; i < m.n; ++i) {
      A(i, 0) = fs.y.ybar[i];
      A(i, 1) = fs.x.xbar[i];
      rhs(i) = g.Gi[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    CHECK((A * c - rhs).cwiseAbs().maxCoeff() < 1e-10);
    SprayFields f = spray_fields(m, fs.p);
    CHECK(c(0) == doctest::Approx(fs.p.u * f.W).epsilon(1e-9));
    CHECK(c(1) == doctest::Approx(fs.p.u * fs.p.u * f.U).epsilon(1e-9));

    // Equivariance: rotate x, y by O and compare to rotating Gbar.
    Eigen::MatrixXd O = random_orthogonal(314, m.n);
    ConfigPoint xr = fs.x;
    TangentVector yr = fs.y;
    for (int i = 0; i < m.n; ++i) {
      xr.xbar[i] = yr.ybar[i] = 0;
      for (int j = 0; j < m.n; ++j) {
        xr.xbar[i] += O(i, j) * fs.x.xbar[j];
        yr.ybar[i] += O(i, j) * fs.y.ybar[j];
      }
    }
    SprayCoefficients gr = spray_coefficients(m, xr, yr);
    CHECK(gr.G0 == doctest::Approx(g.G0).epsilon(1e-11));
    for (int i = 0; i < m.n; ++i) {
      double want = 0;
      for (int j = 0; j < m.n; ++j) want += O(i, j) * g.Gi[j];
      CHECK(gr.Gi[i] == doctest::Approx(want).epsilon(1e-11));
    }
  }
}

TEST_CASE("closed-form divergence equals the jet-traced dG^A/dy^A") {
  for (int n : {3, 4}) {
    PhiModel m = randers_like(n);
    for (const FullSample& fs : draw_samples(m, SampleSet{.count = 10, .seed = 12})) {
      double closed = spray_divergence(m, fs.x, fs.y);

      // Independent cross-check: fourth-order central differences of the P/Q
      // oracle in each fiber direction, summed into the trace.
      double eps = 1e-5, trace = 0.0;
      for (int a = 0; a <= n; ++a) {
        auto shifted = [&](double d) {
          TangentVector yy = fs.y;
          if (a == 0) yy.y0 += d;
          else yy.ybar[a - 1] += d;
          return spray_oracle_pq(m, fs.x, yy);
        };
        SprayCoefficients gp = shifted(eps), gm = shifted(-eps);
        SprayCoefficients gp2 = shifted(2 * eps), gm2 = shifted(-2 * eps);
        auto comp = [&](const SprayCoefficients& g) { return a == 0 ? g.G0 : g.Gi[a - 1]; };
        trace += (-comp(gp2) + 8 * comp(gp) - 8 * comp(gm) + comp(gm2)) / (12 * eps);
      }
      CHECK(closed == doctest::Approx(trace).epsilon(1e-6));

      // Degree-1 homogeneity of the divergence.
      TangentVector y2 = fs.y;
      y2.y0 *= 2;
      for (double& v : y2.ybar) v *= 2;
      CHECK(spray_divergence(m, fs.x, y2) == doctest::Approx(2 * closed).epsilon(1e-11));
    }
  }
}

TEST_CASE("catalog family with g,h free functions has U = g'/(2 r g)") {
  PhiModel m = catalog_get("ex4.3", {{"g", "exp(r^2/2)"}, {"h", "exp(x0)/4"}});
  for (const FullSample& fs : draw_samples(m, SampleSet{.count = 20, .seed = 14})) {
    SprayFields f = spray_fields(m, fs.p);
    // g = exp(r^2/2): g'/g = r, so U = 1/2.
    CHECK(f.U == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("second catalog family has L = s z g' / (2 r g)") {
  PhiModel m = catalog_get("ex4.5", {{"g", "1 + r^2"}, {"h", "1/3"}});
  for (const FullSample& fs : draw_samples(m, SampleSet{.count = 20, .seed = 16})) {
    SprayFields f = spray_fields(m, fs.p);
    const ReducedPoint& p = fs.p;
    double gp_over_g = 2 * p.r / (1 + p.r * p.r);
    CHECK(f.L == doctest::Approx(0.5 * p.s * p.z * gp_over_g / p.r).epsilon(1e-9));
    CHECK(f.U == doctest::Approx(0.5 * gp_over_g / p.r).epsilon(1e-9));
  }
}
