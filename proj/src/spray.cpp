#include "cylfin/spray.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace cylfin {

ScalarJets compute_scalar_jets(const PhiModel& model, const ReducedPoint& p,
                               std::array<int, 4> caps) {
  if (p.r < 1e-8) throw DomainError("r below floor (spray scalars divide by r)");
  ScalarJets sj;
  sj.p = p;
  sj.phi = phi_jet4(model, p, caps);

  Jet4 jr = Jet4::coordinate(caps, Axis::r, p.r);
  Jet4 js = Jet4::coordinate(caps, Axis::s, p.s);
  Jet4 jz = Jet4::coordinate(caps, Axis::z, p.z);
  Jet4 rs2 = jr * jr - js * js;  // r^2 - s^2

  Jet4 phi_x0 = sj.phi.deriv(Axis::x0);
  Jet4 phi_r = sj.phi.deriv(Axis::r);
  Jet4 phi_s = sj.phi.deriv(Axis::s);
  Jet4 phi_z = sj.phi.deriv(Axis::z);
  Jet4 phi_ss = phi_s.deriv(Axis::s);
  Jet4 phi_sz = phi_s.deriv(Axis::z);
  Jet4 phi_zz = phi_z.deriv(Axis::z);

  sj.Omega = sj.phi - js * phi_s - jz * phi_z;
  sj.Lambda = sj.Omega * phi_zz + rs2 * (phi_ss * phi_zz - phi_sz * phi_sz);
  if (std::abs(sj.Lambda.value()) < 1e-14) throw DomainError("singular Lambda");

  sj.varphi = jz * phi_x0 + (js / jr) * phi_r + phi_s;
  sj.p1 = sj.varphi.deriv(Axis::s) - 2.0 * (phi_r / jr);
  sj.p2 = sj.varphi.deriv(Axis::z) - 2.0 * phi_x0;

  Jet4 inv2L = 0.5 / sj.Lambda;
  sj.U = (sj.p1 * phi_zz - sj.p2 * phi_sz) * inv2L;
  sj.V = (sj.p1 * phi_sz - sj.p2 * phi_ss) * inv2L;
  sj.L = sj.Omega * sj.p2 * inv2L - rs2 * sj.V;
  sj.W = (0.5 * sj.varphi - js * sj.phi * sj.U - phi_z * sj.L - rs2 * phi_s * sj.U) / sj.phi;

  const double np2 = model.n + 2;
  if (sj.L.valid[3] >= 1 && sj.U.valid[2] >= 1) {
    Jet4 lz = sj.L.deriv(Axis::z);
    Jet4 us = sj.U.deriv(Axis::s);
    sj.T = (3.0 * (js * sj.U) + lz + rs2 * us) / np2;
    sj.R = sj.L - (jz / np2) * (lz - (model.n - 1.0) * (js * sj.U) + rs2 * us);
  } else {
    sj.T = Jet4::constant(caps, 0.0);
    sj.R = Jet4::constant(caps, 0.0);
    sj.T.valid = {0, 0, 0, 0};
    sj.R.valid = {0, 0, 0, 0};
  }
  return sj;
}

SprayFields spray_fields(const PhiModel& model, const ReducedPoint& p) {
  ScalarJets sj = compute_scalar_jets(model, p, {1, 1, 2, 2});
  SprayFields f;
  f.varphi = sj.varphi.value();
  f.p1 = sj.p1.value();
  f.p2 = sj.p2.value();
  f.U = sj.U.value();
  f.V = sj.V.value();
  f.L = sj.L.value();
  f.W = sj.W.value();
  f.Omega = sj.Omega.value();
  f.Lambda = sj.Lambda.value();
  return f;
}

SprayCoefficients spray_coefficients(const PhiModel& model, const ConfigPoint& x,
                                     const TangentVector& y) {
  ReducedPoint p = reduce(x, y);
  SprayFields f = spray_fields(model, p);
  const int n = model.n;
  SprayCoefficients g;
  g.G0 = p.u * p.u * (p.z * (f.W + p.s * f.U) + f.L);
  g.Gi.resize(n);
  for (int i = 0; i < n; ++i)
    g.Gi[i] = p.u * f.W * y.ybar[i] + p.u * p.u * f.U * x.xbar[i];
  return g;
}

SprayCoefficients spray_oracle_pq(const PhiModel& model, const ConfigPoint& x,
                                  const TangentVector& y) {
  const int n = model.n;
  const int m = 2 * (n + 1);  // variables: x^0..x^n, y^0..y^n
  auto space = MJSpace::get(m, 2);

  std::vector<MultiJet> xv(n + 1), yv(n + 1);
  xv[0] = MultiJet::variable(space, 0, x.x0);
  for (int i = 1; i <= n; ++i) xv[i] = MultiJet::variable(space, i, x.xbar[i - 1]);
  yv[0] = MultiJet::variable(space, n + 1, y.y0);
  for (int i = 1; i <= n; ++i) yv[i] = MultiJet::variable(space, n + 1 + i, y.ybar[i - 1]);

  MultiJet r2(space, 0.0), u2(space, 0.0), dot(space, 0.0);
  for (int i = 1; i <= n; ++i) {
    r2 = r2 + xv[i] * xv[i];
    u2 = u2 + yv[i] * yv[i];
    dot = dot + xv[i] * yv[i];
  }
  MultiJet rj = sqrt(r2);
  MultiJet uj = sqrt(u2);
  MultiJet sj = dot / uj;
  MultiJet zj = yv[0] / uj;

  EvalEnv<MultiJet> env;
  env.axis = {&xv[0], &rj, &sj, &zj};
  env.params = &model.params;
  env.proto = MultiJet(space, 0.0);
  MultiJet phi = evaluate_generic<MultiJet>(model.phi, env);
  MultiJet F = uj * phi;
  MultiJet F2h = 0.5 * F * F;

  auto d1 = [&](const MultiJet& f, int var) { return f.deriv(var); };

  double Fv = F.value();
  // P = F_{x^C} y^C / (2F)
  double P = 0.0;
  std::vector<MultiJet> Fx(n + 1);
  for (int c = 0; c <= n; ++c) {
    Fx[c] = d1(F, c);
    P += Fx[c].value() * (c == 0 ? y.y0 : y.ybar[c - 1]);
  }
  P /= 2.0 * Fv;

  // g_AB from the y-Hessian of F^2/2
  Eigen::MatrixXd g(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    MultiJet da = d1(F2h, n + 1 + a);
    for (int b = 0; b <= n; ++b) g(a, b) = d1(da, n + 1 + b).value();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smin = svd.singularValues()(n);
  double smax = svd.singularValues()(0);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw DomainError("fundamental tensor is numerically singular (condition > 1e12)");

  // rhs_B = F_{x^C y^B} y^C - F_{x^B}
  Eigen::VectorXd rhs(n + 1);
  for (int b = 0; b <= n; ++b) {
    double acc = 0.0;
    for (int c = 0; c <= n; ++c)
      acc += d1(Fx[c], n + 1 + b).value() * (c == 0 ? y.y0 : y.ybar[c - 1]);
    rhs(b) = acc - Fx[b].value();
  }
  Eigen::VectorXd q = svd.solve(rhs) * (Fv / 2.0);

  SprayCoefficients out;
  out.G0 = P * y.y0 + q(0);
  out.Gi.resize(n);
  for (int i = 0; i < n; ++i) out.Gi[i] = P * y.ybar[i] + q(i + 1);
  return out;
}

double spray_divergence(const PhiModel& model, const ConfigPoint& x, const TangentVector& y) {
  ReducedPoint p = reduce(x, y);
  ScalarJets sj = compute_scalar_jets(model, p, {1, 1, 3, 3});
  double lz = sj.L.deriv(Axis::z).value();
  double us = sj.U.deriv(Axis::s).value();
  double rs2 = p.r * p.r - p.s * p.s;
  return p.u * ((model.n + 2) * sj.W.value() + 3.0 * p.s * sj.U.value() + lz + rs2 * us);
}

}  // namespace cylfin
