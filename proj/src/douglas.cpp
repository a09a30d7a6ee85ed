#include "cylfin/douglas.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace cylfin {

double DouglasTensor::max_abs() const {
  double m = 0.0;
  for (double v : d_) m = std::max(m, std::abs(v));
  return m;
}

double DouglasTensor::max_abs_diff(const DouglasTensor& other) const {
  double m = 0.0;
  for (std::size_t i = 0; i < d_.size(); ++i) m = std::max(m, std::abs(d_[i] - other.d_[i]));
  return m;
}

double DouglasTensor::max_asymmetry() const {
  double m = 0.0;
  for (int A = 0; A <= n_; ++A)
    for (int j = 0; j <= n_; ++j)
      for (int k = 0; k <= n_; ++k)
        for (int l = 0; l <= n_; ++l) {
          double v = at(A, j, k, l);
          m = std::max(m, std::abs(v - at(A, k, j, l)));
          m = std::max(m, std::abs(v - at(A, j, l, k)));
        }
  return m;
}

ReducedFields rt_fields(const PhiModel& model, const ReducedPoint& p, int order) {
  if (order < 0 || order > 4) throw DomainError("rt_fields order must be in [0,4]");
  int c = order + 3;
  ScalarJets sj = compute_scalar_jets(model, p, {1, 1, c, c});
  ReducedFields rf;
  rf.p = p;
  rf.U = SZJet::from_jet4(sj.U, p.s, p.z);
  rf.L = SZJet::from_jet4(sj.L, p.s, p.z);
  rf.R = SZJet::from_jet4(sj.R, p.s, p.z);
  rf.T = SZJet::from_jet4(sj.T, p.s, p.z);
  return rf;
}

namespace {

// Scalar ingredients of the closed-form component display, all evaluated at
// the reduced point.
struct ClosedScalars {
  // R block
  double Rzzz, Rszz, psiRzz, Rssz, psiRsz, zPsiRz_z, q2Rz;  // q2Rz = (1/z)Psi(z^2 Psi(R_z/z))
  double Rsss, psiRss, zPsiRs_z, q2R, q2Rs, q3R;            // q2R = Psi(z^2 Psi(R/z^2)),
                                                            // q2Rs = (1/z)Psi(z^2 Psi(R_s/z)),
                                                            // q3R = Psi(z^2 Psi(z^2 Psi(R/z^2)))
  // U block
  double Uzzz, Uszz, psiUzz, Ussz, zPsiUz_z, q2Uz;  // q2Uz = (1/z)Psi(z^2 Psi(U_z/z))
  double psiUsz, Usss, psiUss, zPsiUs_z, q2U, q2U_s, q3U;  // q2U = Psi(z^2 Psi(U/z^2)),
                                                           // q2U_s = Psi_s(z^2 Psi(U/z^2)),
                                                           // q3U = Psi(z^2 Psi(z^2 Psi(U/z^2)))
  // T block
  double Tzzz, Tzz, Tszz, psizTz;                    // psizTz = Psi_z(T_z)
  double Tssz, q2Tz;                                 // q2Tz = Psi(z^2 Psi(T_z))
  double Tsz, psizTsz, psiTz;                        // psizTsz = Psi(z T_sz)
  double Tss, psisTs, q2Ts;                          // psisTs = Psi_s(T_s), q2Ts = Psi(z^2 Psi(T_s))
  double zPsiT_z, psiTs, q2T, Tsss, q3T;             // q2T = Psi(z^2 Psi(T/z)),
                                                     // q3T = Psi(z^2 Psi(z^2 Psi(T/z)))
};

ClosedScalars closed_scalars(const ReducedFields& rf) {
  const SZJet& U = rf.U;
  const SZJet& R = rf.R;
  const SZJet& T = rf.T;
  const double z = rf.p.z;
  ClosedScalars c{};

  c.Rzzz = R.at(0, 3);
  c.Rszz = R.at(1, 2);
  c.psiRzz = psi(R.dz().dz()).value();
  c.Rssz = R.at(2, 1);
  c.psiRsz = psi(R.ds().dz()).value();
  SZJet Rz_z = mul_zpow(R.dz(), -1);
  c.zPsiRz_z = z * psi(Rz_z).value();
  c.q2Rz = (1.0 / z) * psi(mul_zpow(psi(Rz_z), 2)).value();
  c.Rsss = R.at(3, 0);
  c.psiRss = psi(R.ds().ds()).value();
  SZJet Rs_z = mul_zpow(R.ds(), -1);
  c.zPsiRs_z = z * psi(Rs_z).value();
  SZJet pR2 = psi(mul_zpow(R, -2));
  c.q2R = psi(mul_zpow(pR2, 2)).value();
  c.q2Rs = (1.0 / z) * psi(mul_zpow(psi(Rs_z), 2)).value();
  c.q3R = psi(mul_zpow(psi(mul_zpow(pR2, 2)), 2)).value();

  c.Uzzz = U.at(0, 3);
  c.Uszz = U.at(1, 2);
  c.psiUzz = psi(U.dz().dz()).value();
  c.Ussz = U.at(2, 1);
  SZJet Uz_z = mul_zpow(U.dz(), -1);
  c.zPsiUz_z = z * psi(Uz_z).value();
  c.q2Uz = (1.0 / z) * psi(mul_zpow(psi(Uz_z), 2)).value();
  c.psiUsz = psi(U.ds().dz()).value();
  c.Usss = U.at(3, 0);
  c.psiUss = psi(U.ds().ds()).value();
  SZJet Us_z = mul_zpow(U.ds(), -1);
  c.zPsiUs_z = z * psi(Us_z).value();
  SZJet pU2 = psi(mul_zpow(U, -2));
  SZJet q2Ujet = psi(mul_zpow(pU2, 2));
  c.q2U = q2Ujet.value();
  c.q2U_s = q2Ujet.ds().value();
  c.q3U = psi(mul_zpow(q2Ujet, 2)).value();

  c.Tzzz = T.at(0, 3);
  c.Tzz = T.at(0, 2);
  c.Tszz = T.at(1, 2);
  c.psizTz = psi(T.dz()).dz().value();
  c.Tssz = T.at(2, 1);
  c.q2Tz = psi(mul_zpow(psi(T.dz()), 2)).value();
  c.Tsz = T.at(1, 1);
  c.psizTsz = psi(mul_zpow(T.ds().dz(), 1)).value();
  c.psiTz = psi(T.dz()).value();
  c.Tss = T.at(2, 0);
  c.psisTs = psi(T.ds()).ds().value();
  c.q2Ts = psi(mul_zpow(psi(T.ds()), 2)).value();
  SZJet T_z = mul_zpow(T, -1);
  c.zPsiT_z = z * psi(T_z).value();
  c.psiTs = psi(T.ds()).value();
  SZJet q2Tjet = psi(mul_zpow(psi(T_z), 2));
  c.q2T = q2Tjet.value();
  c.Tsss = T.at(3, 0);
  c.q3T = psi(mul_zpow(q2Tjet, 2)).value();
  return c;
}

}  // namespace

DouglasTensor douglas_closed(const PhiModel& model, const ConfigPoint& x, const TangentVector& y) {
  ReducedPoint p = reduce(x, y);
  if (std::abs(p.z) < 1e-3) throw DomainError("closed-form Douglas requires |z| >= 1e-3");
  ReducedFields rf = rt_fields(model, p, 3);
  ClosedScalars c = closed_scalars(rf);

  const int n = model.n;
  const double u = p.u, z = p.z;
  // Spatial coordinates and unit fiber direction (index 1..n).
  std::vector<double> X(n + 1, 0.0), Uv(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    X[i] = x.xbar[i - 1];
    Uv[i] = y.ybar[i - 1] / u;
  }
  auto del = [](int a, int b) { return a == b ? 1.0 : 0.0; };

  DouglasTensor D(n);

  // Upper index 0, by number of spatial lower indices.
  auto d0 = [&](int j, int k, int l) -> double {
    std::array<int, 3> nz{};
    int m = 0;
    for (int idx : {j, k, l})
      if (idx != 0) nz[m++] = idx;
    switch (m) {
      case 0:
        return c.Rzzz;
      case 1: {
        int l1 = nz[0];
        return c.Rszz * X[l1] + c.psiRzz * Uv[l1];
      }
      case 2: {
        int k1 = nz[0], l1 = nz[1];
        return c.Rssz * X[k1] * X[l1] + c.psiRsz * (X[l1] * Uv[k1] + X[k1] * Uv[l1]) +
               c.zPsiRz_z * del(k1, l1) + c.q2Rz * Uv[k1] * Uv[l1];
      }
      default: {
        double acc = 0.0;
        std::array<int, 3> t{nz[0], nz[1], nz[2]};
        for (int cy = 0; cy < 3; ++cy) {
          int a = t[cy % 3], b = t[(cy + 1) % 3], e = t[(cy + 2) % 3];
          acc += (c.Rsss / 3.0) * X[a] * X[b] * X[e] + c.psiRss * X[a] * X[b] * Uv[e] +
                 c.zPsiRs_z * X[a] * del(b, e) + c.q2R * Uv[a] * del(b, e) +
                 c.q2Rs * X[a] * Uv[b] * Uv[e] + (c.q3R / (3.0 * z * z)) * Uv[a] * Uv[b] * Uv[e];
        }
        return acc;
      }
    }
  };

  // Upper index i >= 1.
  auto di = [&](int i, int j, int k, int l) -> double {
    std::array<int, 3> nz{};
    int m = 0;
    for (int idx : {j, k, l})
      if (idx != 0) nz[m++] = idx;
    switch (m) {
      case 0:
        return c.Uzzz * X[i] - c.Tzzz * Uv[i];
      case 1: {
        int l1 = nz[0];
        return c.Uszz * X[l1] * X[i] + c.psiUzz * X[i] * Uv[l1] - c.Tzz * del(i, l1) -
               c.Tszz * X[l1] * Uv[i] - c.psizTz * Uv[l1] * Uv[i];
      }
      case 2: {
        int k1 = nz[0], l1 = nz[1];
        double acc = c.Ussz * X[k1] * X[l1] * X[i] + c.zPsiUz_z * del(k1, l1) * X[i] +
                     c.q2Uz * Uv[k1] * Uv[l1] * X[i] - c.Tssz * X[k1] * X[l1] * Uv[i] -
                     (c.q2Tz / (z * z)) * Uv[k1] * Uv[l1] * Uv[i];
        for (auto [a, b] : {std::pair{k1, l1}, std::pair{l1, k1}})
          acc += c.psiUsz * Uv[a] * X[b] * X[i] - c.Tsz * X[a] * del(b, i) -
                 (c.psizTsz / z) * X[b] * Uv[a] * Uv[i];
        // Minus sign: these delta terms arise from d/dy^k of -T_z delta_li and
        // of -Psi(T_z) u_l u_i, so they enter negatively.
        acc -= c.psiTz * (del(i, l1) * Uv[k1] + del(k1, i) * Uv[l1] + del(l1, k1) * Uv[i]);
        return acc;
      }
      default: {
        int j1 = nz[0], k1 = nz[1], l1 = nz[2];
        double upart = c.Usss * X[j1] * X[k1] * X[l1] + (c.q3U / (z * z)) * Uv[j1] * Uv[k1] * Uv[l1];
        double tpart = c.zPsiT_z * (del(j1, i) * del(k1, l1) + del(j1, k1) * del(l1, i) +
                                    del(j1, l1) * del(i, k1)) +
                       c.psiTs * (X[j1] * (Uv[i] * del(k1, l1) + Uv[k1] * del(l1, i) +
                                           Uv[l1] * del(i, k1)) +
                                  X[k1] * (Uv[j1] * del(i, l1) + Uv[l1] * del(j1, i) +
                                           Uv[i] * del(l1, j1)) +
                                  X[l1] * (Uv[i] * del(j1, k1) + Uv[j1] * del(k1, i) +
                                           Uv[k1] * del(i, j1))) +
                       (c.q2T / z) * (del(j1, i) * Uv[k1] * Uv[l1] + del(j1, k1) * Uv[l1] * Uv[i] +
                                      del(j1, l1) * Uv[i] * Uv[k1] + del(i, k1) * Uv[l1] * Uv[j1] +
                                      del(k1, l1) * Uv[i] * Uv[j1] + del(l1, i) * Uv[k1] * Uv[j1]) +
                       c.Tsss * X[j1] * X[k1] * X[l1] * Uv[i] +
                       (c.q3T / (z * z * z)) * Uv[j1] * Uv[k1] * Uv[l1] * Uv[i];
        std::array<int, 3> t{j1, k1, l1};
        for (int cy = 0; cy < 3; ++cy) {
          int a = t[cy % 3], b = t[(cy + 1) % 3], e = t[(cy + 2) % 3];
          upart += c.psiUss * Uv[a] * X[b] * X[e] + c.zPsiUs_z * del(a, b) * X[e] +
                   c.q2U_s * Uv[a] * Uv[b] * X[e] + c.q2U * del(a, b) * Uv[e];
          tpart += c.Tss * del(i, a) * X[b] * X[e] + c.psisTs * Uv[i] * Uv[a] * X[b] * X[e] +
                   (c.q2Ts / (z * z)) * X[a] * Uv[b] * Uv[e] * Uv[i];
        }
        return upart * X[i] - tpart;
      }
    }
  };

  for (int A = 0; A <= n; ++A)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l)
          D.at(A, j, k, l) = (A == 0 ? d0(j, k, l) : di(A, j, k, l)) / u;
  return D;
}

DouglasTensor douglas_oracle(const PhiModel& model, const ConfigPoint& x, const TangentVector& y,
                             double projective_shift) {
  ReducedPoint p = reduce(x, y);
  ScalarJets sj = compute_scalar_jets(model, p, {1, 1, 6, 6});
  SZJet Wt = SZJet::from_jet4(sj.W, p.s, p.z);
  SZJet Ut = SZJet::from_jet4(sj.U, p.s, p.z);
  SZJet Lt = SZJet::from_jet4(sj.L, p.s, p.z);
  SZJet Ft = SZJet::from_jet4(sj.phi, p.s, p.z);

  const int n = model.n;
  auto space = MJSpace::get(n + 1, 4);
  std::vector<MultiJet> yv(n + 1);
  yv[0] = MultiJet::variable(space, 0, y.y0);
  for (int i = 1; i <= n; ++i) yv[i] = MultiJet::variable(space, i, y.ybar[i - 1]);

  MultiJet u2(space, 0.0), dot(space, 0.0);
  for (int i = 1; i <= n; ++i) {
    u2 = u2 + yv[i] * yv[i];
    dot = dot + yv[i] * x.xbar[i - 1];
  }
  MultiJet uj = sqrt(u2);
  MultiJet s = dot / uj;
  MultiJet z = yv[0] / uj;

  MultiJet W = compose_sz(Wt, s, z);
  MultiJet U = compose_sz(Ut, s, z);
  MultiJet L = compose_sz(Lt, s, z);

  std::vector<MultiJet> G(n + 1);
  G[0] = u2 * (z * (W + s * U) + L);
  for (int i = 1; i <= n; ++i) G[i] = uj * W * yv[i] + u2 * U * x.xbar[i - 1];

  if (projective_shift != 0.0) {
    MultiJet F = uj * compose_sz(Ft, s, z);
    for (int A = 0; A <= n; ++A) G[A] = G[A] + projective_shift * (F * yv[A]);
  }

  MultiJet div(space, 0.0);
  for (int A = 0; A <= n; ++A) div = div + G[A].deriv(A);

  DouglasTensor D(n);
  std::vector<int> e(n + 1, 0);
  for (int A = 0; A <= n; ++A) {
    MultiJet H = G[A] - (yv[A] * div) / double(n + 2);
    for (int j = 0; j <= n; ++j)
      for (int k = j; k <= n; ++k)
        for (int l = k; l <= n; ++l) {
          std::fill(e.begin(), e.end(), 0);
          ++e[j];
          ++e[k];
          ++e[l];
          double v = H.partial(e);
          int idxs[3] = {j, k, l};
          std::sort(idxs, idxs + 3);
          do {
            D.at(A, idxs[0], idxs[1], idxs[2]) = v;
          } while (std::next_permutation(idxs, idxs + 3));
        }
  }
  return D;
}

std::array<double, 8> flatness_residuals_at(const PhiModel& model, const ReducedPoint& p) {
  ReducedFields rf = rt_fields(model, p, 3);
  const double z = p.z;
  std::array<double, 8> r{};
  r[0] = z * psi(mul_zpow(rf.U.ds(), -1)).value();
  r[1] = z * psi(mul_zpow(rf.U.dz(), -1)).value();
  r[2] = rf.U.at(0, 3);
  r[3] = z * psi(mul_zpow(rf.R.ds(), -1)).value();
  r[4] = z * psi(mul_zpow(rf.R.dz(), -1)).value();
  r[5] = rf.R.at(0, 3);
  r[6] = z * psi(mul_zpow(rf.T, -1)).value();
  r[7] = rf.T.at(0, 2);
  for (double& v : r) v = std::abs(v);
  return r;
}

double FlatnessResiduals::overall() const {
  return *std::max_element(max_abs.begin(), max_abs.end());
}

FlatnessResiduals flatness_residuals(const PhiModel& model, const SampleSet& samples) {
  FlatnessResiduals out;
  for (const FullSample& fs : draw_samples(model, samples)) {
    std::array<double, 8> r = flatness_residuals_at(model, fs.p);
    for (int i = 0; i < 8; ++i)
      if (r[i] > out.max_abs[i]) {
        out.max_abs[i] = r[i];
        out.worst[i] = fs.p;
      }
  }
  return out;
}

PolyCoefficients fit_coefficients(const PhiModel& model, double x0, double r, int sz_samples) {
  if (sz_samples < 12) throw DomainError("fit_coefficients needs at least 12 (s,z) samples");
  int m = 1;
  while (m * m < sz_samples) ++m;

  std::vector<double> sv, zv;
  for (int i = 0; i < m; ++i) {
    sv.push_back(-0.9 * r + 1.8 * r * i / (m - 1));
    // z in [-2,-0.05] u [0.05,2], split evenly
    double t = double(i) / (m - 1);
    zv.push_back(t < 0.5 ? -2.0 + (2.0 - 0.05) * (2.0 * t) : 0.05 + (2.0 - 0.05) * (2.0 * t - 1.0));
  }

  std::vector<double> Us, Rs, Ts, Ls, ss, zs;
  for (double s : sv)
    for (double z : zv) {
      ReducedPoint p{x0, r, s, z, 1.0};
      ScalarJets sj = compute_scalar_jets(model, p, {1, 1, 3, 3});
      Us.push_back(sj.U.value());
      Rs.push_back(sj.R.value());
      Ts.push_back(sj.T.value());
      Ls.push_back(sj.L.value());
      ss.push_back(s);
      zs.push_back(z);
    }

  const int N = int(Us.size());
  Eigen::MatrixXd A4(N, 4), A2(N, 2);
  Eigen::VectorXd bU(N), bR(N), bT(N);
  for (int i = 0; i < N; ++i) {
    double s = ss[i], z = zs[i];
    A4(i, 0) = 0.5 * s * s;
    A4(i, 1) = s * z;
    A4(i, 2) = 0.5 * z * z;
    A4(i, 3) = 1.0;
    A2(i, 0) = s;
    A2(i, 1) = z;
    bU(i) = Us[i];
    bR(i) = Rs[i];
    bT(i) = Ts[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr4(A4);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(A2);
  if (qr4.rank() < 4 || qr2.rank() < 2)
    throw DomainError("fit_coefficients: rank-deficient design matrix");
  Eigen::VectorXd cf = qr4.solve(bU), cg = qr4.solve(bR), ch = qr2.solve(bT);

  PolyCoefficients out;
  out.f1 = cf(0);
  out.f2 = cf(1);
  out.f3 = cf(2);
  out.f4 = cf(3);
  out.g1 = cg(0);
  out.g2 = cg(1);
  out.g3 = cg(2);
  out.g4 = cg(3);
  out.h1 = ch(0);
  out.h2 = ch(1);
  out.fit_residual = std::max({(A4 * cf - bU).cwiseAbs().maxCoeff(),
                               (A4 * cg - bR).cwiseAbs().maxCoeff(),
                               (A2 * ch - bT).cwiseAbs().maxCoeff()});
  double lr = 0.0;
  for (int i = 0; i < N; ++i)
    lr = std::max(lr, std::abs(Ls[i] - (Rs[i] + zs[i] * Ts[i] - ss[i] * zs[i] * Us[i])));
  out.L_residual = lr;
  return out;
}

PdeResidual reduced_pde_residual(const PhiModel& model, const SampleSet& samples) {
  PdeResidual out;
  for (const FullSample& fs : draw_samples(model, samples)) {
    const ReducedPoint& p = fs.p;
    ScalarJets sj = compute_scalar_jets(model, p, {1, 1, 2, 2});
    double rs2 = p.r * p.r - p.s * p.s;
    double sq = std::sqrt(rs2);
    double Om = sj.Omega.value();
    double Ox0 = sj.Omega.deriv(Axis::x0).value();
    double Or = sj.Omega.deriv(Axis::r).value();
    double Os = sj.Omega.deriv(Axis::s).value();
    double Oz = sj.Omega.deriv(Axis::z).value();
    double psi_x0 = sq * Ox0;
    double psi_r = (p.r / sq) * Om + sq * Or;
    double psi_s = (-p.s / sq) * Om + sq * Os;
    double psi_z = sq * Oz;
    double res = std::abs(p.z * psi_x0 + (p.s / p.r) * psi_r +
                          (1.0 - 2.0 * rs2 * sj.U.value()) * psi_s - 2.0 * sj.L.value() * psi_z);
    if (res > out.max_abs) {
      out.max_abs = res;
      out.worst = p;
    }
  }
  return out;
}

ProjectiveFlatness projective_flatness(const PhiModel& model, const SampleSet& samples) {
  ProjectiveFlatness out;
  for (const FullSample& fs : draw_samples(model, samples)) {
    SprayFields f = spray_fields(model, fs.p);
    out.supU = std::max(out.supU, std::abs(f.U));
    out.supL = std::max(out.supL, std::abs(f.L));
    out.supP1 = std::max(out.supP1, std::abs(f.p1));
    out.supP2 = std::max(out.supP2, std::abs(f.p2));
  }
  return out;
}

}  // namespace cylfin
