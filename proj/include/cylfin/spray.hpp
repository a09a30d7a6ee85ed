#ifndef CYLFIN_SPRAY_HPP_
#define CYLFIN_SPRAY_HPP_

#include <vector>

#include "cylfin/finsler.hpp"

namespace cylfin {

// Scalar bundle of the geodesic spray at a reduced point:
//   varphi = z phi_x0 + (s/r) phi_r + phi_s
//   p1 = varphi_s - (2/r) phi_r,  p2 = varphi_z - 2 phi_x0
//   U = (p1 phi_zz - p2 phi_sz) / (2 Lambda)
//   V = (p1 phi_sz - p2 phi_ss) / (2 Lambda)
//   L = (Omega / (2 Lambda)) p2 - (r^2 - s^2) V
//   W = { varphi/2 - s phi U - phi_z L - (r^2 - s^2) phi_s U } / phi
struct SprayFields {
  double varphi = 0.0;
  double p1 = 0.0, p2 = 0.0;
  double U = 0.0, V = 0.0, L = 0.0, W = 0.0;
  double Omega = 0.0, Lambda = 0.0;
};

struct SprayCoefficients {
  double G0 = 0.0;
  std::vector<double> Gi;
};

// Full jet pipeline for the spray scalars; `caps` are the phi-jet orders.
// Valid (s,z) orders of the derived jets shrink with each division/derivative:
// phi caps (1,1,c,c) yield U,V,L,W to (c-2,c-2) and R,T to (c-3,c-3).
struct ScalarJets {
  ReducedPoint p;
  Jet4 phi, Omega, Lambda, varphi, p1, p2, U, V, L, W, R, T;
};

ScalarJets compute_scalar_jets(const PhiModel& model, const ReducedPoint& p,
                               std::array<int, 4> caps);

SprayFields spray_fields(const PhiModel& model, const ReducedPoint& p);

// Closed form of the geodesic spray:
//   G^0 = u^2 { z (W + s U) + L },   G^i = u^2 W u_i + u^2 U x^i.
SprayCoefficients spray_coefficients(const PhiModel& model, const ConfigPoint& x,
                                     const TangentVector& y);

// Independent oracle G^A = P y^A + Q^A with P = F_{x^C} y^C / (2F) and
// Q^A = (F/2) g^{AB} { F_{x^C y^B} y^C - F_{x^B} }, all derivatives obtained by
// exact jets in full coordinates and g_AB inverted numerically (refused above
// condition number 1e12).
SprayCoefficients spray_oracle_pq(const PhiModel& model, const ConfigPoint& x,
                                  const TangentVector& y);

// dG^A/dy^A = u { (n+2) W + 3 s U + L_z + (r^2 - s^2) U_s }.
double spray_divergence(const PhiModel& model, const ConfigPoint& x, const TangentVector& y);

}  // namespace cylfin

#endif  // CYLFIN_SPRAY_HPP_
