#ifndef CYLFIN_DOUGLAS_HPP_
#define CYLFIN_DOUGLAS_HPP_

#include <array>
#include <vector>

#include "cylfin/spray.hpp"

namespace cylfin {

// Douglas curvature D_j{}^A{}_{kl}: third fiber derivative of the projected
// spray H^A = G^A - (y^A/(n+2)) dG^B/dy^B on M = I x B^n(rho), dim M = n+1.
// Indices run 0..n; symmetric in the three lower indices.
class DouglasTensor {
 public:
  explicit DouglasTensor(int n) : n_(n), d_(std::size_t(n + 1) * (n + 1) * (n + 1) * (n + 1), 0.0) {}

  int n() const { return n_; }
  double& at(int A, int j, int k, int l) { return d_[idx(A, j, k, l)]; }
  double at(int A, int j, int k, int l) const { return d_[idx(A, j, k, l)]; }

  double max_abs() const;
  // Max componentwise |this - other|.
  double max_abs_diff(const DouglasTensor& other) const;
  // Max |D(A,j,k,l) - D(A,perm)| over lower-index permutations.
  double max_asymmetry() const;

 private:
  std::size_t idx(int A, int j, int k, int l) const {
    return ((std::size_t(A) * (n_ + 1) + j) * (n_ + 1) + k) * (n_ + 1) + l;
  }
  int n_;
  std::vector<double> d_;
};

// (s,z)-jet tables of the reduced fields at a point, to the requested order
// (<= 4): U and L from the spray scalars, and
//   R = L - (z/(n+2)) [ L_z - (n-1) s U + (r^2-s^2) U_s ],
//   T = (1/(n+2)) [ 3 s U + L_z + (r^2-s^2) U_s ],
// satisfying R + z T = L + s z U.
struct ReducedFields {
  ReducedPoint p;
  SZJet U, R, T, L;
};

ReducedFields rt_fields(const PhiModel& model, const ReducedPoint& p, int order);

// Closed-form Douglas curvature assembled from the component formulas
// (cyclic-permutation sums included). Requires |z| >= 1e-3: the closed forms
// contain Theta/z and Theta/z^2 terms; near z=0 use the oracle.
DouglasTensor douglas_closed(const PhiModel& model, const ConfigPoint& x, const TangentVector& y);

// Independent oracle: exact fourth-order y-jets of G^A (composed from the
// (s,z)-tables of W, U, L), projected by the divergence, then three fiber
// derivatives. `projective_shift` c replaces G^A by G^A + c F y^A, which must
// leave the result unchanged (projective invariance).
DouglasTensor douglas_oracle(const PhiModel& model, const ConfigPoint& x, const TangentVector& y,
                             double projective_shift = 0.0);

// The eight scalars of the vanishing-Douglas characterization:
//   z Psi(U_s/z), z Psi(U_z/z), U_zzz, z Psi(R_s/z), z Psi(R_z/z), R_zzz,
//   z Psi(T/z),   T_zz.
struct FlatnessResiduals {
  static constexpr std::array<const char*, 8> names = {
      "z*Psi(U_s/z)", "z*Psi(U_z/z)", "U_zzz", "z*Psi(R_s/z)",
      "z*Psi(R_z/z)", "R_zzz",        "z*Psi(T/z)", "T_zz"};
  std::array<double, 8> max_abs{};  // max over the sample set
  std::array<ReducedPoint, 8> worst{};
  double overall() const;
};

std::array<double, 8> flatness_residuals_at(const PhiModel& model, const ReducedPoint& p);
FlatnessResiduals flatness_residuals(const PhiModel& model, const SampleSet& samples);

// Least-squares extraction of the polynomial forms at fixed (x0, r):
//   U = f1 s^2/2 + f2 s z + f3 z^2/2 + f4,
//   R = g1 s^2/2 + g2 s z + g3 z^2/2 + g4,  T = h1 s + h2 z.
// fit_residual is the max pointwise deviation of the fitted forms;
// L_residual checks L = R + z T - s z U at the sample nodes.
struct PolyCoefficients {
  double f1 = 0, f2 = 0, f3 = 0, f4 = 0;
  double g1 = 0, g2 = 0, g3 = 0, g4 = 0;
  double h1 = 0, h2 = 0;
  double fit_residual = 0;
  double L_residual = 0;
};

PolyCoefficients fit_coefficients(const PhiModel& model, double x0, double r, int sz_samples = 49);

// Max over samples of |z psi_x0 + (s/r) psi_r + [1 - 2(r^2-s^2) U] psi_s
// - 2 L psi_z| with psi = sqrt(r^2-s^2) Omega; derivatives by exact jets.
struct PdeResidual {
  double max_abs = 0.0;
  ReducedPoint worst{};
};
PdeResidual reduced_pde_residual(const PhiModel& model, const SampleSet& samples);

// Sup-norms of U, L, p1, p2 over the sample set; projectively flat iff all
// four are below tolerance.
struct ProjectiveFlatness {
  double supU = 0, supL = 0, supP1 = 0, supP2 = 0;
  bool verdict(double tol = 1e-9) const {
    return supU < tol && supL < tol && supP1 < tol && supP2 < tol;
  }
};
ProjectiveFlatness projective_flatness(const PhiModel& model, const SampleSet& samples);

}  // namespace cylfin

#endif  // CYLFIN_DOUGLAS_HPP_
