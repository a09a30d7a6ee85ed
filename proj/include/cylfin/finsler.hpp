#ifndef CYLFIN_FINSLER_HPP_
#define CYLFIN_FINSLER_HPP_

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cylfin/coords.hpp"
#include "cylfin/expr.hpp"
#include "cylfin/jets.hpp"

namespace cylfin {

// A cylindrically symmetric metric F = |ybar| * phi(x0, r, s, z).
struct PhiModel {
  Expression phi;
  std::unordered_map<std::string, double> params;
  int n = 3;                       // fiber dimension
  double rho = 1.0;                // domain radius for r
  std::array<double, 2> x0_interval{-1.0, 1.0};

  double eval_phi(const ReducedPoint& p) const;
  double eval_F(const ConfigPoint& x, const TangentVector& y) const;
};

// Exact symbolic partials of phi at a reduced point, populated on demand.
// Derivative expressions are memoized per multi-index (a,b,c,d) meaning
// d^a/dx0^a d^b/dr^b d^c/ds^c d^d/dz^d; lookups beyond the populated order
// extend the table symbolically, never by extrapolation.
class PhiJet {
 public:
  PhiJet(const PhiModel& model, const ReducedPoint& p);

  double at(int a, int b, int c, int d) const;
  const ReducedPoint& point() const { return p_; }

 private:
  const PhiModel& model_;
  ReducedPoint p_;
  mutable std::mutex mu_;
  mutable std::map<std::array<int, 4>, double> values_;
  mutable std::map<std::array<int, 4>, Expression> exprs_;
};

// Forward-AD jet of phi at a reduced point with given per-axis caps.
Jet4 phi_jet4(const PhiModel& model, const ReducedPoint& p, std::array<int, 4> caps);

struct FundamentalScalars {
  double F_over_u = 0.0;  // phi
  double Omega = 0.0;
  double Lambda = 0.0;
};

// Omega = phi - s phi_s - z phi_z; Lambda = Omega phi_zz + (r^2-s^2)(phi_ss phi_zz - phi_sz^2).
FundamentalScalars fundamental_scalars(const PhiModel& model, const ReducedPoint& p);
FundamentalScalars fundamental_scalars(const Jet4& phi, const ReducedPoint& p);

// Fundamental tensor g_AB = 1/2 [F^2]_{y^A y^B} in full coordinates, assembled
// from the closed-form blocks.
struct FundamentalTensor {
  Eigen::MatrixXd g;               // (n+1) x (n+1)
  double det_closed_form = 0.0;    // phi^{n+2} Omega^{n-2} Lambda
  FundamentalScalars scalars;
};

FundamentalTensor metric_tensor(const PhiModel& model, const ConfigPoint& x,
                                const TangentVector& y);

// Grid for validity scans; s is parameterized as a fraction of r so the
// |s| <= r constraint is honored by construction.
struct AxisSpec {
  double lo = 0.0, hi = 0.0;
  int count = 1;
  double at(int i) const { return count <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (count - 1); }
};

struct GridSpec {
  AxisSpec x0{0.0, 0.0, 1};
  AxisSpec r{0.1, 0.9, 17};
  AxisSpec sfrac{-0.9, 0.9, 17};
  AxisSpec z{-2.0, 2.0, 17};
};

struct ValidityViolation {
  ReducedPoint p;
  double omega = 0.0, lambda = 0.0, phi = 0.0;
  std::string error;  // non-empty for per-point domain errors
};

struct ValidityReport {
  bool valid = false;
  double min_omega = 0.0;
  double min_lambda = 0.0;
  double min_phi = 0.0;
  ReducedPoint argmin_omega, argmin_lambda;
  int points_scanned = 0;
  std::vector<ValidityViolation> violations;
};

// Strict positivity with floor 1e-12: valid iff min Omega > 0 and min Lambda > 0
// (n >= 3); for n = 2 only Lambda > 0 is required. Domain errors are recorded
// per point, not fatal.
ValidityReport validity_scan(const PhiModel& model, const GridSpec& grid, int threads = 0);

// Max |F(x0,Oxbar,y0,Oybar) - F| over seeded random samples with a fresh O each.
SymmetryReport symmetry_check(const PhiModel& model, int samples, std::uint64_t seed);

// Seeded sampler over the documented region r in [0.1, 0.9 rho], |s| <= 0.9 r,
// |z| in [0.05, 2], u = 1, with x0 in the model interval.
struct SampleSet {
  int count = 100;
  std::uint64_t seed = 1;
  double z_min = 0.05;
  double z_max = 2.0;
};

struct FullSample {
  ConfigPoint x;
  TangentVector y;
  ReducedPoint p;
};

std::vector<FullSample> draw_samples(const PhiModel& model, const SampleSet& spec);

}  // namespace cylfin

#endif  // CYLFIN_FINSLER_HPP_
