#ifndef CYLFIN_COORDS_HPP_
#define CYLFIN_COORDS_HPP_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace cylfin {

// Full tangent-bundle coordinates on M = I x B^n(rho) and their reduction to
// the cylindrical invariants (r, s, z, u).

struct ConfigPoint {
  double x0 = 0.0;
  std::vector<double> xbar;
  int n() const { return static_cast<int>(xbar.size()); }
};

struct TangentVector {
  double y0 = 0.0;
  std::vector<double> ybar;
  int n() const { return static_cast<int>(ybar.size()); }
};

struct ReducedPoint {
  double x0 = 0.0;
  double r = 0.0;
  double s = 0.0;
  double z = 0.0;
  double u = 1.0;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// r = |xbar|, s = <xbar,ybar>/u, z = y0/u, u = |ybar|; throws on u = 0.
ReducedPoint reduce(const ConfigPoint& x, const TangentVector& y);

// Seeded Haar-ish orthogonal matrix: QR of a Gaussian sample with sign-fixed
// diagonal. Both determinant signs occur (the symmetry group is O(n)).
Eigen::MatrixXd random_orthogonal(std::uint64_t seed, int n);

struct SymmetryReport {
  int samples = 0;
  double max_abs_deviation = 0.0;
  double max_rel_deviation = 0.0;
  ReducedPoint worst;  // reduced coordinates of the worst sample
};

}  // namespace cylfin

#endif  // CYLFIN_COORDS_HPP_
