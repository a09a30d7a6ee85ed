#include "cylfin/coords.hpp"

#include <cmath>

namespace cylfin {

ReducedPoint reduce(const ConfigPoint& x, const TangentVector& y) {
  double r2 = 0.0, u2 = 0.0, dot = 0.0;
  const int n = x.n();
  if (y.n() != n) throw DomainError("dimension mismatch between xbar and ybar");
  for (int i = 0; i < n; ++i) {
    r2 += x.xbar[i] * x.xbar[i];
    u2 += y.ybar[i] * y.ybar[i];
    dot += x.xbar[i] * y.ybar[i];
  }
  double u = std::sqrt(u2);
  if (u == 0.0) throw DomainError("zero fiber vector (u = 0)");
  ReducedPoint p;
  p.x0 = x.x0;
  p.r = std::sqrt(r2);
  p.s = dot / u;
  p.z = y.y0 / u;
  p.u = u;
  return p;
}

Eigen::MatrixXd random_orthogonal(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

}  // namespace cylfin
