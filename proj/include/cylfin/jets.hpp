#ifndef CYLFIN_JETS_HPP_
#define CYLFIN_JETS_HPP_

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "cylfin/expr.hpp"

namespace cylfin {

// Truncated multivariate Taylor arithmetic (forward-mode jets). All values are
// exact partial derivatives of the represented function at the expansion
// point, up to the tracked validity order; no finite differencing anywhere.

inline double factorial(int n) {
  static const double table[] = {1.,      1.,       2.,        6.,         24.,
                                 120.,    720.,     5040.,     40320.,     362880.,
                                 3628800., 39916800., 479001600., 6227020800., 87178291200.,
                                 1307674368000., 20922789888000., 355687428096000.};
  assert(n >= 0 && n < 18);
  return table[n];
}

// g0^q for rational q; integer exponents allow negative base.
inline double base_pow(double g0, const Rational& q) {
  if (q.is_integer()) {
    double acc = 1.0;
    double b = q.num >= 0 ? g0 : 1.0 / g0;
    std::int64_t n = q.num >= 0 ? q.num : -q.num;
    for (std::int64_t i = 0; i < n; ++i) acc *= b;
    return acc;
  }
  if (g0 < 0) throw std::domain_error("negative base with rational exponent in jet");
  return std::pow(g0, q.to_double());
}

// ---------------------------------------------------------------------------
// Jet4: Taylor expansion in (x0, r, s, z) with independent per-axis caps.
// Storage caps are fixed per computation; `valid` tracks per-axis derivative
// orders that are trustworthy (derivatives shrink the valid box).
// ---------------------------------------------------------------------------

class Jet4 {
 public:
  std::array<int, 4> dim{1, 1, 1, 1};    // storage extent per axis (cap+1)
  std::array<int, 4> valid{0, 0, 0, 0};  // valid derivative order per axis
  std::vector<double> c;                 // taylor coefficients

  Jet4() : c(1, 0.0) {}
  explicit Jet4(std::array<int, 4> caps) {
    for (int i = 0; i < 4; ++i) {
      dim[i] = caps[i] + 1;
      valid[i] = caps[i];
    }
    c.assign(static_cast<std::size_t>(dim[0]) * dim[1] * dim[2] * dim[3], 0.0);
  }

  static Jet4 constant(std::array<int, 4> caps, double v) {
    Jet4 j(caps);
    j.c[0] = v;
    return j;
  }
  static Jet4 coordinate(std::array<int, 4> caps, Axis axis, double v) {
    Jet4 j(caps);
    j.c[0] = v;
    int a = static_cast<int>(axis);
    if (j.dim[a] > 1) j.c[j.stride(a)] = 1.0;
    return j;
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = 3; i > axis; --i) s *= dim[i];
    return s;
  }
  std::size_t index(int a, int b, int cc, int d) const {
    return ((static_cast<std::size_t>(a) * dim[1] + b) * dim[2] + cc) * dim[3] + d;
  }
  double coeff(int a, int b, int cc, int d) const { return c[index(a, b, cc, d)]; }

  double value() const { return c[0]; }
  double partial(int a, int b, int cc, int d) const {
    assert(a <= valid[0] && b <= valid[1] && cc <= valid[2] && d <= valid[3]);
    return coeff(a, b, cc, d) * factorial(a) * factorial(b) * factorial(cc) * factorial(d);
  }

  // d/d(axis); valid order on that axis drops by one.
  Jet4 deriv(Axis axis) const {
    int ax = static_cast<int>(axis);
    Jet4 out(*this);
    std::fill(out.c.begin(), out.c.end(), 0.0);
    out.valid[ax] = valid[ax] > 0 ? valid[ax] - 1 : 0;
    if (valid[ax] == 0)
      throw std::logic_error("jet derivative exceeds valid order");
    std::array<int, 4> e{};
    for (e[0] = 0; e[0] < dim[0]; ++e[0])
      for (e[1] = 0; e[1] < dim[1]; ++e[1])
        for (e[2] = 0; e[2] < dim[2]; ++e[2])
          for (e[3] = 0; e[3] < dim[3]; ++e[3]) {
            if (e[ax] + 1 >= dim[ax]) continue;
            std::array<int, 4> src = e;
            src[ax] += 1;
            out.c[out.index(e[0], e[1], e[2], e[3])] =
                c[index(src[0], src[1], src[2], src[3])] * src[ax];
          }
    return out;
  }

  friend Jet4 operator+(const Jet4& x, const Jet4& y) {
    Jet4 out = x;
    assert(x.dim == y.dim);
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] += y.c[i];
    for (int i = 0; i < 4; ++i) out.valid[i] = std::min(x.valid[i], y.valid[i]);
    return out;
  }
  friend Jet4 operator-(const Jet4& x, const Jet4& y) {
    Jet4 out = x;
    assert(x.dim == y.dim);
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] -= y.c[i];
    for (int i = 0; i < 4; ++i) out.valid[i] = std::min(x.valid[i], y.valid[i]);
    return out;
  }
  Jet4 operator-() const {
    Jet4 out = *this;
    for (double& v : out.c) v = -v;
    return out;
  }
  friend Jet4 operator*(const Jet4& x, double k) {
    Jet4 out = x;
    for (double& v : out.c) v *= k;
    return out;
  }
  friend Jet4 operator*(double k, const Jet4& x) { return x * k; }
  friend Jet4 operator+(const Jet4& x, double k) {
    Jet4 out = x;
    out.c[0] += k;
    return out;
  }
  friend Jet4 operator+(double k, const Jet4& x) { return x + k; }
  friend Jet4 operator-(const Jet4& x, double k) { return x + (-k); }
  friend Jet4 operator-(double k, const Jet4& x) { return (-x) + k; }
  friend Jet4 operator/(const Jet4& x, double k) { return x * (1.0 / k); }

  friend Jet4 operator*(const Jet4& x, const Jet4& y) {
    assert(x.dim == y.dim);
    Jet4 out(std::array<int, 4>{x.dim[0] - 1, x.dim[1] - 1, x.dim[2] - 1, x.dim[3] - 1});
    for (int i = 0; i < 4; ++i) out.valid[i] = std::min(x.valid[i], y.valid[i]);
    for (int a1 = 0; a1 < x.dim[0]; ++a1)
      for (int b1 = 0; b1 < x.dim[1]; ++b1)
        for (int c1 = 0; c1 < x.dim[2]; ++c1)
          for (int d1 = 0; d1 < x.dim[3]; ++d1) {
            double xv = x.coeff(a1, b1, c1, d1);
            if (xv == 0.0) continue;
            for (int a2 = 0; a2 + a1 < x.dim[0]; ++a2)
              for (int b2 = 0; b2 + b1 < x.dim[1]; ++b2)
                for (int c2 = 0; c2 + c1 < x.dim[2]; ++c2)
                  for (int d2 = 0; d2 + d1 < x.dim[3]; ++d2) {
                    double yv = y.coeff(a2, b2, c2, d2);
                    if (yv == 0.0) continue;
                    out.c[out.index(a1 + a2, b1 + b2, c1 + c2, d1 + d2)] += xv * yv;
                  }
          }
    return out;
  }

  int total_order() const { return dim[0] + dim[1] + dim[2] + dim[3] - 4; }

  // f(g) for analytic f with scaled derivatives coeffs[k] = f^(k)(g0)/k!.
  static Jet4 compose(const Jet4& g, const std::vector<double>& coeffs) {
    std::array<int, 4> caps{g.dim[0] - 1, g.dim[1] - 1, g.dim[2] - 1, g.dim[3] - 1};
    Jet4 ghat = g;
    ghat.c[0] = 0.0;
    int n = static_cast<int>(coeffs.size()) - 1;
    Jet4 res = Jet4::constant(caps, coeffs[n]);
    for (int k = n - 1; k >= 0; --k) {
      res = res * ghat;
      res.c[0] += coeffs[k];
    }
    res.valid = g.valid;
    return res;
  }

  friend Jet4 operator/(const Jet4& x, const Jet4& y) {
    double g0 = y.value();
    if (g0 == 0.0) throw std::domain_error("jet division by zero");
    int n = y.total_order();
    std::vector<double> coeffs(n + 1);
    double p = 1.0 / g0;
    for (int k = 0; k <= n; ++k) {
      coeffs[k] = p;
      p *= -1.0 / g0;
    }
    return x * compose(y, coeffs);
  }
  friend Jet4 operator/(double k, const Jet4& y) {
    return Jet4::constant({y.dim[0] - 1, y.dim[1] - 1, y.dim[2] - 1, y.dim[3] - 1}, k) / y;
  }
};

inline Jet4 pow_jet(const Jet4& g, const Rational& q) {
  double g0 = g.value();
  int n = g.total_order();
  std::vector<double> coeffs(n + 1);
  // coeffs[k] = binom(q, k) * g0^(q-k)
  double qd = q.to_double();
  Rational qk = q;
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    auto qmk = Rational::sub(q, Rational(k));
    if (!qmk) throw std::domain_error("exponent overflow in jet pow");
    coeffs[k] = binom * base_pow(g0, *qmk);
    binom *= (qd - k) / (k + 1);
  }
  (void)qk;
  return Jet4::compose(g, coeffs);
}

inline Jet4 sqrt(const Jet4& g) { return pow_jet(g, Rational(1, 2)); }
inline Jet4 exp(const Jet4& g) {
  int n = g.total_order();
  std::vector<double> coeffs(n + 1);
  double e0 = std::exp(g.value());
  for (int k = 0; k <= n; ++k) coeffs[k] = e0 / factorial(k);
  return Jet4::compose(g, coeffs);
}
inline Jet4 log(const Jet4& g) {
  double g0 = g.value();
  if (g0 <= 0) throw std::domain_error("log of non-positive jet");
  int n = g.total_order();
  std::vector<double> coeffs(n + 1);
  coeffs[0] = std::log(g0);
  double p = 1.0 / g0;
  for (int k = 1; k <= n; ++k) {
    coeffs[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
    p /= g0;
  }
  return Jet4::compose(g, coeffs);
}
inline Jet4 sin(const Jet4& g) {
  int n = g.total_order();
  std::vector<double> coeffs(n + 1);
  double s0 = std::sin(g.value()), c0 = std::cos(g.value());
  const double cycle[4] = {s0, c0, -s0, -c0};
  for (int k = 0; k <= n; ++k) coeffs[k] = cycle[k % 4] / factorial(k);
  return Jet4::compose(g, coeffs);
}
inline Jet4 cos(const Jet4& g) {
  int n = g.total_order();
  std::vector<double> coeffs(n + 1);
  double s0 = std::sin(g.value()), c0 = std::cos(g.value());
  const double cycle[4] = {c0, -s0, -c0, s0};
  for (int k = 0; k <= n; ++k) coeffs[k] = cycle[k % 4] / factorial(k);
  return Jet4::compose(g, coeffs);
}

// ---------------------------------------------------------------------------
// SZJet: table of exact (s,z)-partial values of a scalar field at a point.
// The Psi operator of the Douglas calculus consumes one order per application.
// ---------------------------------------------------------------------------

class SZJet {
 public:
  double s0 = 0.0, z0 = 0.0;
  int cs = 0, cz = 0;      // valid caps in s and z
  std::vector<double> v;   // partial values, row-major (cs+1) x (cz+1)

  SZJet() : v(1, 0.0) {}
  SZJet(double s, double z, int caps_s, int caps_z)
      : s0(s), z0(z), cs(caps_s), cz(caps_z), v(static_cast<std::size_t>(caps_s + 1) * (caps_z + 1), 0.0) {}

  double& at(int c, int d) {
    if (c > cs || d > cz) throw std::logic_error("SZJet lookup beyond populated order");
    return v[static_cast<std::size_t>(c) * (cz + 1) + d];
  }
  double at(int c, int d) const {
    if (c > cs || d > cz) throw std::logic_error("SZJet lookup beyond populated order");
    return v[static_cast<std::size_t>(c) * (cz + 1) + d];
  }
  double value() const { return at(0, 0); }

  static SZJet from_jet4(const Jet4& j, double s, double z) {
    SZJet out(s, z, j.valid[2], j.valid[3]);
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) out.at(c, d) = j.partial(0, 0, c, d);
    return out;
  }

  SZJet ds() const {
    if (cs < 1) throw std::logic_error("SZJet: insufficient s-order for derivative");
    SZJet out(s0, z0, cs - 1, cz);
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) out.at(c, d) = at(c + 1, d);
    return out;
  }
  SZJet dz() const {
    if (cz < 1) throw std::logic_error("SZJet: insufficient z-order for derivative");
    SZJet out(s0, z0, cs, cz - 1);
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) out.at(c, d) = at(c, d + 1);
    return out;
  }

  friend SZJet operator+(const SZJet& x, const SZJet& y) {
    SZJet out(x.s0, x.z0, std::min(x.cs, y.cs), std::min(x.cz, y.cz));
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) out.at(c, d) = x.at(c, d) + y.at(c, d);
    return out;
  }
  friend SZJet operator-(const SZJet& x, const SZJet& y) {
    SZJet out(x.s0, x.z0, std::min(x.cs, y.cs), std::min(x.cz, y.cz));
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) out.at(c, d) = x.at(c, d) - y.at(c, d);
    return out;
  }
  friend SZJet operator*(const SZJet& x, double k) {
    SZJet out = x;
    for (double& e : out.v) e *= k;
    return out;
  }
  friend SZJet operator*(double k, const SZJet& x) { return x * k; }

  // Leibniz product of two partial-value tables.
  friend SZJet operator*(const SZJet& x, const SZJet& y) {
    SZJet out(x.s0, x.z0, std::min(x.cs, y.cs), std::min(x.cz, y.cz));
    for (int c = 0; c <= out.cs; ++c)
      for (int d = 0; d <= out.cz; ++d) {
        double sum = 0.0;
        for (int i = 0; i <= c; ++i)
          for (int j = 0; j <= d; ++j)
            sum += binom(c, i) * binom(d, j) * x.at(i, j) * y.at(c - i, d - j);
        out.at(c, d) = sum;
      }
    return out;
  }

  static double binom(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }
};

// Psi(Theta) = -s Theta_s - z Theta_z as a jet; consumes one order per axis.
inline SZJet psi(const SZJet& t) {
  if (t.cs < 1 || t.cz < 1) throw std::logic_error("psi: insufficient jet order");
  SZJet out(t.s0, t.z0, t.cs - 1, t.cz - 1);
  for (int c = 0; c <= out.cs; ++c)
    for (int d = 0; d <= out.cz; ++d)
      out.at(c, d) = -(t.s0 * t.at(c + 1, d) + c * t.at(c, d)) -
                     (t.z0 * t.at(c, d + 1) + d * t.at(c, d));
  return out;
}

// Multiply by z^m (any integer m, z0 != 0 when m < 0); caps unchanged.
inline SZJet mul_zpow(const SZJet& t, int m) {
  SZJet out(t.s0, t.z0, t.cs, t.cz);
  for (int c = 0; c <= out.cs; ++c)
    for (int d = 0; d <= out.cz; ++d) {
      double sum = 0.0;
      for (int e = 0; e <= d; ++e) {
        // e-th derivative of z^m at z0
        double f = 1.0;
        for (int j = 0; j < e; ++j) f *= (m - j);
        double zp = base_pow(t.z0, Rational(m - e));
        sum += SZJet::binom(d, e) * f * zp * t.at(c, d - e);
      }
      out.at(c, d) = sum;
    }
  return out;
}

// ---------------------------------------------------------------------------
// MultiJet: dense truncated Taylor expansion in m variables to total order K.
// Used for the fiber-derivative (Douglas) and P/Q spray oracles.
// ---------------------------------------------------------------------------

class MJSpace {
 public:
  int nvars, order;
  std::vector<std::vector<int>> expo;  // monomial exponents per slot
  std::vector<int> degree;
  std::vector<std::vector<int>> prod;    // slot of monomial product, -1 if truncated
  std::vector<std::vector<int>> dshift;  // dshift[slot][v]: slot of expo - e_v, else -1

  static std::shared_ptr<const MJSpace> get(int nvars, int order);

 private:
  MJSpace(int nv, int k);
};

class MultiJet {
 public:
  std::shared_ptr<const MJSpace> sp;
  std::vector<double> c;

  MultiJet() = default;
  MultiJet(std::shared_ptr<const MJSpace> space, double v0 = 0.0)
      : sp(std::move(space)), c(sp->expo.size(), 0.0) {
    c[0] = v0;
  }
  static MultiJet variable(std::shared_ptr<const MJSpace> space, int var, double v0) {
    MultiJet j(space, v0);
    for (std::size_t i = 0; i < j.sp->expo.size(); ++i) {
      if (j.sp->degree[i] == 1 && j.sp->expo[i][var] == 1) {
        j.c[i] = 1.0;
        break;
      }
    }
    return j;
  }

  double value() const { return c[0]; }
  double partial(const std::vector<int>& e) const;

  MultiJet deriv(int var) const {
    MultiJet out(sp);
    out.c[0] = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == 0.0) continue;
      int lower = sp->dshift[i][var];
      if (lower >= 0) out.c[lower] += c[i] * sp->expo[i][var];
    }
    return out;
  }

  friend MultiJet operator+(const MultiJet& x, const MultiJet& y) {
    MultiJet out = x;
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] += y.c[i];
    return out;
  }
  friend MultiJet operator-(const MultiJet& x, const MultiJet& y) {
    MultiJet out = x;
    for (std::size_t i = 0; i < out.c.size(); ++i) out.c[i] -= y.c[i];
    return out;
  }
  MultiJet operator-() const {
    MultiJet out = *this;
    for (double& v : out.c) v = -v;
    return out;
  }
  friend MultiJet operator*(const MultiJet& x, double k) {
    MultiJet out = x;
    for (double& v : out.c) v *= k;
    return out;
  }
  friend MultiJet operator*(double k, const MultiJet& x) { return x * k; }
  friend MultiJet operator+(const MultiJet& x, double k) {
    MultiJet out = x;
    out.c[0] += k;
    return out;
  }
  friend MultiJet operator+(double k, const MultiJet& x) { return x + k; }
  friend MultiJet operator-(const MultiJet& x, double k) { return x + (-k); }
  friend MultiJet operator-(double k, const MultiJet& x) { return (-x) + k; }
  friend MultiJet operator/(const MultiJet& x, double k) { return x * (1.0 / k); }

  friend MultiJet operator*(const MultiJet& x, const MultiJet& y) {
    MultiJet out(x.sp);
    const auto& prod = x.sp->prod;
    for (std::size_t i = 0; i < x.c.size(); ++i) {
      double xv = x.c[i];
      if (xv == 0.0) continue;
      const auto& row = prod[i];
      for (std::size_t j = 0; j < y.c.size(); ++j) {
        double yv = y.c[j];
        if (yv == 0.0) continue;
        int slot = row[j];
        if (slot >= 0) out.c[slot] += xv * yv;
      }
    }
    return out;
  }

  static MultiJet compose(const MultiJet& g, const std::vector<double>& coeffs) {
    MultiJet ghat = g;
    ghat.c[0] = 0.0;
    int n = static_cast<int>(coeffs.size()) - 1;
    MultiJet res(g.sp, coeffs[n]);
    for (int k = n - 1; k >= 0; --k) {
      res = res * ghat;
      res.c[0] += coeffs[k];
    }
    return res;
  }

  friend MultiJet operator/(const MultiJet& x, const MultiJet& y) {
    double g0 = y.value();
    if (g0 == 0.0) throw std::domain_error("jet division by zero");
    int n = y.sp->order;
    std::vector<double> coeffs(n + 1);
    double p = 1.0 / g0;
    for (int k = 0; k <= n; ++k) {
      coeffs[k] = p;
      p *= -1.0 / g0;
    }
    return x * compose(y, coeffs);
  }
  friend MultiJet operator/(double k, const MultiJet& y) { return MultiJet(y.sp, k) / y; }
};

inline MultiJet pow_jet(const MultiJet& g, const Rational& q) {
  double g0 = g.value();
  int n = g.sp->order;
  std::vector<double> coeffs(n + 1);
  double qd = q.to_double();
  double binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    auto qmk = Rational::sub(q, Rational(k));
    if (!qmk) throw std::domain_error("exponent overflow in jet pow");
    coeffs[k] = binom * base_pow(g0, *qmk);
    binom *= (qd - k) / (k + 1);
  }
  return MultiJet::compose(g, coeffs);
}

inline MultiJet sqrt(const MultiJet& g) { return pow_jet(g, Rational(1, 2)); }
inline MultiJet exp(const MultiJet& g) {
  int n = g.sp->order;
  std::vector<double> coeffs(n + 1);
  double e0 = std::exp(g.value());
  for (int k = 0; k <= n; ++k) coeffs[k] = e0 / factorial(k);
  return MultiJet::compose(g, coeffs);
}
inline MultiJet log(const MultiJet& g) {
  double g0 = g.value();
  if (g0 <= 0) throw std::domain_error("log of non-positive jet");
  int n = g.sp->order;
  std::vector<double> coeffs(n + 1);
  coeffs[0] = std::log(g0);
  double p = 1.0 / g0;
  for (int k = 1; k <= n; ++k) {
    coeffs[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
    p /= g0;
  }
  return MultiJet::compose(g, coeffs);
}
inline MultiJet sin(const MultiJet& g) {
  int n = g.sp->order;
  std::vector<double> coeffs(n + 1);
  double s0 = std::sin(g.value()), c0 = std::cos(g.value());
  const double cycle[4] = {s0, c0, -s0, -c0};
  for (int k = 0; k <= n; ++k) coeffs[k] = cycle[k % 4] / factorial(k);
  return MultiJet::compose(g, coeffs);
}
inline MultiJet cos(const MultiJet& g) {
  int n = g.sp->order;
  std::vector<double> coeffs(n + 1);
  double s0 = std::sin(g.value()), c0 = std::cos(g.value());
  const double cycle[4] = {c0, -s0, -c0, s0};
  for (int k = 0; k <= n; ++k) coeffs[k] = cycle[k % 4] / factorial(k);
  return MultiJet::compose(g, coeffs);
}

// Evaluate a 2-variable partial table T (at (s0,z0)) on jet arguments:
// sum_{c,d} T(c,d)/(c! d!) * (s - s0)^c * (z - z0)^d.
MultiJet compose_sz(const SZJet& table, const MultiJet& s, const MultiJet& z);

// --- evaluate_generic glue --------------------------------------------------

namespace detail {
template <>
inline Jet4 rebuild_constant<Jet4>(const Jet4& like, double v) {
  return Jet4::constant({like.dim[0] - 1, like.dim[1] - 1, like.dim[2] - 1, like.dim[3] - 1}, v);
}
template <>
inline MultiJet rebuild_constant<MultiJet>(const MultiJet& like, double v) {
  return MultiJet(like.sp, v);
}
template <>
inline Jet4 pow_rational<Jet4>(const Jet4& base, const Rational& q, const ExprNode*) {
  return pow_jet(base, q);
}
template <>
inline MultiJet pow_rational<MultiJet>(const MultiJet& base, const Rational& q, const ExprNode*) {
  return pow_jet(base, q);
}
}  // namespace detail

}  // namespace cylfin

#endif  // CYLFIN_JETS_HPP_
