#include "cylfin/geodesic.hpp"

#include <cmath>
#include <ostream>

namespace cylfin {

namespace {

struct State {
  std::vector<double> q;  // x0, xbar..., y0, ybar...
};

State axpy(const State& a, double h, const State& b) {
  State out = a;
  for (std::size_t i = 0; i < out.q.size(); ++i) out.q[i] += h * b.q[i];
  return out;
}

}  // namespace

Trace geodesic_integrate(const PhiModel& model, const ConfigPoint& x0, const TangentVector& y0,
                         double t_end, int steps) {
  if (steps <= 0) throw std::invalid_argument("geodesic_integrate: steps must be positive");
  const int n = model.n;
  const int dim = n + 1;

  auto pack = [&](const ConfigPoint& x, const TangentVector& v) {
    State st;
    st.q.reserve(2 * dim);
    st.q.push_back(x.x0);
    st.q.insert(st.q.end(), x.xbar.begin(), x.xbar.end());
    st.q.push_back(v.y0);
    st.q.insert(st.q.end(), v.ybar.begin(), v.ybar.end());
    return st;
  };
  auto unpack = [&](const State& st, ConfigPoint& x, TangentVector& v) {
    x.x0 = st.q[0];
    x.xbar.assign(st.q.begin() + 1, st.q.begin() + dim);
    v.y0 = st.q[dim];
    v.ybar.assign(st.q.begin() + dim + 1, st.q.end());
  };

  auto rhs = [&](const State& st) {
    ConfigPoint x;
    TangentVector v;
    unpack(st, x, v);
    SprayCoefficients G = spray_coefficients(model, x, v);
    State d;
    d.q.resize(2 * dim);
    d.q[0] = v.y0;
    for (int i = 0; i < n; ++i) d.q[1 + i] = v.ybar[i];
    d.q[dim] = -2.0 * G.G0;
    for (int i = 0; i < n; ++i) d.q[dim + 1 + i] = -2.0 * G.Gi[i];
    return d;
  };

  Trace tr;
  State st = pack(x0, y0);
  const double h = t_end / steps;
  double F0 = model.eval_F(x0, y0);
  if (!(F0 > 0.0)) throw DomainError("geodesic_integrate: F must be positive at the start");

  for (int k = 0; k <= steps; ++k) {
    ConfigPoint x;
    TangentVector v;
    unpack(st, x, v);
    double F = model.eval_F(x, v);
    double t = k * h;
    tr.rows.push_back({t, x, v, F});
    tr.F_drift = std::max(tr.F_drift, std::abs(F - F0) / F0);
    if (k == steps) break;

    State k1 = rhs(st);
    State k2 = rhs(axpy(st, 0.5 * h, k1));
    State k3 = rhs(axpy(st, 0.5 * h, k2));
    State k4 = rhs(axpy(st, h, k3));
    for (std::size_t i = 0; i < st.q.size(); ++i)
      st.q[i] += (h / 6.0) * (k1.q[i] + 2.0 * k2.q[i] + 2.0 * k3.q[i] + k4.q[i]);
  }
  return tr;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  if (trace.rows.empty()) return;
  const int n = int(trace.rows.front().x.xbar.size());
  os << "t,x0";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << ",v0";
  for (int i = 1; i <= n; ++i) os << ",v" << i;
  os << ",F\n";
  os.precision(17);
  for (const TraceRow& row : trace.rows) {
    os << row.t << ',' << row.x.x0;
    for (double v : row.x.xbar) os << ',' << v;
    os << ',' << row.v.y0;
    for (double v : row.v.ybar) os << ',' << v;
    os << ',' << row.F << '\n';
  }
}

}  // namespace cylfin
