#ifndef CYLFIN_GEODESIC_HPP_
#define CYLFIN_GEODESIC_HPP_

#include <iosfwd>
#include <vector>

#include "cylfin/spray.hpp"

namespace cylfin {

// One sample of a geodesic trace: position, velocity, and the (conserved)
// metric value F(x, v).
struct TraceRow {
  double t;
  ConfigPoint x;
  TangentVector v;
  double F;
};

struct Trace {
  std::vector<TraceRow> rows;
  double F_drift = 0.0;  // max |F - F0| / F0 along the trace
};

// Classical RK4 on the geodesic equation xdd^A = -2 G^A(x, xd). Aborts with
// DomainError if the trace leaves the valid domain (u -> 0, r -> 0 or beyond
// rho). steps must be positive.
Trace geodesic_integrate(const PhiModel& model, const ConfigPoint& x0, const TangentVector& y0,
                         double t_end, int steps);

// CSV with header t,x0,x1..xn,v0,v1..vn,F.
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace cylfin

#endif  // CYLFIN_GEODESIC_HPP_
