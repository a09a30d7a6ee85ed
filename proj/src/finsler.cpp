#include "cylfin/finsler.hpp"

#include <cmath>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cylfin {

double PhiModel::eval_phi(const ReducedPoint& p) const {
  std::unordered_map<std::string, double> bindings(params.begin(), params.end());
  bindings["x0"] = p.x0;
  bindings["r"] = p.r;
  bindings["s"] = p.s;
  bindings["z"] = p.z;
  return evaluate(phi, bindings);
}

double PhiModel::eval_F(const ConfigPoint& x, const TangentVector& y) const {
  ReducedPoint p = reduce(x, y);
  return p.u * eval_phi(p);
}

PhiJet::PhiJet(const PhiModel& model, const ReducedPoint& p) : model_(model), p_(p) {
  exprs_[{0, 0, 0, 0}] = model.phi;
}

double PhiJet::at(int a, int b, int c, int d) const {
  std::array<int, 4> idx{a, b, c, d};
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = values_.find(idx); it != values_.end()) return it->second;
  // extend symbolically from a populated neighbor one order down
  std::function<Expression(std::array<int, 4>)> expr_for =
      [&](std::array<int, 4> e) -> Expression {
    if (auto it = exprs_.find(e); it != exprs_.end()) return it->second;
    for (int ax = 0; ax < 4; ++ax) {
      if (e[ax] == 0) continue;
      std::array<int, 4> lower = e;
      lower[ax] -= 1;
      Expression base = expr_for(lower);
      Expression de = differentiate(base, static_cast<Axis>(ax));
      exprs_[e] = de;
      return de;
    }
    return model_.phi;
  };
  Expression e = expr_for(idx);
  std::unordered_map<std::string, double> bindings(model_.params.begin(), model_.params.end());
  bindings["x0"] = p_.x0;
  bindings["r"] = p_.r;
  bindings["s"] = p_.s;
  bindings["z"] = p_.z;
  double v = evaluate(e, bindings);
  values_[idx] = v;
  return v;
}

Jet4 phi_jet4(const PhiModel& model, const ReducedPoint& p, std::array<int, 4> caps) {
  EvalEnv<Jet4> env;
  Jet4 jx0 = Jet4::coordinate(caps, Axis::x0, p.x0);
  Jet4 jr = Jet4::coordinate(caps, Axis::r, p.r);
  Jet4 js = Jet4::coordinate(caps, Axis::s, p.s);
  Jet4 jz = Jet4::coordinate(caps, Axis::z, p.z);
  env.axis = {&jx0, &jr, &js, &jz};
  std::unordered_map<std::string, double> params(model.params.begin(), model.params.end());
  env.params = &params;
  env.proto = Jet4::constant(caps, 0.0);
  return evaluate_generic<Jet4>(model.phi, env);
}

FundamentalScalars fundamental_scalars(const Jet4& phi, const ReducedPoint& p) {
  FundamentalScalars out;
  out.F_over_u = phi.value();
  double phi_s = phi.partial(0, 0, 1, 0);
  double phi_z = phi.partial(0, 0, 0, 1);
  double phi_ss = phi.partial(0, 0, 2, 0);
  double phi_sz = phi.partial(0, 0, 1, 1);
  double phi_zz = phi.partial(0, 0, 0, 2);
  out.Omega = phi.value() - p.s * phi_s - p.z * phi_z;
  out.Lambda = out.Omega * phi_zz + (p.r * p.r - p.s * p.s) * (phi_ss * phi_zz - phi_sz * phi_sz);
  return out;
}

FundamentalScalars fundamental_scalars(const PhiModel& model, const ReducedPoint& p) {
  return fundamental_scalars(phi_jet4(model, p, {0, 0, 2, 2}), p);
}

FundamentalTensor metric_tensor(const PhiModel& model, const ConfigPoint& x,
                                const TangentVector& y) {
  ReducedPoint p = reduce(x, y);
  const int n = model.n;
  Jet4 phi = phi_jet4(model, p, {0, 0, 2, 2});

  double f = phi.value();
  double f_s = phi.partial(0, 0, 1, 0);
  double f_z = phi.partial(0, 0, 0, 1);
  double f_ss = phi.partial(0, 0, 2, 0);
  double f_sz = phi.partial(0, 0, 1, 1);
  double f_zz = phi.partial(0, 0, 0, 2);

  double omega = f - p.s * f_s - p.z * f_z;
  double omega_s = -p.s * f_ss - p.z * f_sz;
  double omega_z = -p.s * f_sz - p.z * f_zz;
  double lambda = omega * f_zz + (p.r * p.r - p.s * p.s) * (f_ss * f_zz - f_sz * f_sz);

  double fo = f * omega;
  double fo_s = f_s * omega + f * omega_s;
  double fo_z = f_z * omega + f * omega_z;

  FundamentalTensor out;
  out.scalars = {f, omega, lambda};
  out.g = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.g(0, 0) = f_z * f_z + f * f_zz;
  std::vector<double> ui(n);
  for (int i = 0; i < n; ++i) ui[i] = y.ybar[i] / p.u;
  const double xa = -(p.s * fo_s + p.z * fo_z);
  const double xb = fo_s;
  const double xc = f_s * f_s + f * f_ss;
  for (int i = 0; i < n; ++i) {
    double g0i = fo_z * ui[i] + (f_s * f_z + f * f_sz) * x.xbar[i];
    out.g(0, i + 1) = g0i;
    out.g(i + 1, 0) = g0i;
    for (int j = 0; j < n; ++j) {
      double xij = xa * ui[i] * ui[j] + xb * (ui[i] * x.xbar[j] + x.xbar[i] * ui[j]) +
                   xc * x.xbar[i] * x.xbar[j];
      out.g(i + 1, j + 1) = (i == j ? fo : 0.0) + xij;
    }
  }
  out.det_closed_form =
      std::pow(f, n + 2) * std::pow(omega, n - 2) * lambda;
  return out;
}

ValidityReport validity_scan(const PhiModel& model, const GridSpec& grid, int threads) {
  const int total = grid.x0.count * grid.r.count * grid.sfrac.count * grid.z.count;
  std::vector<ValidityViolation> results(total);
  std::vector<char> has_error(total, 0);

  auto point_at = [&](int idx) {
    int iz = idx % grid.z.count;
    int is = (idx / grid.z.count) % grid.sfrac.count;
    int ir = (idx / (grid.z.count * grid.sfrac.count)) % grid.r.count;
    int ix = idx / (grid.z.count * grid.sfrac.count * grid.r.count);
    ReducedPoint p;
    p.x0 = grid.x0.at(ix);
    p.r = grid.r.at(ir);
    p.s = grid.sfrac.at(is) * p.r;
    p.z = grid.z.at(iz);
    p.u = 1.0;
    return p;
  };

  auto eval_point = [&](int idx) {
    ValidityViolation v;
    v.p = point_at(idx);
    try {
      FundamentalScalars sc = fundamental_scalars(model, v.p);
      v.omega = sc.Omega;
      v.lambda = sc.Lambda;
      v.phi = sc.F_over_u;
    } catch (const std::exception& e) {
      v.error = e.what();
      has_error[idx] = 1;
    }
    results[idx] = v;
  };

#ifdef _OPENMP
  if (threads != 1) {
    if (threads > 1) omp_set_num_threads(threads);
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < total; ++idx) eval_point(idx);
  } else {
    for (int idx = 0; idx < total; ++idx) eval_point(idx);
  }
#else
  (void)threads;
  for (int idx = 0; idx < total; ++idx) eval_point(idx);
#endif

  // deterministic serial reduction in grid order
  const double floor = 1e-12;
  ValidityReport rep;
  rep.points_scanned = total;
  bool first = true;
  for (int idx = 0; idx < total; ++idx) {
    const ValidityViolation& v = results[idx];
    if (has_error[idx]) {
      rep.violations.push_back(v);
      continue;
    }
    if (first || v.omega < rep.min_omega) {
      rep.min_omega = v.omega;
      rep.argmin_omega = v.p;
    }
    if (first || v.lambda < rep.min_lambda) {
      rep.min_lambda = v.lambda;
      rep.argmin_lambda = v.p;
    }
    if (first || v.phi < rep.min_phi) rep.min_phi = v.phi;
    first = false;
    bool bad = v.phi <= floor || v.lambda <= floor || (model.n >= 3 && v.omega <= floor);
    if (bad && rep.violations.size() < 32) rep.violations.push_back(v);
  }
  bool positivity = !first && rep.min_phi > floor && rep.min_lambda > floor &&
                    (model.n < 3 || rep.min_omega > floor);
  rep.valid = positivity && rep.violations.empty();
  return rep;
}

std::vector<FullSample> draw_samples(const PhiModel& model, const SampleSet& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = model.n;

  auto random_unit = [&]() {
    std::vector<double> v(n);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int i = 0; i < n; ++i) {
        v[i] = gauss(rng);
        norm += v[i] * v[i];
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
    return v;
  };

  std::vector<FullSample> out;
  out.reserve(spec.count);
  for (int k = 0; k < spec.count; ++k) {
    FullSample fs;
    double x0 = model.x0_interval[0] + (model.x0_interval[1] - model.x0_interval[0]) * unif(rng);
    double r = 0.1 + (0.9 * model.rho - 0.1) * unif(rng);
    double sfrac = -0.9 + 1.8 * unif(rng);
    double zmag = spec.z_min + (spec.z_max - spec.z_min) * unif(rng);
    double z = (unif(rng) < 0.5 ? -1.0 : 1.0) * zmag;
    double s = sfrac * r;

    std::vector<double> e = random_unit();
    // f: unit vector orthogonal to e
    std::vector<double> f(n);
    double dot = 0.0, norm = 0.0;
    do {
      std::vector<double> g = random_unit();
      dot = 0.0;
      for (int i = 0; i < n; ++i) dot += g[i] * e[i];
      norm = 0.0;
      for (int i = 0; i < n; ++i) {
        f[i] = g[i] - dot * e[i];
        norm += f[i] * f[i];
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& c : f) c /= norm;

    fs.x.x0 = x0;
    fs.x.xbar.resize(n);
    fs.y.y0 = z;  // u = 1
    fs.y.ybar.resize(n);
    double t = s / r;  // = <e, ybar>
    double w = std::sqrt(std::max(0.0, 1.0 - t * t));
    for (int i = 0; i < n; ++i) {
      fs.x.xbar[i] = r * e[i];
      fs.y.ybar[i] = t * e[i] + w * f[i];
    }
    fs.p = reduce(fs.x, fs.y);
    out.push_back(std::move(fs));
  }
  return out;
}

SymmetryReport symmetry_check(const PhiModel& model, int samples, std::uint64_t seed) {
  SampleSet spec;
  spec.count = samples;
  spec.seed = seed;
  std::vector<FullSample> pts = draw_samples(model, spec);
  SymmetryReport rep;
  rep.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const FullSample& fs = pts[k];
    double f0 = model.eval_F(fs.x, fs.y);
    Eigen::MatrixXd o = random_orthogonal(seed * 1000003u + k, model.n);
    ConfigPoint xr = fs.x;
    TangentVector yr = fs.y;
    for (int i = 0; i < model.n; ++i) {
      double xs = 0.0, ys = 0.0;
      for (int j = 0; j < model.n; ++j) {
        xs += o(i, j) * fs.x.xbar[j];
        ys += o(i, j) * fs.y.ybar[j];
      }
      xr.xbar[i] = xs;
      yr.ybar[i] = ys;
    }
    double f1 = model.eval_F(xr, yr);
    double dev = std::abs(f1 - f0);
    double rel = dev / std::max(1.0, std::abs(f0));
    if (dev > rep.max_abs_deviation) {
      rep.max_abs_deviation = dev;
      rep.worst = fs.p;
    }
    rep.max_rel_deviation = std::max(rep.max_rel_deviation, rel);
  }
  return rep;
}

}  // namespace cylfin
