#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cylfin/catalog.hpp"
#include "cylfin/geodesic.hpp"

using nlohmann::ordered_json;
using namespace cylfin;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::string phi;
  std::string catalog;
  std::vector<std::string> params;
  std::string config_file;
  int n = 3;
  int samples = 100;
  std::uint64_t seed = 7;
  double tol = 0.0;  // 0 = subcommand default
  std::string out;
  std::string format = "json";
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--phi", c.phi, "phi(x0,r,s,z) expression");
  cmd->add_option("--catalog", c.catalog, "catalog entry id (see `examples`)");
  cmd->add_option("--param", c.params, "name=value (repeatable; value may be an expression)");
  cmd->add_option("--config", c.config_file, "key=value config file; flags override");
  cmd->add_option("--n", c.n, "fiber dimension (default 3)");
  cmd->add_option("--samples", c.samples, "sample count");
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--tol", c.tol, "tolerance override");
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--format", c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", c.threads, "thread count for grid scans (1 = serial)");
}

// key=value lines; '#' comments. Only fills fields still at their defaults.
void apply_config_file(Common& c, const CLI::App* cmd) {
  if (c.config_file.empty()) return;
  std::ifstream in(c.config_file);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + c.config_file);
  std::string line;
  auto unset = [&](const std::string& flag) { return cmd->count(flag) == 0; };
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\""));
      s.erase(s.find_last_not_of(" \t\"") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "phi" && unset("--phi")) c.phi = val;
    else if (key == "catalog" && unset("--catalog")) c.catalog = val;
    else if (key == "param") c.params.push_back(val);
    else if (key == "n" && unset("--n")) c.n = std::stoi(val);
    else if (key == "samples" && unset("--samples")) c.samples = std::stoi(val);
    else if (key == "seed" && unset("--seed")) c.seed = std::stoull(val);
    else if (key == "tol" && unset("--tol")) c.tol = std::stod(val);
    else if (key == "threads" && unset("--threads")) c.threads = std::stoi(val);
  }
}

ParamMap parse_params(const std::vector<std::string>& kvs) {
  ParamMap out;
  for (const std::string& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected name=value, got '" + kv + "'");
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

PhiModel resolve_model(const Common& c) {
  if (c.phi.empty() == c.catalog.empty())
    throw CLI::ValidationError("--phi/--catalog", "exactly one of --phi or --catalog is required");
  ParamMap params = parse_params(c.params);
  if (!c.catalog.empty()) {
    PhiModel m = catalog_get(c.catalog, params);
    m.n = c.n;
    return m;
  }
  PhiModel m;
  m.phi = parse(c.phi);
  m.n = c.n;
  for (const auto& [k, v] : params) m.params[k] = evaluate(parse(v), {});
  return m;
}

ordered_json point_json(const ReducedPoint& p) {
  return ordered_json{{"x0", p.x0}, {"r", p.r}, {"s", p.s}, {"z", p.z}, {"u", p.u}};
}

struct Reporter {
  ordered_json j;
  std::vector<std::array<std::string, 4>> csv_rows;
  bool all_pass = true;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit Reporter(const std::string& command, const Common& c) {
    j["tool"] = "cylfin";
    j["version"] = kVersion;
    j["command"] = command;
    ordered_json cfg;
    if (!c.phi.empty()) cfg["phi"] = c.phi;
    if (!c.catalog.empty()) cfg["catalog"] = c.catalog;
    if (!c.params.empty()) cfg["params"] = c.params;
    cfg["n"] = c.n;
    cfg["samples"] = c.samples;
    cfg["seed"] = c.seed;
    cfg["threads"] = c.threads;
    j["config"] = cfg;
    j["checks"] = ordered_json::array();
  }

  void check(const std::string& name, double value, double tol, bool pass,
             std::optional<ReducedPoint> worst = {}) {
    ordered_json c{{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}};
    if (worst) c["worst_point"] = point_json(*worst);
    j["checks"].push_back(c);
    csv_rows.push_back({name, std::to_string(value), std::to_string(tol), pass ? "pass" : "fail"});
    all_pass = all_pass && pass;
  }

  int emit(const Common& c) {
    j["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    std::ostringstream body;
    if (c.format == "json") {
      body << j.dump(2) << "\n";
    } else {
      body << "check,value,tolerance,result\n";
      for (const auto& row : csv_rows)
        body << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << '\n';
    }
    if (c.out.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream f(c.out);
      f << body.str();
    }
    return all_pass ? 0 : 2;
  }
};

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(evaluate(parse(item), {}));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification toolkit for cylindrically symmetric Finsler metrics F = |ybar| phi(x0,r,s,z)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::map<std::string, Common> commons;
  for (const char* name : {"validate", "spray", "douglas", "flatness", "fit", "reduced-pde",
                           "geodesic", "symcheck", "examples"})
    commons[name];

  CLI::App* validate = app.add_subcommand("validate", "positivity scan of Omega and Lambda");
  CLI::App* spray = app.add_subcommand("spray", "closed-form spray vs P/Q oracle");
  CLI::App* douglas = app.add_subcommand("douglas", "closed-form Douglas tensor vs fiber-jet oracle");
  CLI::App* flatness = app.add_subcommand("flatness", "the eight vanishing-Douglas residuals");
  CLI::App* fit = app.add_subcommand("fit", "polynomial coefficients of U, R, T at fixed (x0,r)");
  CLI::App* reduced = app.add_subcommand("reduced-pde", "residual of the reduced transport PDE");
  CLI::App* geodesic = app.add_subcommand("geodesic", "RK4 geodesic trace with F-drift check");
  CLI::App* symcheck = app.add_subcommand("symcheck", "O(n)-invariance of F on random samples");
  CLI::App* examples = app.add_subcommand("examples", "run the full check suite on every catalog entry");
  for (auto* cmd : {validate, spray, douglas, flatness, fit, reduced, geodesic, symcheck})
    add_common(cmd, commons[cmd->get_name()]);
  add_common(examples, commons["examples"]);

  double fit_x0 = 0.0, fit_r = 0.5;
  fit->add_option("--x0", fit_x0, "base x0 (default 0)");
  fit->add_option("--r", fit_r, "base r (default 0.5)");

  std::string geo_x = "0,0.3,0.2,0.1", geo_y = "0.3,0.4,0.1,-0.2";
  double geo_tend = 1.0;
  int geo_steps = 1000;
  geodesic->add_option("--x", geo_x, "start point x0,x1,..,xn");
  geodesic->add_option("--y", geo_y, "start velocity v0,v1,..,vn");
  geodesic->add_option("--t-end", geo_tend, "integration time (default 1)");
  geodesic->add_option("--steps", geo_steps, "RK4 step count (default 1000)");

  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();
  Common& c = commons[cmd->get_name()];

  try {
    apply_config_file(c, cmd);

    if (cmd == examples) {
      Reporter rep("examples", c);
      rep.j["entries"] = ordered_json::array();
      for (const CatalogEntry& e : catalog_list()) {
        VerificationReport vr = catalog_verify(e.id, parse_params(c.params), c.seed);
        ordered_json ej{{"id", e.id}, {"summary", e.summary}, {"pass", vr.all_pass()}};
        ej["checks"] = ordered_json::array();
        for (const CheckResult& ck : vr.checks) {
          ordered_json cj{{"name", ck.name}, {"value", ck.value}, {"tolerance", ck.tol},
                          {"pass", ck.pass}};
          if (!ck.note.empty()) cj["note"] = ck.note;
          ej["checks"].push_back(cj);
        }
        ej["discrepancies"] = ordered_json::array();
        for (const Discrepancy& d : vr.discrepancies)
          ej["discrepancies"].push_back(ordered_json{{"field", d.field},
                                                     {"point", point_json(d.p)},
                                                     {"printed", d.printed},
                                                     {"computed", d.computed}});
        rep.j["entries"].push_back(ej);
        rep.check("entry:" + e.id, 0.0, 0.0, vr.all_pass());
      }
      return rep.emit(c);
    }

    PhiModel model = resolve_model(c);

    if (cmd == geodesic) {
      if (geo_steps <= 0) {
        std::cerr << "geodesic: --steps must be positive\n";
        return 1;
      }
      std::vector<double> xs = parse_vector(geo_x), ys = parse_vector(geo_y);
      if (int(xs.size()) != model.n + 1 || int(ys.size()) != model.n + 1) {
        std::cerr << "geodesic: --x and --y need " << model.n + 1 << " components\n";
        return 1;
      }
      ConfigPoint x{xs[0], {xs.begin() + 1, xs.end()}};
      TangentVector y{ys[0], {ys.begin() + 1, ys.end()}};
      Trace tr = geodesic_integrate(model, x, y, geo_tend, geo_steps);
      double tol = c.tol > 0 ? c.tol : 1e-6;
      if (c.format == "csv") {
        std::ostringstream body;
        write_trace_csv(body, tr);
        if (c.out.empty()) std::cout << body.str();
        else std::ofstream(c.out) << body.str();
        return tr.F_drift < tol ? 0 : 2;
      }
      Reporter rep("geodesic", c);
      rep.j["trace_rows"] = tr.rows.size();
      rep.check("F_drift", tr.F_drift, tol, tr.F_drift < tol);
      return rep.emit(c);
    }

    SampleSet samples{.count = c.samples, .seed = c.seed};
    Reporter rep(cmd->get_name(), c);

    if (cmd == validate) {
      ValidityReport vr = validity_scan(model, GridSpec{}, c.threads);
      rep.j["min_omega"] = vr.min_omega;
      rep.j["min_lambda"] = vr.min_lambda;
      rep.j["min_phi"] = vr.min_phi;
      rep.j["points_scanned"] = vr.points_scanned;
      rep.check("omega_positive", vr.min_omega, 0.0, vr.min_omega > 0, vr.argmin_omega);
      rep.check("lambda_positive", vr.min_lambda, 0.0, vr.min_lambda > 0, vr.argmin_lambda);
      if (!vr.violations.empty()) {
        rep.j["violations"] = ordered_json::array();
        for (const auto& v : vr.violations)
          rep.j["violations"].push_back(
              ordered_json{{"point", point_json(v.p)}, {"error", v.error}});
        rep.check("no_domain_errors", double(vr.violations.size()), 0.0, false);
      }
    } else if (cmd == spray) {
      double tol = c.tol > 0 ? c.tol : 1e-8;
      double worst = 0.0;
      ReducedPoint worst_p{};
      for (const FullSample& fs : draw_samples(model, samples)) {
        SprayCoefficients a = spray_coefficients(model, fs.x, fs.y);
        SprayCoefficients b = spray_oracle_pq(model, fs.x, fs.y);
        double d = std::abs(a.G0 - b.G0);
        for (int i = 0; i < model.n; ++i) d = std::max(d, std::abs(a.Gi[i] - b.Gi[i]));
        double scale = std::max({1.0, std::abs(a.G0), std::abs(b.G0)});
        if (d / scale > worst) {
          worst = d / scale;
          worst_p = fs.p;
        }
      }
      rep.check("spray_cross_oracle", worst, tol, worst < tol, worst_p);
    } else if (cmd == douglas) {
      double tol = c.tol > 0 ? c.tol : 1e-7;
      double worst = 0.0, dmax = 0.0;
      ReducedPoint worst_p{};
      for (const FullSample& fs : draw_samples(model, samples)) {
        if (std::abs(fs.p.z) < 1e-2) continue;
        DouglasTensor closed = douglas_closed(model, fs.x, fs.y);
        DouglasTensor oracle = douglas_oracle(model, fs.x, fs.y);
        dmax = std::max(dmax, oracle.max_abs());
        double d = closed.max_abs_diff(oracle) / std::max(1.0, oracle.max_abs());
        if (d > worst) {
          worst = d;
          worst_p = fs.p;
        }
      }
      rep.j["max_abs_douglas"] = dmax;
      rep.check("douglas_closed_vs_oracle", worst, tol, worst < tol, worst_p);
    } else if (cmd == flatness) {
      double tol = c.tol > 0 ? c.tol : 1e-9;
      FlatnessResiduals fr = flatness_residuals(model, samples);
      for (int i = 0; i < 8; ++i)
        rep.check(FlatnessResiduals::names[i], fr.max_abs[i], tol, fr.max_abs[i] < tol,
                  fr.worst[i]);
    } else if (cmd == fit) {
      double tol = c.tol > 0 ? c.tol : 1e-9;
      PolyCoefficients pc = fit_coefficients(model, fit_x0, fit_r, std::max(12, c.samples));
      rep.j["coefficients"] =
          ordered_json{{"f1", pc.f1}, {"f2", pc.f2}, {"f3", pc.f3}, {"f4", pc.f4},
                       {"g1", pc.g1}, {"g2", pc.g2}, {"g3", pc.g3}, {"g4", pc.g4},
                       {"h1", pc.h1}, {"h2", pc.h2}};
      rep.check("fit_residual", pc.fit_residual, tol, pc.fit_residual < tol);
      rep.check("L_identity", pc.L_residual, tol, pc.L_residual < tol);
    } else if (cmd == reduced) {
      double tol = c.tol > 0 ? c.tol : 1e-8;
      PdeResidual pr = reduced_pde_residual(model, samples);
      rep.check("reduced_pde_residual", pr.max_abs, tol, pr.max_abs < tol, pr.worst);
    } else if (cmd == symcheck) {
      double tol = c.tol > 0 ? c.tol : 1e-12;
      SymmetryReport sr = symmetry_check(model, c.samples, c.seed);
      rep.check("symmetry_max_abs", sr.max_abs_deviation, tol, sr.max_abs_deviation < tol,
                sr.worst);
    }
    return rep.emit(c);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
