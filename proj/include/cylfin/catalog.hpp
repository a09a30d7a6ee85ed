#ifndef CYLFIN_CATALOG_HPP_
#define CYLFIN_CATALOG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cylfin/douglas.hpp"

namespace cylfin {

// Built-in metric catalog: analytic baselines plus the Douglas families
// ex4.1 .. ex4.6. Function-valued parameters (h, g, f) are accepted as
// expression strings in their single variable.
struct CatalogEntry {
  std::string id;
  std::string summary;
  std::vector<std::string> params;  // "name=default" documentation strings
  bool douglas_expected = true;
  int projectively_flat_expected = -1;  // 1 yes, 0 no, -1 unknown
};

const std::vector<CatalogEntry>& catalog_list();

// Reference expressions printed alongside an entry, in (x0, r, s, z) with n
// and scalar parameters substituted. `golden` marks expressions the pipeline
// must reproduce; the rest are compared and reported only.
struct PrintedField {
  Expression expr;
  bool golden = false;
};

struct PrintedRefs {
  std::optional<PrintedField> U, R, T, L;
};

using ParamMap = std::map<std::string, std::string>;

// Instantiate an entry; defaults n=3, rho=1, x0 in [-1,1]. Scalar constraints
// (|k|<2) are checked exactly; function constraints (h>0, |h|<1, g>0, f>0)
// are checked on a dense sample of the domain.
PhiModel catalog_get(const std::string& id, const ParamMap& params = {});
PrintedRefs catalog_printed(const std::string& id, const ParamMap& params = {});

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
  std::string note;
};

struct Discrepancy {
  std::string field;
  ReducedPoint p;
  double printed = 0.0;
  double computed = 0.0;
};

struct VerificationReport {
  std::string id;
  std::vector<CheckResult> checks;
  std::vector<Discrepancy> discrepancies;
  bool all_pass() const;
};

// Runs the full pipeline on one entry: validity, symmetry, spray cross-oracle,
// Douglas closed-vs-oracle, flatness residuals, coefficient fit, reduced PDE,
// projective flatness, and printed-field comparison. A failed check is a
// report entry, not an exception; printed-field mismatches of non-golden
// expressions go to the discrepancy list only.
VerificationReport catalog_verify(const std::string& id, const ParamMap& params = {},
                                  std::uint64_t seed = 7);

}  // namespace cylfin

#endif  // CYLFIN_CATALOG_HPP_
