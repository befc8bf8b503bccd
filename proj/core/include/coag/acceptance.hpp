#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "coag/types.hpp"

namespace coag {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured numbers, one line
  double seconds = 0.0;
};

struct AcceptanceReport {
  double lambda = 1.5;
  double tol = 1e-8;
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

struct AcceptanceOptions {
  double lambda = 1.5;
  double tol = 1e-8;
  /// Criteria ids to run; empty means all.
  std::vector<int> only;
  /// Smaller grids / budgets for smoke runs.
  bool quick = false;
};

/// Runs the verification suite, streaming one pass/fail line per criterion to
/// `log` as it goes.
AcceptanceReport run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

/// Deterministic JSON rendering of a report (no timings, byte-reproducible).
std::string acceptance_report_json(const AcceptanceReport& rep);

}  // namespace coag
