#pragma once

#include <string>
#include <vector>

#include "maghelm/config.hpp"
#include "maghelm/identities.hpp"
#include "maghelm/report.hpp"

namespace maghelm::runner {

enum ExitCode { exit_pass = 0, exit_assertion = 1, exit_config = 2 };

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Outcome {
  int status = exit_pass;
  std::string message;  // first failing assertion, or the config error
  std::vector<report::Row> rows;
  std::vector<Assertion> assertions;
};

/// Runs one configured command and writes summary.json plus tables and plots into cfg.out.
Outcome run(const config::RunConfig& cfg);

/// Identity residual as a report row: lhs, rhs, ratio = relative residual, terms as extras.
EstimateReport to_report(const identities::IdentityResidual& r, const ProblemSpec& p);

/// Byte content of summary.json for an outcome.
std::string summary_json(const config::RunConfig& cfg, const Outcome& o);

}  // namespace maghelm::runner
