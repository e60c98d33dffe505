#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracnelson/core/random.h"

namespace fracnelson::xcli {

enum class Suite { fast, full };
std::string to_string(Suite s);
Suite parse_suite(const std::string& s);

/// One measured quantity against its tolerance. relation is "<=", "<", ">=" or "==".
struct Check {
  std::string name;
  double measured = 0.0;
  std::string relation = "<=";
  double tolerance = 0.0;
  bool pass = false;
};

struct CriterionOutcome {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  nlohmann::json parameters;  // sizes, ladders, seeds actually used
  std::string note;
  std::string error;          // set when the criterion threw
  double seconds = 0.0;
  bool pass() const;
};

struct VerifyOptions {
  Suite suite = Suite::full;
  core::SeedSpec seed;
  /// Criterion ids to run; empty runs all 13.
  std::vector<int> only;
};

/// Runs the acceptance criteria in order (the operator suite last, since it also
/// checks the total runtime). A failing or throwing criterion never stops the suite.
std::vector<CriterionOutcome> verify(const VerifyOptions& opts,
                                     const std::function<void(const CriterionOutcome&)>& on_done = {});

/// "[PASS] 4  Remark-12 kernel  |xi - c| = 0 <= 0.015625 ..." style line.
std::string format_line(const CriterionOutcome& c);

/// Machine-readable summary: version, suite, seed, parameter hash, every check.
nlohmann::json summary_json(const VerifyOptions& opts, const std::vector<CriterionOutcome>& outcomes);

}  // namespace fracnelson::xcli
