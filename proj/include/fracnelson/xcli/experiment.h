#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracnelson/core/random.h"
#include "fracnelson/nelson/types.h"

namespace fracnelson::xcli {

inline constexpr int kReportSchemaVersion = 1;

/// Every schema violation found in a config, reported together.
class SchemaError : public std::invalid_argument {
 public:
  explicit SchemaError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// What --check compares against; unset fields are not checked.
struct Expectations {
  std::optional<std::string> verdict;
  std::optional<bool> nondegenerate;
  /// Relative L2 of the value model against the analytic derivative (fbm-present),
  /// or absolute RMS when the analytic derivative is identically 0.
  std::optional<double> l2;
  /// xi target; passes within one lattice mesh.
  std::optional<double> xi;
  /// classify-kernel: verdict expected at every time.
  std::optional<std::string> kernel_verdict;
};

/// Experiment kinds:
///   estimate         Nelson derivative of any process for a sigma-field spec
///   fbm-present      present derivative of fBm, compared with the analytic value
///   xi               xi statistic of a Volterra kernel on a lattice
///   classify-kernel  Volterra criterion at given times
struct ExperimentConfig {
  std::string kind = "estimate";
  std::string name = "experiment";
  std::string process = "fbm:0.7";
  /// present | even | past:k | future:k
  std::string sigma_field = "present";
  std::vector<double> times{1.0};
  std::vector<double> ladder{0.1, 0.05, 0.025};
  /// forward | backward | both
  std::string direction = "forward";
  double horizon = 1.1;
  std::size_t steps = 220;
  std::size_t paths = 20000;
  core::SeedSpec seed;
  /// fbm:H | piecewise:c (xi and classify-kernel)
  std::string kernel = "fbm:0.75";
  std::size_t lattice = 64;
  nelson::EstimatorConfig estimator;
  Expectations expect;
  std::string output_dir = ".";
  std::string output_prefix;  // empty: name

  /// Parses and validates; throws SchemaError listing every problem.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  /// Fully resolved config, defaults included.
  nlohmann::json to_json() const;
  std::string hash() const;
  std::string prefix() const { return output_prefix.empty() ? name : output_prefix; }
};

/// One CSV row: one per (t, h, spec, direction) cell; h = 0 is the extrapolated limit.
struct ReportRow {
  std::string experiment;
  std::size_t cell = 0;
  double t = 0.0;
  double h = 0.0;
  std::string spec;
  std::string direction;
  double estimate = 0.0;
  double se = 0.0;
  std::string verdict;
  double seconds = 0.0;  // wall clock of the cell; JSON only, so the CSV stays byte-reproducible
};

struct RunResult {
  nlohmann::json report;
  std::vector<ReportRow> rows;
  /// Per-bin table of estimate runs (header line included), empty otherwise.
  std::string bins_csv;
  std::vector<std::string> failed_checks;
};

RunResult run(const ExperimentConfig& config);

/// RFC-4180 CSV of the rows, doubles with 17 significant digits.
std::string rows_csv(const std::vector<ReportRow>& rows);

/// Writes <dir>/<prefix>.json, <prefix>.csv and, for estimates, <prefix>_bins.csv.
/// Returns the paths written.
std::vector<std::string> write_outputs(const ExperimentConfig& config, const RunResult& result);

nlohmann::json to_json(const nelson::DerivativeReport& r);

/// Parses "present", "even", "past:k", "future:k" at anchor t.
nelson::SigmaFieldSpec parse_sigma_field(const std::string& text, double t);

}  // namespace fracnelson::xcli
