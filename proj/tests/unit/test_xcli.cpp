#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fracnelson/xcli/acceptance.h"
#include "fracnelson/xcli/experiment.h"
#include "fracnelson/xcli/version.h"

using namespace fracnelson;
using nlohmann::json;
using xcli::ExperimentConfig;

namespace {

ExperimentConfig small_estimate() {
  ExperimentConfig c;
  c.name = "unit";
  c.process = "fbm:0.7";
  c.times = {1.0};
  c.ladder = {0.1, 0.05, 0.025};
  c.horizon = 1.1;
  c.steps = 44;
  c.paths = 4000;
  c.estimator.hurst = 0.7;
  return ExperimentConfig::from_json(c.to_json());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> problems_of(const json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const xcli::SchemaError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& word) {
  for (const auto& p : problems)
    if (p.find(word) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(Version, HashIsStableHex) {
  EXPECT_EQ(xcli::library_version(), "0.1.0");
  // FNV-1a reference values.
  EXPECT_EQ(xcli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(xcli::fnv1a_hex("a"), "af63dc4c8601ec8c");
  json a = {{"b", 1}, {"a", 2}}, b = {{"a", 2}, {"b", 1}};
  EXPECT_EQ(xcli::content_hash(a), xcli::content_hash(b));
}

TEST(Config, RoundTripPreservesHash) {
  auto c = small_estimate();
  auto d = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(c.hash(), d.hash());
  EXPECT_EQ(c.to_json(), d.to_json());
  c.paths += 1;
  EXPECT_NE(c.hash(), d.hash());
}

TEST(Config, EmptyLadderIsASchemaError) {
  auto j = small_estimate().to_json();
  j["ladder"] = json::array();
  auto p = problems_of(j);
  ASSERT_FALSE(p.empty());
  EXPECT_TRUE(mentions(p, "ladder"));
}

TEST(Config, EveryProblemIsListed) {
  auto j = small_estimate().to_json();
  j["ladder"] = json::array();
  j["paths"] = 1;
  j["direction"] = "sideways";
  j["colour"] = "blue";
  j["steps"] = "many";
  auto p = problems_of(j);
  EXPECT_GE(p.size(), 5u);
  for (const char* w : {"ladder", "paths", "direction", "colour", "steps"}) EXPECT_TRUE(mentions(p, w)) << w;
}

TEST(Config, TimesMustBeReachableOnTheGrid) {
  auto j = small_estimate().to_json();
  j["times"] = {1.0123};
  EXPECT_TRUE(mentions(problems_of(j), "grid"));
  j = small_estimate().to_json();
  j["ladder"] = {0.2, 0.15};  // t + h = 1.2 > horizon
  EXPECT_FALSE(problems_of(j).empty());
}

TEST(Config, SigmaFieldText) {
  EXPECT_EQ(xcli::parse_sigma_field("past:4", 1.0).lattice, 4u);
  EXPECT_EQ(xcli::parse_sigma_field("future:3", 0.5).kind, nelson::SigmaFieldSpec::Kind::future);
  EXPECT_EQ(xcli::parse_sigma_field("even", 1.0).kind, nelson::SigmaFieldSpec::Kind::function);
  EXPECT_THROW(xcli::parse_sigma_field("past:0", 1.0), std::invalid_argument);
  EXPECT_THROW(xcli::parse_sigma_field("sometimes", 1.0), std::invalid_argument);
}

TEST(Run, BrownianPresentLimitIsZero) {
  auto j = small_estimate().to_json();
  j["kind"] = "fbm-present";
  j["process"] = "fbm:0.5";
  j["estimator"]["hurst"] = 0.5;
  j["expect"] = {{"l2", 1e-10}};
  auto r = xcli::run(ExperimentConfig::from_json(j));
  bool found = false;
  for (const auto& row : r.rows) {
    if (row.h != 0.0) continue;
    found = true;
    EXPECT_LE(std::abs(row.estimate), 1e-10);
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(r.failed_checks.empty());
  EXPECT_EQ(r.report["library_version"], xcli::library_version());
  EXPECT_EQ(r.report["config_hash"], ExperimentConfig::from_json(j).hash());
}

TEST(Run, XiWithinOneMesh) {
  ExperimentConfig c;
  c.kind = "xi";
  c.name = "xi";
  c.kernel = "piecewise:0.5";
  c.horizon = 1.0;
  c.times = {0.5};
  c.lattice = 64;
  c.expect.xi = 0.5;
  auto r = xcli::run(ExperimentConfig::from_json(c.to_json()));
  double xi = r.report["xi"]["value"];
  EXPECT_LE(std::abs(xi - 0.5), r.report["xi"]["mesh"].get<double>());
  EXPECT_TRUE(r.failed_checks.empty());
}

TEST(Run, FailedExpectationIsReported) {
  ExperimentConfig c;
  c.kind = "classify-kernel";
  c.kernel = "fbm:0.75";
  c.horizon = 1.0;
  c.times = {0.5};
  c.expect.kernel_verdict = "convergent";
  auto r = xcli::run(ExperimentConfig::from_json(c.to_json()));
  EXPECT_FALSE(r.failed_checks.empty());
}

TEST(Run, SameConfigGivesByteIdenticalCsv) {
  auto dir = std::filesystem::temp_directory_path() / "fracnelson_unit_csv";
  std::filesystem::remove_all(dir);
  auto c = small_estimate();
  c.output_dir = (dir / "a").string();
  auto first = xcli::run(c);
  auto files_a = xcli::write_outputs(c, first);
  c.output_dir = (dir / "b").string();
  auto second = xcli::run(c);
  auto files_b = xcli::write_outputs(c, second);
  EXPECT_EQ(xcli::rows_csv(first.rows), xcli::rows_csv(second.rows));
  ASSERT_EQ(files_a.size(), files_b.size());
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    if (files_a[i].ends_with(".csv")) EXPECT_EQ(slurp(files_a[i]), slurp(files_b[i])) << files_a[i];
  }
  std::filesystem::remove_all(dir);
}

TEST(Csv, QuotingAndLineEndings) {
  xcli::ReportRow r;
  r.experiment = "a,\"b\"";
  r.spec = "present";
  r.direction = "forward";
  r.verdict = "convergent";
  r.estimate = 0.1;
  r.seconds = 12.5;
  std::string csv = xcli::rows_csv({r});
  EXPECT_NE(csv.find("\"a,\"\"b\"\"\""), std::string::npos);
  EXPECT_NE(csv.find("0.10000000000000001"), std::string::npos);
  EXPECT_EQ(csv.find("12.5"), std::string::npos);
  EXPECT_EQ(csv.find('\n'), csv.find("\r\n") + 1);
}

TEST(Verify, DeterministicAndSelfDescribing) {
  xcli::VerifyOptions opts{xcli::Suite::fast, {}, {4, 5}};
  auto a = xcli::verify(opts);
  auto b = xcli::verify(opts);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i].pass()) << xcli::format_line(a[i]);
    ASSERT_EQ(a[i].checks.size(), b[i].checks.size());
    for (std::size_t k = 0; k < a[i].checks.size(); ++k) EXPECT_EQ(a[i].checks[k].measured, b[i].checks[k].measured);
  }
  auto s = xcli::summary_json(opts, a);
  EXPECT_EQ(s["library_version"], xcli::library_version());
  EXPECT_EQ(s["config_hash"], xcli::summary_json(opts, b)["config_hash"]);
  EXPECT_EQ(s["config_hash"].get<std::string>().size(), 16u);
  for (const auto& c : s["criteria"])
    for (const auto& k : c["checks"]) EXPECT_TRUE(k.contains("tolerance"));
  EXPECT_EQ(xcli::parse_suite("full"), xcli::Suite::full);
  EXPECT_THROW(xcli::parse_suite("medium"), std::invalid_argument);
}
