#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fracnelson/xcli/acceptance.h"

using namespace fracnelson;

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria, one line per criterion"};
  std::string suite = "full", json_path;
  std::vector<int> only;
  core::SeedSpec seed;
  app.add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  app.add_option("--seed", seed.master, "master seed");
  app.add_option("--stream", seed.stream, "seed stream");
  app.add_option("--only", only, "criterion ids to run");
  app.add_option("--json", json_path, "write the machine-readable summary here");
  CLI11_PARSE(app, argc, argv);

  xcli::VerifyOptions opts{xcli::parse_suite(suite), seed, only};
  auto outcomes = xcli::verify(opts, [](const xcli::CriterionOutcome& c) {
    std::printf("%s\n", xcli::format_line(c).c_str());
    if (!c.note.empty()) std::printf("       %s\n", c.note.c_str());
    std::fflush(stdout);
  });
  auto summary = xcli::summary_json(opts, outcomes);
  std::printf("%zu/%zu criteria passed in %.1f s (suite %s, config %s)\n", summary["passed"].get<std::size_t>(),
              outcomes.size(), summary["seconds"].get<double>(), suite.c_str(),
              summary["config_hash"].get<std::string>().c_str());
  if (!json_path.empty()) std::ofstream(json_path) << summary.dump(2) << '\n';
  return summary["passed"].get<std::size_t>() == outcomes.size() ? 0 : 1;
}
