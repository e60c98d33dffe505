#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fracnelson/core/ensemble_io.h"
#include "fracnelson/core/errors.h"
#include "fracnelson/core/sampling.h"
#include "fracnelson/frac/fractional.h"
#include "fracnelson/frac/operators.h"
#include "fracnelson/nelson/process.h"
#include "fracnelson/xcli/acceptance.h"
#include "fracnelson/xcli/experiment.h"
#include "fracnelson/xcli/version.h"
#include "fracnelson/young/sde.h"

using namespace fracnelson;

namespace {

struct SeedOpts {
  core::SeedSpec seed;
  void attach(CLI::App* app) {
    app->add_option("--seed", seed.master, "master seed")->capture_default_str();
    app->add_option("--stream", seed.stream, "seed stream")->capture_default_str();
  }
};

void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  body(out);
}

frac::GridFunction input_function(const std::string& in, const std::string& fn, double horizon, std::size_t steps) {
  if (!in.empty()) {
    std::ifstream s(in);
    if (!s) throw std::runtime_error("cannot open '" + in + "'");
    return frac::read_grid_function_csv(s);
  }
  auto grid = core::TimeGrid::uniform(horizon, steps);
  if (fn == "one") return frac::GridFunction::sample(grid, [](double) { return 1.0; });
  if (fn.rfind("monomial:", 0) == 0) {
    double mu = std::stod(fn.substr(9));
    return frac::GridFunction::sample(grid, [mu](double x) { return std::pow(x, mu); });
  }
  if (fn == "sin") return frac::GridFunction::sample(grid, [](double x) { return std::sin(x); });
  throw std::invalid_argument("--fn must be one, sin or monomial:mu; got '" + fn + "'");
}

int print_run(const xcli::ExperimentConfig& cfg, bool check) {
  auto result = xcli::run(cfg);
  for (const auto& p : xcli::write_outputs(cfg, result)) std::cerr << "wrote " << p << '\n';
  std::cout << xcli::rows_csv(result.rows);
  for (const auto& f : result.failed_checks) std::cerr << "check failed: " << f << '\n';
  return check && !result.failed_checks.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional stochastic calculus toolkit"};
  app.set_version_flag("--version", xcli::library_version());
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample a process ensemble");
  std::string process = "fbm:0.7", out_path;
  double horizon = 1.0;
  std::size_t steps = 256, paths = 100;
  SeedOpts sim_seed;
  sim->add_option("--process", process, "fbm:H[:cholesky|circulant] | sde:H:preset[@x0] | volterra:... | wiener:...")
      ->capture_default_str();
  sim->add_option("--horizon", horizon)->capture_default_str();
  sim->add_option("--steps", steps)->capture_default_str();
  sim->add_option("--paths", paths)->capture_default_str();
  sim->add_option("--out", out_path, "output file; .bin writes the binary format, otherwise CSV to the file or stdout");
  sim_seed.attach(sim);

  // frac-op
  auto* fop = app.add_subcommand("frac-op", "apply a fractional operator to a grid function");
  std::string op = "rl-integral", in_path, fn = "one", side = "left";
  double alpha = 0.5, hurst = 0.75;
  fop->add_option("--op", op)
      ->check(CLI::IsMember({"rl-integral", "rl-derivative", "KH", "OH", "KH-inverse"}))
      ->capture_default_str();
  fop->add_option("--in", in_path, "input CSV (t,value)");
  fop->add_option("--fn", fn, "built-in input when --in is absent: one, sin, monomial:mu")->capture_default_str();
  fop->add_option("--alpha", alpha)->capture_default_str();
  fop->add_option("--hurst", hurst)->capture_default_str();
  fop->add_option("--side", side)->check(CLI::IsMember({"left", "right"}))->capture_default_str();
  fop->add_option("--horizon", horizon)->capture_default_str();
  fop->add_option("--steps", steps)->capture_default_str();
  fop->add_option("--out", out_path);

  // solve-sde
  auto* sde = app.add_subcommand("solve-sde", "solve a Young SDE along one fBm path");
  std::string preset = "sine", scheme = "doss-sussmann";
  double x0 = 0.0;
  SeedOpts sde_seed;
  sde->add_option("--preset", preset, "linear, sine, constant, zero, proportional:r, vanishing:r, affine, ...")
      ->capture_default_str();
  sde->add_option("--x0", x0)->capture_default_str();
  sde->add_option("--hurst", hurst)->capture_default_str();
  sde->add_option("--horizon", horizon)->capture_default_str();
  sde->add_option("--steps", steps)->capture_default_str();
  sde->add_option("--scheme", scheme)->check(CLI::IsMember({"doss-sussmann", "euler"}))->capture_default_str();
  sde->add_option("--driver", in_path, "driver path CSV (t,value); sampled by circulant embedding when absent");
  sde->add_option("--out", out_path);
  sde_seed.attach(sde);

  // nelson
  auto* nel = app.add_subcommand("nelson", "Nelson-type derivatives");
  nel->require_subcommand(1);
  auto* est = nel->add_subcommand("estimate", "Monte Carlo derivative for a sigma-field");
  xcli::ExperimentConfig ecfg;
  ecfg.name = "estimate";
  bool analytic = false;
  est->add_option("--process", ecfg.process)->capture_default_str();
  est->add_option("--sigma-field", ecfg.sigma_field, "present | even | past:k | future:k")->capture_default_str();
  est->add_option("--t", ecfg.times, "anchor times")->capture_default_str();
  est->add_option("--ladder", ecfg.ladder, "strictly decreasing steps")->capture_default_str();
  est->add_option("--direction", ecfg.direction)->check(CLI::IsMember({"forward", "backward", "both"}))
      ->capture_default_str();
  est->add_option("--paths", ecfg.paths)->capture_default_str();
  est->add_option("--horizon", ecfg.horizon)->capture_default_str();
  est->add_option("--steps", ecfg.steps)->capture_default_str();
  est->add_option("--seed", ecfg.seed.master)->capture_default_str();
  est->add_option("--stream", ecfg.seed.stream)->capture_default_str();
  est->add_option("--out-dir", ecfg.output_dir)->capture_default_str();
  est->add_option("--prefix", ecfg.output_prefix, "output file prefix (default: name)");
  est->add_option("--name", ecfg.name)->capture_default_str();
  est->add_flag("--analytic", analytic, "compare with the analytic fBm present derivative");

  auto* cls = nel->add_subcommand("classify-kernel", "Volterra derivative criterion / xi statistic");
  xcli::ExperimentConfig kcfg;
  kcfg.kind = "classify-kernel";
  kcfg.name = "classify";
  kcfg.horizon = 1.0;
  kcfg.times = {0.5};
  bool xi = false;
  cls->add_option("--kernel", kcfg.kernel, "fbm:H | piecewise:c")->capture_default_str();
  cls->add_option("--t", kcfg.times)->capture_default_str();
  cls->add_flag("--xi", xi, "measure of convergent times on a lattice instead");
  cls->add_option("--lattice", kcfg.lattice)->capture_default_str();
  cls->add_option("--horizon", kcfg.horizon)->capture_default_str();
  cls->add_option("--out-dir", kcfg.output_dir)->capture_default_str();

  // verify / run
  auto* ver = app.add_subcommand("verify", "run the acceptance suite");
  std::string suite = "fast", json_path;
  std::vector<int> only;
  SeedOpts ver_seed;
  ver->add_option("--suite", suite)->check(CLI::IsMember({"fast", "full"}))->capture_default_str();
  ver->add_option("--only", only, "criterion ids");
  ver->add_option("--json", json_path, "write the summary JSON here");
  ver_seed.attach(ver);

  auto* run = app.add_subcommand("run", "run an experiment config (JSON)");
  std::string config_path;
  bool check = false;
  run->add_option("config", config_path)->required();
  run->add_flag("--check", check, "exit 2 when an expectation in the config fails");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      auto p = nelson::ProcessSpec::parse(process);
      auto e = nelson::simulate(p, core::TimeGrid::uniform(horizon, steps), paths, sim_seed.seed);
      if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".bin") {
        core::save(out_path, e);
      } else {
        emit(out_path, [&](std::ostream& o) { core::write_csv(o, e); });
      }
    } else if (*fop) {
      auto f = input_function(in_path, fn, horizon, steps);
      auto s = side == "left" ? frac::Side::left : frac::Side::right;
      frac::GridFunction r = f;
      if (op == "rl-integral") r = frac::rl_integral(f, frac::FracOrder(alpha), s);
      else if (op == "rl-derivative") r = frac::rl_derivative(f, frac::FracOrder(alpha), s);
      else if (op == "KH") r = frac::op_KH(f, core::HurstIndex(hurst));
      else if (op == "OH") r = frac::op_OH(f, core::HurstIndex(hurst));
      else r = frac::op_KH_inverse(f, core::HurstIndex(hurst));
      emit(out_path, [&](std::ostream& o) { frac::write_csv(o, r); });
    } else if (*sde) {
      auto c = young::preset(preset, x0);
      std::vector<double> path;
      core::TimeGrid grid = core::TimeGrid::uniform(horizon, steps);
      if (!in_path.empty()) {
        std::ifstream s(in_path);
        if (!s) throw std::runtime_error("cannot open '" + in_path + "'");
        auto d = frac::read_grid_function_csv(s);
        grid = d.grid();
        path.assign(d.samples().begin(), d.samples().end());
      } else {
        auto b = core::circulant_sample(core::HurstIndex(hurst), grid, 1, sde_seed.seed);
        path.assign(b.path(0).begin(), b.path(0).end());
      }
      auto sol = scheme == "euler" ? young::euler_young_solve(c, path, grid) : young::doss_sussmann_solve(c, path, grid);
      auto res = young::young_residual(c, sol);
      emit(out_path, [&](std::ostream& o) {
        o << "t,B,X,residual\r\n";
        for (std::size_t k = 0; k < grid.size(); ++k) {
          o << core::format_double(grid[k]) << ',' << core::format_double(sol.driver[k]) << ','
            << core::format_double(sol.x[k]) << ',' << core::format_double(res[k]) << "\r\n";
        }
      });
    } else if (*est) {
      if (analytic) ecfg.kind = "fbm-present";
      auto j = ecfg.to_json();
      j.erase("expect");
      return print_run(xcli::ExperimentConfig::from_json(j), false);
    } else if (*cls) {
      if (xi) kcfg.kind = "xi";
      auto j = kcfg.to_json();
      j.erase("expect");
      return print_run(xcli::ExperimentConfig::from_json(j), false);
    } else if (*ver) {
      xcli::VerifyOptions opts{xcli::parse_suite(suite), ver_seed.seed, only};
      auto outcomes = xcli::verify(opts, [](const xcli::CriterionOutcome& c) {
        std::cout << xcli::format_line(c) << std::endl;
      });
      auto summary = xcli::summary_json(opts, outcomes);
      if (!json_path.empty()) std::ofstream(json_path) << summary.dump(2) << '\n';
      std::cout << summary["passed"].get<std::size_t>() << '/' << outcomes.size() << " criteria passed\n";
      return summary["passed"].get<std::size_t>() == outcomes.size() ? 0 : 2;
    } else if (*run) {
      return print_run(xcli::ExperimentConfig::load(config_path), check);
    }
  } catch (const xcli::SchemaError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
