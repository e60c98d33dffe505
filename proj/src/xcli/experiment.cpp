#include "fracnelson/xcli/experiment.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracnelson/core/ensemble_io.h"
#include "fracnelson/core/errors.h"
#include "fracnelson/frac/kernel.h"
#include "fracnelson/nelson/estimator.h"
#include "fracnelson/nelson/gaussian.h"
#include "fracnelson/nelson/process.h"
#include "fracnelson/nelson/volterra.h"
#include "fracnelson/xcli/version.h"

namespace fracnelson::xcli {

namespace {

using Json = nlohmann::json;
using core::TimeGrid;
using nelson::Direction;
using Clock = std::chrono::steady_clock;

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += "\n  - " + p;
  return s;
}

// Typed field readers that record a problem instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  const Json* object(const Json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const Json& v = parent.at(key);
    if (!v.is_object()) {
      problems_.push_back(path + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  void keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
        problems_.push_back((path.empty() ? "" : path + ".") + it.key() + ": unknown key");
      }
    }
  }

  void number(const Json& o, const char* key, const std::string& path, double& out) {
    if (!o.contains(key)) return;
    if (!o.at(key).is_number()) {
      problems_.push_back(name(path, key) + ": expected a number");
      return;
    }
    out = o.at(key).get<double>();
    if (!std::isfinite(out)) problems_.push_back(name(path, key) + ": must be finite");
  }

  template <class Int>
  void count(const Json& o, const char* key, const std::string& path, Int& out) {
    if (!o.contains(key)) return;
    const Json& v = o.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      problems_.push_back(name(path, key) + ": expected a non-negative integer");
      return;
    }
    out = v.get<Int>();
  }

  void text(const Json& o, const char* key, const std::string& path, std::string& out) {
    if (!o.contains(key)) return;
    if (!o.at(key).is_string()) {
      problems_.push_back(name(path, key) + ": expected a string");
      return;
    }
    out = o.at(key).get<std::string>();
  }

  void flag(const Json& o, const char* key, const std::string& path, bool& out) {
    if (!o.contains(key)) return;
    if (!o.at(key).is_boolean()) {
      problems_.push_back(name(path, key) + ": expected true or false");
      return;
    }
    out = o.at(key).get<bool>();
  }

  void numbers(const Json& o, const char* key, const std::string& path, std::vector<double>& out) {
    if (!o.contains(key)) return;
    const Json& v = o.at(key);
    if (!v.is_array() || std::any_of(v.begin(), v.end(), [](const Json& x) { return !x.is_number(); })) {
      problems_.push_back(name(path, key) + ": expected an array of numbers");
      return;
    }
    out = v.get<std::vector<double>>();
  }

  void problem(std::string p) { problems_.push_back(std::move(p)); }

 private:
  static std::string name(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }
  std::vector<std::string>& problems_;
};

frac::KernelSpec parse_kernel(const std::string& text, double horizon) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (colon == std::string::npos) throw std::invalid_argument("kernel must be fbm:H or piecewise:c, got '" + text + "'");
  std::size_t used = 0;
  std::string rest = text.substr(colon + 1);
  double v = std::stod(rest, &used);
  if (used != rest.size()) throw std::invalid_argument("trailing characters in kernel '" + text + "'");
  if (head == "fbm") return frac::KernelSpec::fbm(core::HurstIndex(v));
  if (head == "piecewise") return frac::KernelSpec::piecewise_hurst(v, horizon);
  throw std::invalid_argument("kernel must be fbm:H or piecewise:c, got '" + text + "'");
}

std::vector<Direction> directions(const std::string& d) {
  if (d == "forward") return {Direction::forward};
  if (d == "backward") return {Direction::backward};
  return {Direction::forward, Direction::backward};
}

bool valid_verdict(const std::string& v) { return v == "convergent" || v == "divergent" || v == "inconclusive"; }

void validate(const ExperimentConfig& c, Reader& rd) {
  static const char* kinds[] = {"estimate", "fbm-present", "xi", "classify-kernel"};
  if (std::none_of(std::begin(kinds), std::end(kinds), [&](const char* k) { return c.kind == k; })) {
    rd.problem("kind: must be one of estimate, fbm-present, xi, classify-kernel; got '" + c.kind + "'");
    return;
  }
  if (c.name.empty()) rd.problem("name: must not be empty");
  if (!(c.horizon > 0.0)) rd.problem("grid.horizon: must be positive");
  const auto& e = c.estimator;
  if (e.min_bin_count < 2) rd.problem("estimator.min_bin_count: must be at least 2");
  if (!(e.bandwidth_factor > 0.0)) rd.problem("estimator.bandwidth_factor: must be positive");
  if (e.hurst && !(*e.hurst > 0.0 && *e.hurst < 1.0)) rd.problem("estimator.hurst: must lie in (0, 1)");
  if (e.cauchy_floor < 0.0) rd.problem("estimator.cauchy_floor: must be non-negative");
  if (e.cauchy_se_multiple < 0.0) rd.problem("estimator.cauchy_se_multiple: must be non-negative");
  if (!(e.divergence_growth > 1.0)) rd.problem("estimator.divergence_growth: must exceed 1");
  if (e.divergence_steps < 1) rd.problem("estimator.divergence_steps: must be at least 1");
  if (e.nondegeneracy_z < 0.0) rd.problem("estimator.nondegeneracy_z: must be non-negative");
  if (e.local_control_factor < 0.0) rd.problem("estimator.local_control_factor: must be non-negative");
  if (e.smoother_bins < 0.0) rd.problem("estimator.smoother_bins: must be non-negative");
  for (double x : e.exponents)
    if (!(x > 0.0)) rd.problem("estimator.exponents: every exponent must be positive");
  if (c.expect.verdict && !valid_verdict(*c.expect.verdict))
    rd.problem("expect.verdict: must be convergent, divergent or inconclusive");
  if (c.expect.kernel_verdict && !valid_verdict(*c.expect.kernel_verdict))
    rd.problem("expect.kernel_verdict: must be convergent, divergent or inconclusive");
  if (c.expect.l2 && !(*c.expect.l2 > 0.0)) rd.problem("expect.l2: must be positive");
  if (c.expect.l2 && c.kind != "fbm-present") rd.problem("expect.l2: only available for kind fbm-present");
  if (c.expect.xi && c.kind != "xi") rd.problem("expect.xi: only available for kind xi");
  if (c.expect.kernel_verdict && c.kind != "classify-kernel")
    rd.problem("expect.kernel_verdict: only available for kind classify-kernel");
  if ((c.expect.verdict || c.expect.nondegenerate) && c.kind != "estimate" && c.kind != "fbm-present")
    rd.problem("expect.verdict / expect.nondegenerate: only available for estimate and fbm-present");

  if (c.kind == "xi" || c.kind == "classify-kernel") {
    try {
      parse_kernel(c.kernel, c.horizon);
    } catch (const std::exception& ex) {
      rd.problem(std::string("kernel: ") + ex.what());
    }
    if (c.kind == "xi" && c.lattice < 1) rd.problem("lattice: must be at least 1");
    if (c.kind == "classify-kernel") {
      if (c.times.empty()) rd.problem("times: must not be empty");
      for (double t : c.times)
        if (!(t > 0.0 && t <= c.horizon)) rd.problem("times: " + core::format_double(t) + " is outside (0, horizon]");
    }
    return;
  }

  std::optional<nelson::ProcessSpec> p;
  try {
    p = nelson::ProcessSpec::parse(c.process);
  } catch (const std::exception& ex) {
    rd.problem(std::string("process: ") + ex.what());
  }
  if (p && c.kind == "fbm-present" && p->kind != nelson::ProcessSpec::Kind::fbm)
    rd.problem("process: kind fbm-present needs an fbm:H process");
  if (c.direction != "forward" && c.direction != "backward" && c.direction != "both")
    rd.problem("direction: must be forward, backward or both");
  if (c.kind == "fbm-present" && c.sigma_field != "present") rd.problem("sigma_field: fbm-present uses 'present'");
  if (c.ladder.empty()) rd.problem("ladder: must not be empty");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    if (!(c.ladder[i] > 0.0)) rd.problem("ladder: steps must be positive");
    if (i && !(c.ladder[i] < c.ladder[i - 1])) rd.problem("ladder: steps must be strictly decreasing");
  }
  if (c.times.empty()) rd.problem("times: must not be empty");
  if (c.steps < 1) rd.problem("grid.steps: must be at least 1");
  if (c.paths < 2) rd.problem("paths: must be at least 2");
  if (c.steps < 1 || !(c.horizon > 0.0)) return;
  auto grid = TimeGrid::uniform(c.horizon, c.steps);
  for (double t : c.times) {
    std::optional<nelson::SigmaFieldSpec> spec;
    try {
      spec = parse_sigma_field(c.sigma_field, t);
    } catch (const std::exception& ex) {
      rd.problem(std::string("sigma_field: ") + ex.what());
      return;
    }
    for (double h : c.ladder) {
      if (!(h > 0.0)) continue;
      std::vector<double> need = spec->times_for(h);
      need.push_back(t);
      for (Direction d : directions(c.direction)) need.push_back(d == Direction::forward ? t + h : t - h);
      for (double s : need) {
        if (!grid.index_of(s)) {
          rd.problem("t=" + core::format_double(t) + ", h=" + core::format_double(h) + ": time " +
                     core::format_double(s) + " is not a point of the grid");
        }
      }
    }
  }
}

Json estimator_json(const nelson::EstimatorConfig& e) {
  return {{"min_bin_count", e.min_bin_count},
          {"bandwidth_factor", e.bandwidth_factor},
          {"exponents", e.exponents},
          {"hurst", e.hurst ? Json(*e.hurst) : Json(nullptr)},
          {"cauchy_floor", e.cauchy_floor},
          {"cauchy_se_multiple", e.cauchy_se_multiple},
          {"divergence_growth", e.divergence_growth},
          {"divergence_steps", e.divergence_steps},
          {"nondegeneracy_z", e.nondegeneracy_z},
          {"control_variates", e.control_variates},
          {"max_control_variates", e.max_control_variates},
          {"control_variate_degree", e.control_variate_degree},
          {"local_control_factor", e.local_control_factor},
          {"smoother_bins", e.smoother_bins}};
}

double value_model_rms(const nelson::DerivativeReport& r) {
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < r.bins.size(); ++b) {
    if (!r.bins.valid[b]) continue;
    num += double(r.bins.count[b]) * r.value_model[b] * r.value_model[b];
    den += double(r.bins.count[b]);
  }
  return den > 0.0 ? std::sqrt(num / den) : NAN;
}

void run_estimate(const ExperimentConfig& c, RunResult& out) {
  auto p = nelson::ProcessSpec::parse(c.process);
  auto grid = TimeGrid::uniform(c.horizon, c.steps);
  auto t_sim = Clock::now();
  auto e = nelson::simulate(p, grid, c.paths, c.seed);
  out.report["simulation_seconds"] = std::chrono::duration<double>(Clock::now() - t_sim).count();
  nelson::EstimatorConfig cfg = c.estimator;
  if (!cfg.hurst && p.kind != nelson::ProcessSpec::Kind::wiener && p.kind != nelson::ProcessSpec::Kind::volterra)
    cfg.hurst = p.driving_hurst();

  std::ostringstream bins;
  bins << "t,direction,bin,x_mean,count,valid";
  for (double h : c.ladder) bins << ",step_" << core::format_double(h);
  bins << ",limit,limit_se,value_model\r\n";

  Json cells = Json::array();
  std::size_t cell = 0;
  for (double t : c.times) {
    for (Direction d : directions(c.direction)) {
      auto t0 = Clock::now();
      auto spec = parse_sigma_field(c.sigma_field, t);
      auto r = nelson::estimate_derivative(e, spec, t, nelson::HLadder(c.ladder, d), cfg);
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      Json cj = {{"cell", cell}, {"t", t}, {"direction", nelson::to_string(d)}, {"seconds", secs}, {"report", to_json(r)}};

      // cell rows: per-step slope (scalar) or first regression coefficient (vector), then the limit
      double lim = 0.0, lim_var = 0.0;
      for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& s = r.steps[i];
        double est = r.scalar ? s.slope : (s.linear.coefficients.size() > 1 ? s.linear.coefficients[1] : NAN);
        double se = r.scalar ? s.slope_se : (s.linear.se.size() > 1 ? s.linear.se[1] : NAN);
        out.rows.push_back({c.name, cell, t, s.h, spec.name, nelson::to_string(d), est, se, "step", secs});
        double w = i < r.extrapolation_weights.size() ? r.extrapolation_weights[i] : 0.0;
        lim += w * est;
        lim_var += w * w * se * se;
      }
      if (!r.scalar && r.limit_linear.coefficients.size() > 1) {
        lim = r.limit_linear.coefficients[1];
        lim_var = r.limit_linear.se[1] * r.limit_linear.se[1];
      }
      out.rows.push_back(
          {c.name, cell, t, 0.0, spec.name, nelson::to_string(d), lim, std::sqrt(lim_var), nelson::to_string(r.verdict), secs});

      if (r.scalar) {
        for (std::size_t b = 0; b < r.bins.size(); ++b) {
          bins << core::format_double(t) << ',' << nelson::to_string(d) << ',' << b << ','
               << core::format_double(r.bins.mean[b]) << ',' << r.bins.count[b] << ',' << (r.bins.valid[b] ? 1 : 0);
          for (const auto& s : r.steps) bins << ',' << core::format_double(s.binned.value[b]);
          bins << ',' << core::format_double(r.limit.value[b]) << ',' << core::format_double(r.limit.se[b]) << ','
               << core::format_double(r.value_model[b]) << "\r\n";
        }
      }

      // checks
      if (c.expect.verdict && nelson::to_string(r.verdict) != *c.expect.verdict) {
        out.failed_checks.push_back("t=" + core::format_double(t) + " " + nelson::to_string(d) + ": verdict " +
                                    nelson::to_string(r.verdict) + ", expected " + *c.expect.verdict);
      }
      if (c.expect.nondegenerate && r.nondegenerate != *c.expect.nondegenerate) {
        out.failed_checks.push_back("t=" + core::format_double(t) + " " + nelson::to_string(d) + ": nondegenerate = " +
                                    (r.nondegenerate ? "true" : "false"));
      }
      if (c.kind == "fbm-present") {
        core::HurstIndex hi(p.hurst);
        auto probe = nelson::analytic_fbm_present(hi, t, 1.0, d);
        if (!probe) {
          cj["analytic"] = "does not exist for H < 1/2";
          if (c.expect.l2) out.failed_checks.push_back("analytic present derivative does not exist for H < 1/2");
        } else {
          auto truth = [&](double x) { return *nelson::analytic_fbm_present(hi, t, x, d); };
          bool zero = *probe == 0.0 && *nelson::analytic_fbm_present(hi, t, 2.0, d) == 0.0;
          double err = zero ? value_model_rms(r) : nelson::relative_l2_error(r, truth);
          cj["analytic_error"] = {{"kind", zero ? "absolute_rms" : "relative_l2"}, {"value", err}};
          if (c.expect.l2 && !(err <= *c.expect.l2)) {
            out.failed_checks.push_back("t=" + core::format_double(t) + " " + nelson::to_string(d) + ": " +
                                        (zero ? "absolute RMS " : "relative L2 ") + core::format_double(err) +
                                        " > " + core::format_double(*c.expect.l2));
          }
        }
      }
      cells.push_back(std::move(cj));
      ++cell;
    }
  }
  out.report["cells"] = std::move(cells);
  out.bins_csv = bins.str();
}

void run_xi(const ExperimentConfig& c, RunResult& out) {
  auto k = parse_kernel(c.kernel, c.horizon);
  auto grid = TimeGrid::uniform(c.horizon, c.lattice);
  auto t0 = Clock::now();
  auto x = nelson::xi_statistic(k, grid);
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  for (std::size_t i = 0; i < x.times.size(); ++i) {
    bool conv = x.verdicts[i] == nelson::Verdict::convergent;
    out.rows.push_back({c.name, i, x.times[i], 0.0, k.description(), "forward", conv ? 1.0 : 0.0, 0.0,
                        nelson::to_string(x.verdicts[i]), secs / double(x.times.size())});
  }
  out.rows.push_back({c.name, x.times.size(), c.horizon, 0.0, "xi", "forward", x.value, grid.mesh(), "-", secs});
  out.report["xi"] = {{"value", x.value}, {"inconclusive", x.inconclusive}, {"mesh", grid.mesh()}, {"seconds", secs}};
  if (c.expect.xi && !(std::abs(x.value - *c.expect.xi) <= grid.mesh() + 1e-12)) {
    out.failed_checks.push_back("xi = " + core::format_double(x.value) + " is more than one mesh from " +
                                core::format_double(*c.expect.xi));
  }
}

void run_classify(const ExperimentConfig& c, RunResult& out) {
  auto k = parse_kernel(c.kernel, c.horizon);
  Json cells = Json::array();
  std::size_t cell = 0;
  for (double t : c.times) {
    auto t0 = Clock::now();
    auto r = nelson::volterra_criterion(k, t);
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    double last = r.integrals.empty() ? NAN : r.integrals.back();
    double inc = r.integrals.size() > 1 ? r.integrals.back() - r.integrals[r.integrals.size() - 2] : NAN;
    out.rows.push_back({c.name, cell, t, r.deltas.empty() ? 0.0 : r.deltas.back(), k.description(), "forward", last,
                        inc, nelson::to_string(r.verdict), secs});
    Json cj = {{"t", t}, {"verdict", nelson::to_string(r.verdict)}, {"deltas", r.deltas}, {"integrals", r.integrals},
               {"note", r.note}, {"seconds", secs}};
    if (r.singular_at) cj["singular_at"] = {r.singular_at->first, r.singular_at->second};
    cells.push_back(std::move(cj));
    if (c.expect.kernel_verdict && nelson::to_string(r.verdict) != *c.expect.kernel_verdict) {
      out.failed_checks.push_back("t=" + core::format_double(t) + ": verdict " + nelson::to_string(r.verdict) +
                                  ", expected " + *c.expect.kernel_verdict);
    }
    ++cell;
  }
  out.report["cells"] = std::move(cells);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> problems)
    : std::invalid_argument("config has " + std::to_string(problems.size()) + " schema problem(s):" + join(problems)),
      problems_(std::move(problems)) {}

nelson::SigmaFieldSpec parse_sigma_field(const std::string& text, double t) {
  if (text == "present") return nelson::SigmaFieldSpec::present(t);
  if (text == "even") return nelson::SigmaFieldSpec::even(t);
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (colon != std::string::npos && (head == "past" || head == "future")) {
    std::string rest = text.substr(colon + 1);
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || rest.empty() || k < 1 || rest[0] == '-')
      throw std::invalid_argument("lattice size in '" + text + "' must be a positive integer");
    return head == "past" ? nelson::SigmaFieldSpec::past_lattice(t, k) : nelson::SigmaFieldSpec::future_lattice(t, k);
  }
  throw std::invalid_argument("sigma field must be present, even, past:k or future:k; got '" + text + "'");
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  std::vector<std::string> problems;
  Reader rd(problems);
  ExperimentConfig c;
  if (!j.is_object()) throw SchemaError({"top level: expected an object"});
  rd.keys(j, {"schema_version", "kind", "name", "process", "sigma_field", "times", "ladder", "direction", "grid", "paths",
              "seed", "kernel", "lattice", "estimator", "expect", "output"},
          "");
  if (j.contains("schema_version") && j.at("schema_version") != kReportSchemaVersion)
    problems.push_back("schema_version: only version " + std::to_string(kReportSchemaVersion) + " is supported");
  rd.text(j, "kind", "", c.kind);
  rd.text(j, "name", "", c.name);
  rd.text(j, "process", "", c.process);
  rd.text(j, "sigma_field", "", c.sigma_field);
  rd.numbers(j, "times", "", c.times);
  rd.numbers(j, "ladder", "", c.ladder);
  rd.text(j, "direction", "", c.direction);
  rd.count(j, "paths", "", c.paths);
  rd.text(j, "kernel", "", c.kernel);
  rd.count(j, "lattice", "", c.lattice);
  if (auto g = rd.object(j, "grid", "grid")) {
    rd.keys(*g, {"horizon", "steps"}, "grid");
    rd.number(*g, "horizon", "grid", c.horizon);
    rd.count(*g, "steps", "grid", c.steps);
  }
  if (auto s = rd.object(j, "seed", "seed")) {
    rd.keys(*s, {"master", "stream"}, "seed");
    rd.count(*s, "master", "seed", c.seed.master);
    rd.count(*s, "stream", "seed", c.seed.stream);
  }
  if (auto o = rd.object(j, "output", "output")) {
    rd.keys(*o, {"dir", "prefix"}, "output");
    rd.text(*o, "dir", "output", c.output_dir);
    rd.text(*o, "prefix", "output", c.output_prefix);
  }
  if (auto e = rd.object(j, "estimator", "estimator")) {
    auto& x = c.estimator;
    rd.keys(*e, {"min_bin_count", "bandwidth_factor", "exponents", "hurst", "cauchy_floor", "cauchy_se_multiple",
                 "divergence_growth", "divergence_steps", "nondegeneracy_z", "control_variates", "max_control_variates",
                 "control_variate_degree", "local_control_factor", "smoother_bins"},
            "estimator");
    rd.count(*e, "min_bin_count", "estimator", x.min_bin_count);
    rd.number(*e, "bandwidth_factor", "estimator", x.bandwidth_factor);
    rd.numbers(*e, "exponents", "estimator", x.exponents);
    if (e->contains("hurst") && !e->at("hurst").is_null()) {
      double h = 0.0;
      rd.number(*e, "hurst", "estimator", h);
      x.hurst = h;
    }
    rd.number(*e, "cauchy_floor", "estimator", x.cauchy_floor);
    rd.number(*e, "cauchy_se_multiple", "estimator", x.cauchy_se_multiple);
    rd.number(*e, "divergence_growth", "estimator", x.divergence_growth);
    rd.count(*e, "divergence_steps", "estimator", x.divergence_steps);
    rd.number(*e, "nondegeneracy_z", "estimator", x.nondegeneracy_z);
    rd.flag(*e, "control_variates", "estimator", x.control_variates);
    rd.count(*e, "max_control_variates", "estimator", x.max_control_variates);
    rd.count(*e, "control_variate_degree", "estimator", x.control_variate_degree);
    rd.number(*e, "local_control_factor", "estimator", x.local_control_factor);
    rd.number(*e, "smoother_bins", "estimator", x.smoother_bins);
  }
  if (auto e = rd.object(j, "expect", "expect")) {
    rd.keys(*e, {"verdict", "nondegenerate", "l2", "xi", "kernel_verdict"}, "expect");
    std::string s;
    bool b = false;
    double v = 0.0;
    if (e->contains("verdict")) {
      rd.text(*e, "verdict", "expect", s);
      c.expect.verdict = s;
    }
    if (e->contains("kernel_verdict")) {
      rd.text(*e, "kernel_verdict", "expect", s);
      c.expect.kernel_verdict = s;
    }
    if (e->contains("nondegenerate")) {
      rd.flag(*e, "nondegenerate", "expect", b);
      c.expect.nondegenerate = b;
    }
    if (e->contains("l2")) {
      rd.number(*e, "l2", "expect", v);
      c.expect.l2 = v;
    }
    if (e->contains("xi")) {
      rd.number(*e, "xi", "expect", v);
      c.expect.xi = v;
    }
  }
  // Fields with a type error keep their defaults, so the semantic pass does not repeat them.
  validate(c, rd);
  if (!problems.empty()) throw SchemaError(std::move(problems));
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

Json ExperimentConfig::to_json() const {
  Json expect_j = Json::object();
  if (expect.verdict) expect_j["verdict"] = *expect.verdict;
  if (expect.nondegenerate) expect_j["nondegenerate"] = *expect.nondegenerate;
  if (expect.l2) expect_j["l2"] = *expect.l2;
  if (expect.xi) expect_j["xi"] = *expect.xi;
  if (expect.kernel_verdict) expect_j["kernel_verdict"] = *expect.kernel_verdict;
  return {{"schema_version", kReportSchemaVersion},
          {"kind", kind},
          {"name", name},
          {"process", process},
          {"sigma_field", sigma_field},
          {"times", times},
          {"ladder", ladder},
          {"direction", direction},
          {"grid", {{"horizon", horizon}, {"steps", steps}}},
          {"paths", paths},
          {"seed", {{"master", seed.master}, {"stream", seed.stream}}},
          {"kernel", kernel},
          {"lattice", lattice},
          {"estimator", estimator_json(estimator)},
          {"expect", expect_j},
          {"output", {{"dir", output_dir}, {"prefix", output_prefix}}}};
}

std::string ExperimentConfig::hash() const { return content_hash(to_json()); }

RunResult run(const ExperimentConfig& config) {
  RunResult out;
  out.report = {{"schema_version", kReportSchemaVersion},
                {"library_version", library_version()},
                {"config", config.to_json()},
                {"config_hash", config.hash()}};
  if (config.kind == "xi") {
    run_xi(config, out);
  } else if (config.kind == "classify-kernel") {
    run_classify(config, out);
  } else {
    run_estimate(config, out);
  }
  Json rows = Json::array();
  for (const auto& r : out.rows) {
    rows.push_back({{"experiment", r.experiment}, {"cell", r.cell}, {"t", r.t}, {"h", r.h}, {"spec", r.spec},
                    {"direction", r.direction}, {"estimate", r.estimate}, {"se", r.se}, {"verdict", r.verdict},
                    {"seconds", r.seconds}});
  }
  out.report["rows"] = std::move(rows);
  out.report["checks"] = {{"failed", out.failed_checks}, {"passed", out.failed_checks.empty()}};
  return out;
}

std::string rows_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream s;
  s << "schema_version,experiment,cell,t,h,spec,direction,estimate,se,verdict\r\n";
  for (const auto& r : rows) {
    s << kReportSchemaVersion << ',' << csv_field(r.experiment) << ',' << r.cell << ',' << core::format_double(r.t)
      << ',' << core::format_double(r.h) << ',' << csv_field(r.spec) << ',' << r.direction << ','
      << core::format_double(r.estimate) << ',' << core::format_double(r.se) << ',' << r.verdict << "\r\n";
  }
  return s.str();
}

std::vector<std::string> write_outputs(const ExperimentConfig& config, const RunResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& suffix, const std::string& body) {
    fs::path p = fs::path(config.output_dir) / (config.prefix() + suffix);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << body;
    written.push_back(p.string());
  };
  put(".json", result.report.dump(2) + "\n");
  put(".csv", rows_csv(result.rows));
  if (!result.bins_csv.empty()) put("_bins.csv", result.bins_csv);
  return written;
}

Json to_json(const nelson::DerivativeReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json sj = {{"h", s.h}, {"variance", s.variance}, {"control_variates", s.control_variates}};
    if (r.scalar) {
      sj["slope"] = s.slope;
      sj["slope_se"] = s.slope_se;
    } else {
      sj["coefficients"] = s.linear.coefficients;
      sj["se"] = s.linear.se;
      sj["residual_variance"] = s.linear.residual_variance;
    }
    steps.push_back(std::move(sj));
  }
  std::vector<int> valid(r.bins.valid.begin(), r.bins.valid.end());
  Json j = {{"t", r.t},
            {"direction", nelson::to_string(r.direction)},
            {"spec", r.spec_name},
            {"scalar", r.scalar},
            {"verdict", nelson::to_string(r.verdict)},
            {"cauchy_gap", r.cauchy_gap},
            {"cauchy_tolerance", r.cauchy_tolerance},
            {"variance_ratios", r.variance_ratios},
            {"nondegenerate", r.nondegenerate},
            {"limit_variance", r.limit_variance},
            {"limit_variance_se", r.limit_variance_se},
            {"exponents", r.exponents},
            {"extrapolation_weights", r.extrapolation_weights},
            {"steps", steps}};
  if (r.scalar) {
    j["bins"] = {{"origin", r.bins.origin}, {"width", r.bins.width}, {"mean", r.bins.mean},
                 {"count", r.bins.count},   {"valid", valid}};
    j["limit"] = {{"value", r.limit.value}, {"se", r.limit.se}};
    j["value_model"] = r.value_model;
    j["smoother_bandwidth"] = r.smoother_bandwidth;
  } else {
    j["limit"] = {{"coefficients", r.limit_linear.coefficients}, {"se", r.limit_linear.se}};
  }
  return j;
}

}  // namespace fracnelson::xcli
