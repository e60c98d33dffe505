#include "fracnelson/nelson/process.h"

#include <stdexcept>
#include <string_view>

#include "fracnelson/core/sampling.h"
#include "fracnelson/nelson/wiener.h"
#include "fracnelson/young/sde.h"

namespace fracnelson::nelson {

using core::HurstIndex;

namespace {

double number(std::string_view s, const std::string& whole) {
  try {
    std::size_t pos = 0;
    double v = std::stod(std::string(s), &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + std::string(s) + "' in process '" + whole + "'");
  }
}

// "name@x0" -> (name, x0)
std::pair<std::string, double> preset_with_start(std::string_view s, const std::string& whole, double dflt) {
  auto at = s.find('@');
  if (at == std::string_view::npos) return {std::string(s), dflt};
  return {std::string(s.substr(0, at)), number(s.substr(at + 1), whole)};
}

}  // namespace

ProcessSpec ProcessSpec::parse(const std::string& text) {
  ProcessSpec p;
  p.text = text;
  std::string_view s = text;
  auto colon = s.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("process '" + text + "' needs a kind prefix");
  std::string_view kind = s.substr(0, colon), rest = s.substr(colon + 1);
  if (kind == "fbm") {
    p.kind = Kind::fbm;
    auto c2 = rest.find(':');
    p.hurst = number(rest.substr(0, c2), text);
    if (c2 != std::string_view::npos) p.sampler = std::string(rest.substr(c2 + 1));
    if (p.sampler != "cholesky" && p.sampler != "circulant")
      throw std::invalid_argument("unknown sampler '" + p.sampler + "'");
    (void)HurstIndex(p.hurst);
  } else if (kind == "sde") {
    p.kind = Kind::sde;
    auto c2 = rest.find(':');
    if (c2 == std::string_view::npos) throw std::invalid_argument("sde process needs sde:H:preset[@x0]");
    p.hurst = number(rest.substr(0, c2), text);
    (void)HurstIndex(p.hurst);
    std::tie(p.preset, p.x0) = preset_with_start(rest.substr(c2 + 1), text, 0.0);
    young::preset(p.preset, p.x0);  // validates the name
  } else if (kind == "volterra") {
    p.kind = Kind::volterra;
    p.hurst = 0.5;
    auto c2 = rest.find(':');
    if (c2 == std::string_view::npos) throw std::invalid_argument("volterra process needs a kernel");
    std::string_view k = rest.substr(0, c2), arg = rest.substr(c2 + 1);
    if (k == "fbm") {
      p.kernel = frac::KernelSpec::fbm(HurstIndex(number(arg, text)));
    } else if (k == "piecewise") {
      p.kernel = frac::KernelSpec::piecewise_hurst(number(arg, text), 1.0);
    } else {
      throw std::invalid_argument("unknown kernel '" + std::string(k) + "'");
    }
  } else if (kind == "wiener") {
    p.kind = Kind::wiener;
    p.hurst = 0.5;
    if (rest == "bm") {
      p.preset = "bm";
    } else {
      std::tie(p.preset, p.x0) = preset_with_start(rest, text, 0.0);
      if (p.preset.rfind("ou:", 0) != 0) young::preset(p.preset, p.x0);
      else number(std::string_view(p.preset).substr(3), text);
    }
  } else {
    throw std::invalid_argument("unknown process kind '" + std::string(kind) + "'");
  }
  return p;
}

double ProcessSpec::driving_hurst() const { return kind == Kind::fbm || kind == Kind::sde ? hurst : 0.5; }

core::PathEnsemble simulate(const ProcessSpec& p, const core::TimeGrid& grid, std::size_t n_paths,
                            const core::SeedSpec& seed, std::uint64_t run) {
  switch (p.kind) {
    case ProcessSpec::Kind::fbm:
      return p.sampler == "circulant" ? core::circulant_sample(HurstIndex(p.hurst), grid, n_paths, seed, run)
                                      : core::cholesky_sample(HurstIndex(p.hurst), grid, n_paths, seed, run);
    case ProcessSpec::Kind::sde: {
      auto b = core::cholesky_sample(HurstIndex(p.hurst), grid, n_paths, seed, run);
      return young::solve_ensemble(young::preset(p.preset, p.x0), b);
    }
    case ProcessSpec::Kind::volterra:
      return core::volterra_sample(*p.kernel, grid, n_paths, seed, run);
    case ProcessSpec::Kind::wiener: {
      if (p.preset == "bm") return core::cholesky_sample(HurstIndex(0.5), grid, n_paths, seed, run);
      if (p.preset.rfind("ou:", 0) == 0)
        return ou_sample(std::stod(p.preset.substr(3)), p.x0, grid, n_paths, seed, run);
      return wiener_sample(young::preset(p.preset, p.x0), grid, n_paths, seed, 16, run);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace fracnelson::nelson
