#include "fracnelson/frac/kernel.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/random.h"
#include "fracnelson/frac/operators.h"

namespace fracnelson::frac {

KernelSpec::KernelSpec(Kind kind, Evaluator k, Evaluator dt, std::string description)
    : kind_(kind), k_(std::move(k)), dt_(std::move(dt)), description_(std::move(description)) {}

KernelSpec KernelSpec::fbm(HurstIndex h) {
  if (h.value() < 0.5) {
    throw UnsupportedFormError("fBm kernel K_H has no closed form here for H < 1/2; supply a custom kernel");
  }
  KernelSpec spec(
      Kind::fbm, [h](double t, double s) { return kernel_KH(h, t, s); },
      [h](double t, double s) { return kernel_KH_dt(h, t, s); }, "fbm:" + std::to_string(h.value()));
  spec.hurst_ = h;
  return spec;
}

KernelSpec KernelSpec::piecewise_hurst(double c, double horizon) {
  if (!(c >= 0.0 && c <= horizon)) throw std::invalid_argument("switch time must lie in [0, T]");
  auto hurst_of = [c](double t) { return t <= c ? 0.0 : std::min(t - c, 0.25); };
  // Right derivative of H(t): 1 on [c, c + 1/4), 0 elsewhere.
  auto hurst_slope = [c](double t) { return (t >= c && t < c + 0.25) ? 1.0 : 0.0; };
  KernelSpec spec(
      Kind::piecewise_hurst,
      [hurst_of](double t, double s) { return s < t ? std::pow(t - s, hurst_of(t)) : 0.0; },
      [hurst_of, hurst_slope](double t, double s) {
        if (s >= t) return 0.0;
        double d = t - s, hv = hurst_of(t);
        return std::pow(d, hv) * (hurst_slope(t) * std::log(d) + hv / d);
      },
      "piecewise-hurst:c=" + std::to_string(c));
  spec.c_ = c;
  spec.horizon_ = horizon;
  return spec;
}

KernelSpec KernelSpec::custom(Evaluator k, std::optional<Evaluator> right_dt, std::string description) {
  if (!k) throw std::invalid_argument("custom kernel needs an evaluator");
  return KernelSpec(Kind::custom, std::move(k), right_dt ? std::move(*right_dt) : Evaluator{},
                    std::move(description));
}

double KernelSpec::operator()(double t, double s) const {
  if (s >= t) return 0.0;
  double v = k_(t, s);
  if (!std::isfinite(v)) throw KernelEvaluationError(t, s, v);
  return v;
}

double KernelSpec::right_dt(double t, double s) const {
  if (!dt_) throw std::logic_error("kernel '" + description_ + "' has no right t-derivative");
  return dt_(t, s);
}

void KernelSpec::check_volterra(double horizon, std::size_t probes) const {
  core::PathRng rng(core::SeedSpec{0x5eed, 7}, 0, 0);
  for (std::size_t i = 0; i < probes; ++i) {
    double a = horizon * rng.uniform(), b = horizon * rng.uniform();
    double t = std::min(a, b), s = std::max(a, b);
    double v = k_(t, s);
    if (v != 0.0) {
      throw std::invalid_argument("kernel '" + description_ + "' is not Volterra: K(" + std::to_string(t) + ", " +
                                  std::to_string(s) + ") = " + std::to_string(v));
    }
  }
}

}  // namespace fracnelson::frac
