#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "fracnelson/core/hurst.h"

namespace fracnelson::frac {

using core::HurstIndex;

/// Volterra kernel K(t, s), zero for s >= t.
class KernelSpec {
 public:
  enum class Kind { fbm, piecewise_hurst, custom };
  using Evaluator = std::function<double(double t, double s)>;

  /// Fractional Brownian motion kernel K_H (H >= 1/2 only).
  static KernelSpec fbm(HurstIndex h);
  /// K(t,s) = (t-s)^{H(t)} for s < t, where H(t) = 0 on [0,c] and t - c beyond.
  static KernelSpec piecewise_hurst(double c, double horizon);
  /// User kernel; `right_dt` is the right derivative in t, if known.
  static KernelSpec custom(Evaluator k, std::optional<Evaluator> right_dt, std::string description);

  Kind kind() const noexcept { return kind_; }
  const std::string& description() const noexcept { return description_; }
  std::optional<HurstIndex> hurst() const noexcept { return hurst_; }
  double switch_time() const noexcept { return c_; }
  double horizon() const noexcept { return horizon_; }

  /// K(t, s); zero for s >= t. Throws KernelEvaluationError on non-finite output.
  double operator()(double t, double s) const;

  bool has_right_dt() const noexcept { return static_cast<bool>(dt_); }
  /// Right derivative of K in t for s < t; throws std::logic_error when unavailable.
  double right_dt(double t, double s) const;

  /// Probes random pairs s >= t in [0, T] and throws std::invalid_argument when the
  /// evaluator is not zero there.
  void check_volterra(double horizon, std::size_t probes = 256) const;

 private:
  KernelSpec(Kind kind, Evaluator k, Evaluator dt, std::string description);

  Kind kind_;
  Evaluator k_;
  Evaluator dt_;
  std::string description_;
  std::optional<HurstIndex> hurst_;
  double c_ = 0.0;
  double horizon_ = 0.0;
};

}  // namespace fracnelson::frac
