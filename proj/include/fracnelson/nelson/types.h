#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracnelson/core/time_grid.h"

namespace fracnelson::nelson {

using core::TimeGrid;

/// forward: (Z_{t+h} - Z_t) / h; backward: (Z_t - Z_{t-h}) / h.
enum class Direction { forward, backward };

std::string to_string(Direction d);

/// The conditioning information Q at anchor time t.
struct SigmaFieldSpec {
  enum class Kind { present, past, future, function };
  /// Values of the conditioning variables for one path.
  using Evaluator = std::function<std::vector<double>(std::span<const double> path, const TimeGrid& grid)>;

  Kind kind = Kind::present;
  double anchor = 0.0;
  /// past/future: explicit conditioning times. When empty, `lattice` times
  /// t - j h (past) or t + j h (future), j = 0..lattice-1, are used for each ladder step h.
  std::vector<double> times;
  std::size_t lattice = 0;
  Evaluator evaluator;
  std::size_t dimension = 1;
  /// Conditioning variables are functions of the path up to the anchor time.
  bool past_measurable = true;
  std::string name = "present";

  static SigmaFieldSpec present(double t);
  static SigmaFieldSpec past(double t, std::vector<double> times);
  static SigmaFieldSpec past_lattice(double t, std::size_t k);
  static SigmaFieldSpec future(double t, std::vector<double> times);
  static SigmaFieldSpec future_lattice(double t, std::size_t k);
  /// sigma(g(Z_t)) with g(x) = x^2.
  static SigmaFieldSpec even(double t);
  static SigmaFieldSpec function(double t, Evaluator evaluator, std::size_t dimension, bool past_measurable,
                                 std::string name);

  /// Conditioning times for ladder step h (present: the anchor only).
  std::vector<double> times_for(double h) const;
  /// Binned (scalar) versus linear (multivariate) regression.
  bool scalar() const;
};

/// Strictly decreasing steps.
class HLadder {
 public:
  HLadder(std::vector<double> steps, Direction direction);
  const std::vector<double>& steps() const noexcept { return steps_; }
  Direction direction() const noexcept { return direction_; }
  std::size_t size() const noexcept { return steps_.size(); }
  double operator[](std::size_t i) const { return steps_[i]; }

 private:
  std::vector<double> steps_;
  Direction direction_;
};

enum class Verdict { convergent, divergent, inconclusive };
std::string to_string(Verdict v);

/// All numeric thresholds of the estimator.
struct EstimatorConfig {
  std::size_t min_bin_count = 30;
  /// Bin width = bandwidth_factor * M^{-1/5} * sd(conditioning variable).
  double bandwidth_factor = 1.0;
  /// Correction exponents of the extrapolation in h. Empty: min(1, 2H - 1) for
  /// H > 1/2 (hurst set), otherwise 1.
  std::vector<double> exponents;
  std::optional<double> hurst;
  double cauchy_floor = 1e-3;
  double cauchy_se_multiple = 3.0;
  double divergence_growth = 1.5;
  std::size_t divergence_steps = 3;
  double nondegeneracy_z = 1.645;
  bool control_variates = true;
  std::size_t max_control_variates = 24;
  /// Scalar specs: each control is also multiplied by v^1..v^degree (v the standardized
  /// conditioning variable), which lets its coefficient vary with the conditioning value.
  std::size_t control_variate_degree = 2;
  /// Bins with at least this many paths per control fit their own control
  /// coefficients; 0 disables the per-bin fit.
  double local_control_factor = 20.0;
  /// Local-linear smoother bandwidth, in bin widths; 0 selects it by leave-one-out
  /// cross-validation over the bins.
  double smoother_bins = 0.0;
};

/// Bins of the scalar conditioning variable.
struct BinLattice {
  double origin = 0.0;
  double width = 0.0;
  std::vector<double> mean;  // mean of the conditioning variable in the bin
  std::vector<std::size_t> count;
  std::vector<bool> valid;    // count >= min_bin_count
  std::size_t size() const { return count.size(); }
};

/// Binned conditional mean with standard errors.
struct BinnedEstimate {
  std::vector<double> value;
  std::vector<double> se;
};

/// Linear conditional mean: intercept followed by one coefficient per conditioning variable.
struct LinearEstimate {
  std::vector<double> coefficients;
  std::vector<double> se;
  double residual_variance = 0.0;
};

/// A conditional mean represented on a bin lattice.
struct BinnedFunction {
  BinLattice bins;
  BinnedEstimate estimate;
};

struct LadderStep {
  double h = 0.0;
  BinnedEstimate binned;   // scalar specs
  LinearEstimate linear;   // multivariate specs
  /// Variance (over paths) of the conditional estimator, corrected for estimation noise.
  double variance = 0.0;
  /// Scalar specs: least-squares slope of the (control-adjusted) response on the conditioning variable.
  double slope = 0.0;
  double slope_se = 0.0;
  std::size_t control_variates = 0;
};

struct DerivativeReport {
  double t = 0.0;
  Direction direction = Direction::forward;
  std::string spec_name;
  bool scalar = true;
  BinLattice bins;
  std::vector<LadderStep> steps;
  std::vector<double> exponents;
  std::vector<double> extrapolation_weights;
  BinnedEstimate limit;            // scalar specs
  std::vector<double> value_model; // smoothed limit at bins.mean (scalar specs)
  double smoother_bandwidth = 0.0;
  LinearEstimate limit_linear;     // multivariate specs
  Verdict verdict = Verdict::inconclusive;
  double cauchy_gap = 0.0;
  double cauchy_tolerance = 0.0;
  std::vector<double> variance_ratios;
  bool nondegenerate = false;
  double limit_variance = 0.0;
  double limit_variance_se = 0.0;

  /// Smoothed limit at an arbitrary value of the conditioning variable (scalar specs).
  double evaluate(double x) const;
};

}  // namespace fracnelson::nelson
