#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracnelson/core/time_grid.h"
#include "fracnelson/frac/kernel.h"
#include "fracnelson/nelson/types.h"

namespace fracnelson::nelson {

/// Refinement schedule: I_m = int_0^{t - delta_m} (d+K/dt)(t, s)^2 ds with
/// delta_0 = first_fraction * t and delta_{m+1} = delta_m / ratio.
struct RefinementSchedule {
  double first_fraction = 0.5;
  double ratio = 4.0;
  std::size_t levels = 10;
  /// Finite-difference steps for kernels without a closed-form derivative; the
  /// smallest is used and the others are reported.
  std::vector<double> fd_steps{1e-3, 1e-4, 1e-5};
  /// Cauchy tolerance relative to I.
  double cauchy_tolerance = 1e-3;
  /// Divergent when each of the last `growth_steps` increments is at least
  /// `growth_ratio` times the previous one.
  double growth_ratio = 1.0;
  std::size_t growth_steps = 3;
};

/// W-path functional sum_j weights[j] dW_j with weights (d+K/dt)(t, midpoint_j).
struct DerivativeFunctional {
  core::TimeGrid grid;
  std::vector<double> weights;
  double operator()(std::span<const double> dw) const;
};

struct CriterionResult {
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> deltas;
  std::vector<double> integrals;  // I_m
  /// Set for divergence caused by a non-finite derivative value.
  std::optional<std::pair<double, double>> singular_at;
  std::string note;
};

CriterionResult volterra_criterion(const frac::KernelSpec& k, double t, const RefinementSchedule& schedule = {});

/// On a convergent verdict, the derivative functional on `grid` (midpoint evaluation).
std::optional<DerivativeFunctional> derivative_functional(const frac::KernelSpec& k, double t,
                                                          const core::TimeGrid& grid,
                                                          const RefinementSchedule& schedule = {});

struct XiResult {
  double value = 0.0;          // measure of cells with a convergent verdict
  double inconclusive = 0.0;   // measure of cells with an inconclusive verdict
  std::vector<double> times;
  std::vector<Verdict> verdicts;
};

/// Runs the criterion at every cell midpoint of the grid.
XiResult xi_statistic(const frac::KernelSpec& k, const core::TimeGrid& grid, const RefinementSchedule& schedule = {});

}  // namespace fracnelson::nelson
