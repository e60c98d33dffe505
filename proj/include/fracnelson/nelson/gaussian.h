#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fracnelson/core/hurst.h"
#include "fracnelson/nelson/types.h"

namespace fracnelson::nelson {

using core::HurstIndex;

struct ConditionalIncrement {
  /// E[Delta_h B_t | B_s, s in cond_times] = sum_i coefficients[i] B_{s_i}.
  std::vector<double> coefficients;
  /// Var of that conditional expectation.
  double variance = 0.0;
};

/// Exact Gaussian regression of the increment on fBm values. Throws
/// std::invalid_argument when the conditioning covariance is singular.
ConditionalIncrement gaussian_conditional_increment(HurstIndex h, double t, double step, Direction direction,
                                                    std::span<const double> cond_times);

/// Var(E[(B_t - B_{t-h}) / h | B_t, B_{t+h}]).
double backward_variance_exact(HurstIndex h, double t, double step);
/// det of the covariance matrix of (B_t, B_{t+h}).
double backward_determinant(HurstIndex h, double t, double step);

/// Present-sigma-field derivative of fBm at (t, B_t): H B_t / t for H > 1/2, 0 forward
/// and B_t / t backward for H = 1/2; std::nullopt (does not exist) for H < 1/2.
std::optional<double> analytic_fbm_present(HurstIndex h, double t, double b_t, Direction direction);

/// Intercept of the least-squares fit y = a + sum_e c_e h^e, as weights on y.
std::vector<double> extrapolation_weights(std::span<const double> steps, std::span<const double> exponents);
/// Intercept weights of the polynomial fit of the given degree in h.
std::vector<double> polynomial_extrapolation_weights(std::span<const double> steps, std::size_t degree);

}  // namespace fracnelson::nelson
