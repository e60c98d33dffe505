#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/frac/grid_function.h"
#include "fracnelson/young/coefficients.h"

namespace fracnelson::young {

using core::TimeGrid;
using frac::GridFunction;

enum class Scheme { doss_sussmann, euler };

struct SolutionPath {
  TimeGrid grid;
  std::vector<double> x;
  std::vector<double> driver;  // B at grid points
  /// Doss-Sussmann internals: X_t = phi(A_t, B_t). Empty for Euler.
  std::vector<double> a;
  std::size_t flow_evaluations = 0;
  Scheme scheme = Scheme::doss_sussmann;

  GridFunction x_function() const { return GridFunction(grid, x); }
  GridFunction driver_function() const { return GridFunction(grid, driver); }
};

/// The flow phi(x1, x2) of y' = sigma(y), y(0) = x1, at "time" x2, together with
/// int_0^{x2} sigma'(phi(x1, s)) ds. Adaptive Dormand-Prince, tolerance 1e-12.
struct FlowValue {
  double phi;
  double log_dx1;  // int_0^{x2} sigma'(phi(x1, s)) ds = log d phi / d x1
};
FlowValue flow(const CoefficientSet& c, double x1, double x2);

/// X_t = phi(A_t, B_t) with A' = exp(-int_0^{B_t} sigma'(phi(A_t, s)) ds) b(phi(A_t, B_t)),
/// integrated by classical RK4 on the grid (B linear between grid points).
SolutionPath doss_sussmann_solve(const CoefficientSet& c, std::span<const double> b_path, const TimeGrid& grid);

/// X_{k+1} = X_k + sigma(X_k) dB_k + b(X_k) dt_k. Throws SolverError when |X| > 1e12.
SolutionPath euler_young_solve(const CoefficientSet& c, std::span<const double> b_path, const TimeGrid& grid);

/// Solves every path of the driver ensemble; the result keeps the driver's Brownian increments.
core::PathEnsemble solve_ensemble(const CoefficientSet& c, const core::PathEnsemble& driver,
                                  Scheme scheme = Scheme::doss_sussmann);

/// Residual X_t - x0 - int_0^t sigma(X) dB - int_0^t b(X) ds with the left Riemann sum
/// for dB and the trapezoid rule for ds.
GridFunction young_residual(const CoefficientSet& c, const SolutionPath& sol);

/// D_s X_t = sigma(X_s) exp(int_s^t b'(X_u) du + int_s^t sigma'(X_u) dB_u) for s <= t, 0 for s > t.
/// Both integrals use the trapezoid rule; s and t must be grid points.
double malliavin_derivative_X(const CoefficientSet& c, const SolutionPath& sol, double s, double t);

/// s -> D_s X_t for every grid point s (zero beyond t), in O(n).
GridFunction malliavin_row(const CoefficientSet& c, const SolutionPath& sol, double t);

/// sum_{k<n} |u(t_k)|^{1/H} |B(t_{k+1}) - B(t_k)|^{1/H} with t_k = k T / n; the partition
/// points must lie on B's grid.
double variation_statistic(const GridFunction& u, const GridFunction& b, double hurst, std::size_t n);

}  // namespace fracnelson::young
