#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/core/random.h"
#include "fracnelson/young/coefficients.h"

namespace fracnelson::nelson {

/// Marginal density p_t of a diffusion, with access to d/dx log p_t.
class DensityModel {
 public:
  /// Gaussian with mean m(t) and variance v(t) > 0.
  static DensityModel gaussian(std::function<double(double)> mean, std::function<double(double)> variance);
  /// Gaussian kernel density estimate of the samples at one fixed time, with
  /// Silverman's bandwidth 1.06 sd n^{-1/5} times `bandwidth_factor`.
  static DensityModel kernel(std::vector<double> samples, double bandwidth_factor = 1.0);

  double density(double t, double x) const;
  double density_dx(double t, double x) const;
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  std::function<double(double)> mean_, variance_;
  std::vector<double> samples_;
  double bandwidth_ = 0.0;
};

struct Drifts {
  double forward;
  double backward;
};

/// forward = b(x); backward = b(x) - (1/p) d/dx(sigma^2 p), taken as b(x) where p = 0.
Drifts wiener_drifts(const young::CoefficientSet& c, const DensityModel& p, double t, double x);

/// Exact Ornstein-Uhlenbeck paths dX = -theta X dt + dW on the grid, with the
/// normalized innovations xi_k sqrt(dt_k) as driver.
core::PathEnsemble ou_sample(double theta, double x0, const core::TimeGrid& grid, std::size_t n_paths,
                             const core::SeedSpec& seed, std::uint64_t run = 0);

/// Euler-Maruyama for dX = b(X) dt + sigma(X) dW with `substeps` substeps per grid
/// step; the driver holds the Brownian increments per grid step.
core::PathEnsemble wiener_sample(const young::CoefficientSet& c, const core::TimeGrid& grid, std::size_t n_paths,
                                 const core::SeedSpec& seed, std::size_t substeps = 16, std::uint64_t run = 0);

/// Mean and variance of the OU marginal started at x0.
std::pair<double, double> ou_moments(double theta, double x0, double t);

}  // namespace fracnelson::nelson
