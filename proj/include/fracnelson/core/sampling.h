#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "fracnelson/core/hurst.h"
#include "fracnelson/frac/kernel.h"
#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/core/random.h"
#include "fracnelson/core/time_grid.h"

namespace fracnelson::core {

/// R_H(s, t) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(HurstIndex h, double s, double t);

/// Lower Cholesky factor; throws CholeskyError naming the first non-positive pivot.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a);

/// Exact fBm sampler on an arbitrary grid. The driver row holds the normalized
/// innovations xi_j * sqrt(dt_j), which are exactly the Brownian increments when H = 1/2.
PathEnsemble cholesky_sample(HurstIndex h, const TimeGrid& grid, std::size_t n_paths,
                             const SeedSpec& seed, std::uint64_t run = 0);

/// Exact fBm sampler on a uniform grid by circulant embedding of the increment
/// covariance. Paths carry no driver (the construction is not causal).
PathEnsemble circulant_sample(HurstIndex h, const TimeGrid& grid, std::size_t n_paths,
                              const SeedSpec& seed, std::uint64_t run = 0);

/// Stationary Gaussian increments with autocovariance gamma[0..n-1] (lag in steps),
/// cumulated into paths starting at 0. Throws EmbeddingError on a negative eigenvalue.
PathEnsemble circulant_sample_increments(std::span<const double> gamma, const TimeGrid& grid,
                                         std::size_t n_paths, const SeedSpec& seed,
                                         std::uint64_t run, std::string label);

/// G_{t_k} = sum_{j<k} K(t_k, (t_j + t_{j+1})/2) dW_j; the driver holds dW.
PathEnsemble volterra_sample(const frac::KernelSpec& k, const TimeGrid& grid, std::size_t n_paths,
                             const SeedSpec& seed, std::uint64_t run = 0);

/// Unbiased sample covariance of the ensemble at the given grid times.
Eigen::MatrixXd empirical_covariance(const PathEnsemble& e, std::span<const double> times);

}  // namespace fracnelson::core
