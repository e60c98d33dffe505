#pragma once

#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/nelson/types.h"

namespace fracnelson::nelson {

/// Monte Carlo realization of E[Delta_h Z_t | Q] at one step h. Scalar
/// conditioning uses bins (see EstimatorConfig); multivariate conditioning uses a
/// linear regression, which is exact for Gaussian processes. Bins with fewer than
/// min_bin_count paths are marked invalid. `bins` is built when empty.
LadderStep regress_conditional(const core::PathEnsemble& e, double t, double h, Direction direction,
                               const SigmaFieldSpec& spec, BinLattice& bins,
                               const EstimatorConfig& config = {});

/// Binned E[y | v] with the estimator's bin rule; `bins` is built from v when empty.
BinnedFunction binned_conditional_mean(std::span<const double> y, std::span<const double> v,
                                       const EstimatorConfig& config = {});

/// Runs the regression across the ladder, extrapolates h -> 0 path by path,
/// classifies the limit and estimates its variance.
DerivativeReport estimate_derivative(const core::PathEnsemble& e, const SigmaFieldSpec& spec, double t,
                                     const HLadder& ladder, const EstimatorConfig& config = {});

/// sqrt(sum n_b (a_b - f(x_b))^2 / sum n_b f(x_b)^2) over valid bins, comparing the
/// report's value model with a reference function of the conditioning variable.
double relative_l2_error(const DerivativeReport& r, const std::function<double(double)>& truth);

/// Same, for the raw per-bin limit.
double relative_l2_error_raw(const DerivativeReport& r, const std::function<double(double)>& truth);

}  // namespace fracnelson::nelson
