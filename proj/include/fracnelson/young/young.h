#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fracnelson/frac/grid_function.h"
#include "fracnelson/young/holder.h"

namespace fracnelson::young {

/// left: sum Z(t_k) (X(t_{k+1}) - X(t_k)); trapezoid: uses (Z(t_k) + Z(t_{k+1})) / 2.
enum class RiemannRule { left, trapezoid };

/// Running Riemann-Stieltjes sum t -> int_0^t Z dX on the common grid.
GridFunction young_riemann(const GridFunction& z, const GridFunction& x, RiemannRule rule = RiemannRule::left);

struct GammaInterval {
  double lo;
  double hi;
};

/// Open interval (1 - beta, alpha) of admissible fractional orders. Throws
/// std::invalid_argument when it is empty: the exponent certificates must be refined.
GammaInterval admissible_gamma(HolderExponent alpha, HolderExponent beta);

/// int_0^T f dg through fractional derivatives:
/// -int_0^T D^gamma_{0+} f(x) D^{1-gamma}_{T-} g_{T-}(x) dx with g_{T-} = g - g(T),
/// where both derivatives are the real Marchaud forms.
double young_fractional(const GridFunction& f, const GridFunction& g, double gamma);

/// As above, after checking gamma against the certified exponents of f and g.
double young_fractional(const GridFunction& f, const GridFunction& g, double gamma, HolderExponent alpha,
                        HolderExponent beta);

struct YoungBoundReport {
  /// Empirical constant on the finest grid.
  double kappa = 0.0;
  /// Constant per level, finest first (each next level halves the resolution).
  std::vector<double> kappa_by_level;
  bool finite = false;
  /// Relative spread of the per-level constants is at most `stability_tolerance`.
  bool stable = false;
  bool passed() const { return finite && stable; }
};

/// max over the given time pairs (s, t) of |int_s^t (f(r) - f(s)) dg(r)| /
/// (|f|_alpha |g|_beta |t - s|^{alpha + beta}), on the grid and on `levels - 1`
/// successively halved grids. Pairs are snapped to the coarsest grid.
YoungBoundReport young_bound_check(const GridFunction& f, const GridFunction& g, HolderExponent alpha,
                                   HolderExponent beta, const std::vector<std::pair<double, double>>& pairs,
                                   std::size_t levels = 3, double stability_tolerance = 0.2);

}  // namespace fracnelson::young
