#pragma once

#include "fracnelson/frac/grid_function.h"

namespace fracnelson::young {

using frac::GridFunction;

/// Hölder exponent mu in (0, 1].
class HolderExponent {
 public:
  explicit HolderExponent(double mu);
  double value() const noexcept { return mu_; }

 private:
  double mu_;
};

/// exact: sup over all pairs of grid points, O(n^2).
/// dyadic: sup over lags 1, 2, 4, ... grid steps only, O(n log n); a lower bound of
/// the exact value that is usually within a few percent for rough paths.
enum class HolderMode { exact, dyadic };

double holder_norm(const GridFunction& h, HolderExponent mu, HolderMode mode = HolderMode::exact);

}  // namespace fracnelson::young
