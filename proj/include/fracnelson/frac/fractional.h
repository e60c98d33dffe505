#pragma once

#include <complex>

#include "fracnelson/frac/grid_function.h"

namespace fracnelson::frac {

/// Order of a fractional operator, in (0, 1].
class FracOrder {
 public:
  explicit FracOrder(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

/// left: from a = t_0 upwards; right: from b = T downwards.
enum class Side { left, right };

/// Riemann-Liouville integral of the interpolated function, integrated exactly
/// cell by cell. The right-sided integral is returned without its complex phase
/// (-1)^{-alpha}; multiply by right_sided_phase(alpha) for the formal value.
GridFunction rl_integral(const GridFunction& f, FracOrder alpha, Side side = Side::left);

/// I^alpha_{0+}[y^{-nu} f](x) for 0 <= nu < 1, with the endpoint singularities
/// removed by substitution before Gauss-Legendre quadrature.
GridFunction rl_integral_weighted(const GridFunction& f, FracOrder alpha, double nu);

/// Marchaud form of the Riemann-Liouville derivative, exact for piecewise-linear f.
/// The endpoint where the operator is singular (a for left, b for right) is marked
/// via GridFunction::singular_point. alpha = 1 gives the grid derivative.
/// Step-interpolated input is rejected (its derivative is infinite at jumps).
GridFunction rl_derivative(const GridFunction& f, FracOrder alpha, Side side = Side::left);

std::complex<double> right_sided_phase(FracOrder alpha);

/// Centered differences inside, second-order one-sided stencils at both ends.
GridFunction grid_derivative(const GridFunction& f);

/// Trapezoid (linear rule) or exact step antiderivative starting at 0.
GridFunction cumulative_integral(const GridFunction& f);

}  // namespace fracnelson::frac
