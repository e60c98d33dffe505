#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "fracnelson/core/hurst.h"
#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/frac/grid_function.h"
#include "fracnelson/nelson/types.h"
#include "fracnelson/young/coefficients.h"
#include "fracnelson/young/sde.h"

namespace fracnelson::nelson {

using core::HurstIndex;

/// H sigma(X_t) B_t / t + b(X_t) for proportional coefficients b = r sigma.
double proportional_present_derivative(const young::CoefficientSet& c, HurstIndex h, double t, double x_t,
                                       double b_t);

/// int_{x0}^{x} dy / sigma(y) (requires an elliptic sigma).
double inverse_flow(const young::CoefficientSet& c, double x);

/// u -> int_0^r g(X_s) 1_{s >= u} ds with g = (b' sigma - b sigma') / sigma, pushed
/// through op_OH and returned as a function of t. Requires an elliptic sigma.
frac::GridFunction compute_beta(const young::CoefficientSet& c, const young::SolutionPath& sol, double r,
                                HurstIndex h);

/// Result of evaluating the present-derivative expression for fractional diffusions.
struct UnevaluatedTerm {
  std::string term;
  std::string reason;
};

/// The present derivative at t as a binned function of X_t:
///   b(X_t) + H sigma(X_t) / t (int_{x0}^{X_t} dy / sigma - E[int_0^t (b / sigma)(X_s) ds | X_t]),
/// the general expression with its beta terms dropped. That is only valid when beta
/// vanishes identically on every path (checked to `beta_tolerance`); otherwise the
/// beta terms are returned unevaluated.
std::variant<BinnedFunction, UnevaluatedTerm> present_derivative_expression(
    const young::CoefficientSet& c, const core::PathEnsemble& x, HurstIndex h, double t,
    const EstimatorConfig& config = {}, double beta_tolerance = 1e-10);

/// Cylindrical functional V = phi(B_{u_1}, ..., B_{u_k}) with its gradient.
struct CylindricalFunctional {
  std::vector<double> times;
  std::function<double(std::span<const double>)> phi;
  std::function<std::vector<double>(std::span<const double>)> gradient;
  std::string name;
};

struct WeakPairingResult {
  std::vector<double> steps;
  std::vector<double> estimates;   // E[V Delta_h Z_t] per step
  std::vector<double> se;
  double limit = 0.0;
  double limit_se = 0.0;
  /// Closed pairing H(2H-1) E[sigma_t int D_s V |t-s|^{2H-2} ds + V int D_s sigma_t |t-s|^{2H-2} ds]
  /// for sigma = 1 (D sigma = 0), by quadrature and Monte Carlo over the same paths.
  double closed_form = 0.0;
  double closed_form_se = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

/// Monte Carlo E[V Delta_h Z_t] over the ladder (paths of Z and of its fBm driver B
/// given separately; they coincide for Z = B), extrapolated with a polynomial in h.
WeakPairingResult weak_pairing_limit(const core::PathEnsemble& z, const core::PathEnsemble& b, HurstIndex h,
                                     const CylindricalFunctional& v, double t, const std::vector<double>& steps,
                                     std::size_t degree = 1);

/// E[B_u Delta_h B_t] = (R(t+h, u) - R(t, u)) / h from the covariance.
double fbm_pairing_exact(HurstIndex h, double t, double u, double step);

}  // namespace fracnelson::nelson
