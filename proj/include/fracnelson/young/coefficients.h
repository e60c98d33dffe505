#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace fracnelson::young {

using ScalarFn = std::function<double(double)>;

/// Coefficients of dX = sigma(X) dB + b(X) dt with the derivatives the solvers need.
struct CoefficientSet {
  ScalarFn sigma;
  ScalarFn b;
  ScalarFn sigma_prime;
  ScalarFn b_prime;
  ScalarFn sigma_second;
  double x0 = 0.0;
  double sigma_sup = std::numeric_limits<double>::infinity();
  double b_sup = std::numeric_limits<double>::infinity();
  /// inf |sigma| > 0, as established by validate().
  bool elliptic = false;
  /// r when b = r sigma.
  std::optional<double> proportional_ratio;
  std::string name;
};

/// Checks the supplied derivatives against central differences at 20 pseudo-random
/// points (|d - fd| <= 1e-6 max(1, |d|)) and sets `elliptic` from min |sigma| on a
/// probe lattice around x0. Throws std::invalid_argument on a derivative mismatch.
CoefficientSet validate(CoefficientSet c, std::uint64_t seed = 17);

/// Named presets:
///   linear            sigma(x) = x,          b = 0
///   sine              sigma(x) = 2 + sin x,  b(x) = cos x
///   constant          sigma = 1,             b = 0
///   zero              sigma = 0,             b = 0
///   proportional:r    sigma(x) = 2 + sin x,  b = r sigma
///   vanishing:r       sigma(x) = sin x,      b = r sigma   (sigma(0) = 0)
///   affine            sigma = 1,             b(x) = x
///   bounded-drift     sigma = 1,             b(x) = sin x
///   logistic          sigma = 0,             b(x) = x (1 - x)
///   ou:theta          sigma = 1,             b(x) = -theta x
/// The result is validated.
CoefficientSet preset(std::string_view name, double x0);

}  // namespace fracnelson::young
