#include "fracnelson/young/holder.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracnelson::young {

HolderExponent::HolderExponent(double mu) : mu_(mu) {
  if (!(mu > 0.0 && mu <= 1.0)) throw std::invalid_argument("Hölder exponent must lie in (0, 1], got " + std::to_string(mu));
}

double holder_norm(const GridFunction& h, HolderExponent mu, HolderMode mode) {
  const auto& g = h.grid();
  const std::size_t n = g.size();
  const double m = mu.value();
  double best = 0.0;
  if (mode == HolderMode::exact) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double d = std::abs(h[j] - h[i]);
        if (d > 0.0) best = std::max(best, d / std::pow(g[j] - g[i], m));
      }
    }
  } else {
    for (std::size_t lag = 1; lag < n; lag *= 2) {
      for (std::size_t i = 0; i + lag < n; ++i) {
        double d = std::abs(h[i + lag] - h[i]);
        if (d > 0.0) best = std::max(best, d / std::pow(g[i + lag] - g[i], m));
      }
    }
  }
  return best;
}

}  // namespace fracnelson::young
