#include "fracnelson/frac/special.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fracnelson::frac {

double gamma_fn(double x) { return boost::math::tgamma(x); }

double beta_fn(double a, double b) { return boost::math::beta(a, b); }

double fbm_kernel_constant(core::HurstIndex h) {
  if (!h.regular()) throw std::invalid_argument("c_H is defined for H > 1/2");
  thread_local double cached_h = -1.0;
  thread_local double cached_c = 0.0;
  if (h.value() != cached_h) {
    double hv = h.value();
    cached_c = std::sqrt(hv * (2.0 * hv - 1.0) / beta_fn(2.0 - 2.0 * hv, hv - 0.5));
    cached_h = hv;
  }
  return cached_c;
}

double kernel_normalization(core::HurstIndex h) {
  return fbm_kernel_constant(h) * gamma_fn(h.value() - 0.5);
}

namespace {

template <int N>
struct FullRule {
  FullRule() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (int i = 0; i < N / 2; ++i) {
      nodes[N / 2 - 1 - i] = -x[i];
      weights[N / 2 - 1 - i] = w[i];
      nodes[N / 2 + i] = x[i];
      weights[N / 2 + i] = w[i];
    }
  }
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

template <int N>
GaussRule rule() {
  static const FullRule<N> r;
  return {r.nodes.data(), r.weights.data(), N};
}

}  // namespace

GaussRule gauss_legendre(int order) {
  switch (order) {
    case 2: return rule<2>();
    case 4: return rule<4>();
    case 6: return rule<6>();
    case 8: return rule<8>();
    case 10: return rule<10>();
    case 12: return rule<12>();
    case 16: return rule<16>();
    case 20: return rule<20>();
    default: throw std::invalid_argument("unsupported Gauss-Legendre order");
  }
}

}  // namespace fracnelson::frac
