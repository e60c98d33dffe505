#pragma once

#include "fracnelson/core/hurst.h"

namespace fracnelson::frac {

double gamma_fn(double x);
double beta_fn(double a, double b);

/// c_H with c_H^2 = H(2H-1) / B(2-2H, H-1/2), for H > 1/2. Cached per thread.
double fbm_kernel_constant(core::HurstIndex h);

/// c_H * Gamma(H - 1/2): the factor relating the fractional-integral form of
/// d/dt K_H to the kernel (see op_OH).
double kernel_normalization(core::HurstIndex h);

/// Gauss-Legendre nodes and weights on [-1, 1] (orders 2..16).
struct GaussRule {
  const double* nodes;
  const double* weights;
  int order;
};
GaussRule gauss_legendre(int order);

}  // namespace fracnelson::frac
