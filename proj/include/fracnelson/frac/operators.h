#pragma once

#include "fracnelson/core/hurst.h"
#include "fracnelson/frac/grid_function.h"

namespace fracnelson::frac {

using core::HurstIndex;

/// K_H(t, s) for H >= 1/2: zero when s >= t, the indicator for H = 1/2, otherwise
/// the integral form evaluated by adaptive Gauss-Kronrod after the substitution
/// u = s + w^{1/(H-1/2)} (relative tolerance 1e-8). Requires s > 0.
/// Throws UnsupportedFormError for H < 1/2.
double kernel_KH(HurstIndex h, double t, double s);

/// d/dt K_H(t, s) = c_H (t/s)^{H-1/2} (t-s)^{H-3/2} for 0 < s < t; zero for H = 1/2.
double kernel_KH_dt(HurstIndex h, double t, double s);

/// (K_H h)(t) = int_0^t K_H(t, s) h(s) ds, evaluated from the kernel directly.
GridFunction op_KH(const GridFunction& h, HurstIndex hurst);

/// (d/dt K_H)(phi) = C s^{H-1/2} I^{H-1/2}_{0+}(s^{1/2-H} phi) with C = c_H Gamma(H-1/2),
/// so that its running integral equals op_KH(phi).
GridFunction op_OH(const GridFunction& phi, HurstIndex hurst);

/// Left inverse of op_KH: C^{-1} s^{H-1/2} D^{H-1/2}_{0+}(s^{1/2-H} phi'). Requires phi(0) = 0.
GridFunction op_KH_inverse(const GridFunction& phi, HurstIndex hurst);

enum class InnerProductMode { signed_form, absolute };

/// H(2H-1) int int f(u) g(v) |u-v|^{2H-2} du dv over [0, T]^2; `absolute` uses |f|, |g|
/// (the |H|-norm pairing). Exact for step functions; for linear interpolation the inner
/// integral is exact and the outer one uses Gauss-Legendre per cell.
double inner_product_H(const GridFunction& f, const GridFunction& g, HurstIndex hurst,
                       InnerProductMode mode = InnerProductMode::signed_form);

}  // namespace fracnelson::frac
