#include "fracnelson/frac/operators.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/parallel.h"
#include "fracnelson/frac/fractional.h"
#include "fracnelson/frac/special.h"

namespace fracnelson::frac {

namespace {

void require_closed_form(HurstIndex h) {
  if (h.value() < 0.5) {
    throw UnsupportedFormError("the closed-form fBm kernel is only available for H >= 1/2");
  }
}

}  // namespace

double kernel_KH(HurstIndex h, double t, double s) {
  require_closed_form(h);
  if (s >= t) return 0.0;
  if (h.brownian()) return 1.0;
  if (!(s > 0.0)) throw std::invalid_argument("kernel_KH requires s > 0");
  const double p = h.value() - 0.5;
  // int_s^t (u-s)^{p-1} u^p du = (1/p) int_0^{(t-s)^p} (s + w^{1/p})^p dw
  auto integrand = [&](double w) { return std::pow(s + std::pow(w, 1.0 / p), p); };
  double top = std::pow(t - s, p);
  double err = 0.0;
  double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, top, 15, 1e-10, &err);
  return fbm_kernel_constant(h) * std::pow(s, -p) * integral / p;
}

double kernel_KH_dt(HurstIndex h, double t, double s) {
  require_closed_form(h);
  if (!(s > 0.0) || s >= t) throw std::invalid_argument("kernel_KH_dt requires 0 < s < t");
  if (h.brownian()) return 0.0;
  const double p = h.value() - 0.5;
  return fbm_kernel_constant(h) * std::pow(t / s, p) * std::pow(t - s, p - 1.0);
}

GridFunction op_KH(const GridFunction& hf, HurstIndex hurst) {
  require_closed_form(hurst);
  const auto& g = hf.grid();
  if (hurst.brownian()) return cumulative_integral(hf);
  const std::size_t n = g.steps();
  const double p = hurst.value() - 0.5;
  const double ch = fbm_kernel_constant(hurst);
  const auto regular = gauss_legendre(4);
  const auto first = gauss_legendre(20);
  const auto inner = gauss_legendre(4);
  const auto adjacent = gauss_legendre(8);

  // Cells are processed in fixed blocks and the block sums are added in order,
  // so the result does not depend on the thread count.
  constexpr std::size_t block = 32;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<std::vector<double>> partial(n_blocks, std::vector<double>(g.size(), 0.0));

  core::parallel_for(n_blocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      auto& acc = partial[b];
      for (std::size_t j = b * block; j < std::min(n, (b + 1) * block); ++j) {
        const double lo = g[j], hi = g[j + 1];
        const double fl = hf.cell_left(j), fr = hf.cell_right(j);
        const auto& outer = j == 0 ? first : regular;
        for (int i = 0; i < outer.order; ++i) {
          double s, weight;
          if (j == 0) {
            // s = w^{1/(1-p)} absorbs the s^{-p} factor.
            double e = 1.0 - p, top = std::pow(hi, e), w = 0.5 * top * (1.0 + outer.nodes[i]);
            s = std::pow(w, 1.0 / e);
            weight = 0.5 * top * outer.weights[i] / e;
          } else {
            s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * outer.nodes[i];
            weight = 0.5 * (hi - lo) * outer.weights[i] * std::pow(s, -p);
          }
          const double hs = fl + (fr - fl) * (s - lo) / (hi - lo);
          const double factor = ch * weight * hs / p;
          // F(t_m, s) accumulated over cells m, each piece in the variable w = (u-s)^p.
          double f = 0.0;
          double w_prev = 0.0;
          for (std::size_t m = j + 1; m <= n; ++m) {
            double w_next = std::pow(g[m] - s, p);
            double half = 0.5 * (w_next - w_prev), mid = 0.5 * (w_next + w_prev), piece = 0.0;
            for (int q = 0; q < inner.order; ++q) {
              piece += inner.weights[q] * std::pow(s + std::pow(mid + half * inner.nodes[q], 1.0 / p), p);
            }
            f += piece * half;
            w_prev = w_next;
            // The cell adjacent to t_m is integrated separately below.
            if (m > j + 1) acc[m] += factor * f;
          }
        }
        // Contribution of cell j to t_{j+1}: K_H(t_{j+1}, s) ~ (t_{j+1} - s)^p there, so
        // integrate in v = (t_{j+1} - s)^p, where everything is smooth. On the first
        // cell only the upper half is done this way.
        const double t = hi;
        const double from = j == 0 ? 0.5 * hi : lo;
        const double vtop = std::pow(t - from, p);
        double adj = 0.0;
        for (int i = 0; i < adjacent.order; ++i) {
          double v = 0.5 * vtop * (1.0 + adjacent.nodes[i]);
          double s = t - std::pow(v, 1.0 / p);
          double jac = std::pow(v, 1.0 / p - 1.0) / p;
          double f = 0.0;
          for (int q = 0; q < adjacent.order; ++q) {
            double w = 0.5 * v * (1.0 + adjacent.nodes[q]);
            f += adjacent.weights[q] * std::pow(s + std::pow(w, 1.0 / p), p);
          }
          f *= 0.5 * v / p;
          const double hs = fl + (fr - fl) * (s - lo) / (hi - lo);
          adj += adjacent.weights[i] * jac * ch * std::pow(s, -p) * f * hs;
        }
        acc[j + 1] += 0.5 * vtop * adj;
        if (j == 0) {
          // Lower half of the first cell, in w = s^{1-p}.
          const double e = 1.0 - p, top = std::pow(from, e);
          double low = 0.0;
          for (int i = 0; i < adjacent.order; ++i) {
            double s = std::pow(0.5 * top * (1.0 + adjacent.nodes[i]), 1.0 / e);
            double vs = std::pow(t - s, p), f = 0.0;
            for (int q = 0; q < adjacent.order; ++q) {
              double w = 0.5 * vs * (1.0 + adjacent.nodes[q]);
              f += adjacent.weights[q] * std::pow(s + std::pow(w, 1.0 / p), p);
            }
            f *= 0.5 * vs / p;
            const double hs = fl + (fr - fl) * (s - lo) / (hi - lo);
            low += adjacent.weights[i] * ch * f * hs;
          }
          acc[1] += 0.5 * top * low / e;
        }
      }
    }
  });
  std::vector<double> out(g.size(), 0.0);
  for (const auto& part : partial)
    for (std::size_t k = 0; k < g.size(); ++k) out[k] += part[k];
  return GridFunction(g, std::move(out));
}

GridFunction op_OH(const GridFunction& phi, HurstIndex hurst) {
  require_closed_form(hurst);
  if (hurst.brownian()) return phi.with_rule(Interpolation::linear);
  const double p = hurst.value() - 0.5;
  const auto& g = phi.grid();
  GridFunction integral = rl_integral_weighted(phi, FracOrder(p), p);
  const double c = kernel_normalization(hurst);
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 1; k < g.size(); ++k) out[k] = c * std::pow(g[k], p) * integral[k];
  return GridFunction(g, std::move(out));
}

GridFunction op_KH_inverse(const GridFunction& phi, HurstIndex hurst) {
  require_closed_form(hurst);
  const auto& g = phi.grid();
  double scale = 1.0;
  for (double v : phi.samples()) scale = std::max(scale, std::abs(v));
  if (std::abs(phi[0]) > 1e-12 * scale) throw std::invalid_argument("op_KH_inverse requires phi(0) = 0");
  if (hurst.brownian()) return grid_derivative(phi);
  const double p = hurst.value() - 0.5;
  const std::size_t n = g.steps();
  if (n < 3) throw std::invalid_argument("op_KH_inverse needs at least three steps");
  // The image of a smooth function under K_H behaves like s^{H+1/2} times a smooth
  // function near 0, so differentiate psi = phi / s^{H+1/2} and rebuild
  // s^{1/2-H} phi' = (H + 1/2) psi + s psi'.
  std::vector<double> psi(g.size());
  for (std::size_t k = 1; k <= n; ++k) psi[k] = phi[k] / std::pow(g[k], 1.0 + p);
  {
    // Quadratic extrapolation to s = 0.
    double x1 = g[1], x2 = g[2], x3 = g[3];
    psi[0] = psi[1] * x2 * x3 / ((x1 - x2) * (x1 - x3)) + psi[2] * x1 * x3 / ((x2 - x1) * (x2 - x3)) +
             psi[3] * x1 * x2 / ((x3 - x1) * (x3 - x2));
  }
  GridFunction dpsi = grid_derivative(GridFunction(g, psi));
  std::vector<double> w(g.size());
  for (std::size_t k = 0; k <= n; ++k) w[k] = (1.0 + p) * psi[k] + g[k] * dpsi[k];
  GridFunction d = rl_derivative(GridFunction(g, w), FracOrder(p), Side::left);
  const double c = kernel_normalization(hurst);
  std::vector<double> out(g.size());
  out[0] = w[0] / (c * gamma_fn(1.0 - p));
  for (std::size_t k = 1; k <= n; ++k) out[k] = std::pow(g[k], p) * d[k] / c;
  return GridFunction(g, std::move(out));
}

namespace {

// (B^e - A^e) / e with A >= 0, e > 0.
double mom(double a, double b, double e) {
  return (std::pow(b, e) - (a > 0.0 ? std::pow(a, e) : 0.0)) / e;
}

// int_c^d (gl + slope (v - c)) |u - v|^beta dv for beta > -1.
double linear_cell_moment(double u, double c, double d, double gl, double slope, double beta) {
  auto above = [&](double lo, double hi, double val_lo) {
    // v in [lo, hi] with lo >= u: w = v - u.
    double a = lo - u, b = hi - u;
    return (val_lo - slope * a) * mom(a, b, beta + 1.0) + slope * mom(a, b, beta + 2.0);
  };
  auto below = [&](double lo, double hi, double val_hi) {
    // v in [lo, hi] with hi <= u: w = u - v, value = val_hi - slope (w - a).
    double a = u - hi, b = u - lo;
    return (val_hi + slope * a) * mom(a, b, beta + 1.0) - slope * mom(a, b, beta + 2.0);
  };
  double gu = gl + slope * (u - c);
  if (u <= c) return above(c, d, gl);
  if (u >= d) return below(c, d, gl + slope * (d - c));
  return below(c, u, gu) + above(u, d, gu);
}

}  // namespace

double inner_product_H(const GridFunction& f, const GridFunction& g, HurstIndex hurst, InnerProductMode mode) {
  if (!hurst.regular()) throw std::invalid_argument("inner_product_H requires H > 1/2");
  if (!(f.grid() == g.grid())) throw std::invalid_argument("inner_product_H needs functions on the same grid");
  const auto& grid = f.grid();
  const std::size_t n = grid.steps();
  const double hv = hurst.value();
  const double beta = 2.0 * hv - 2.0;
  const bool absolute = mode == InnerProductMode::absolute;
  auto val = [&](double x) { return absolute ? std::abs(x) : x; };

  if (f.rule() == Interpolation::step && g.rule() == Interpolation::step) {
    // Exact: the double integral of |u-v|^{2H-2} over a cell pair comes from
    // Phi(x) = |x|^{2H} / (2H(2H-1)).
    const double norm = 1.0 / (2.0 * hv * (2.0 * hv - 1.0));
    auto phi = [&](double x) { return std::pow(std::abs(x), 2.0 * hv) * norm; };
    std::vector<double> rows(n, 0.0);
    core::parallel_for(n, [&](std::size_t i0, std::size_t i1) {
      for (std::size_t i = i0; i < i1; ++i) {
        double fi = val(f[i + 1]);
        if (fi == 0.0) continue;
        double a = grid[i], b = grid[i + 1], s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          double gj = val(g[j + 1]);
          if (gj == 0.0) continue;
          double c = grid[j], d = grid[j + 1];
          s += gj * (phi(b - c) + phi(a - d) - phi(a - c) - phi(b - d));
        }
        rows[i] = fi * s;
      }
    });
    double total = 0.0;
    for (double r : rows) total += r;
    return hv * (2.0 * hv - 1.0) * total;
  }

  const auto rule = gauss_legendre(8);
  std::vector<double> rows(n, 0.0);
  core::parallel_for(n, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      double a = grid[i], b = grid[i + 1];
      double fl = val(f.cell_left(i)), fr = val(f.cell_right(i));
      double s = 0.0;
      for (int q = 0; q < rule.order; ++q) {
        double u = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
        double fu = fl + (fr - fl) * (u - a) / (b - a);
        if (fu == 0.0) continue;
        double inner = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          double c = grid[j], d = grid[j + 1];
          double gl = val(g.cell_left(j)), gr = val(g.cell_right(j));
          if (gl == 0.0 && gr == 0.0) continue;
          inner += linear_cell_moment(u, c, d, gl, (gr - gl) / (d - c), beta);
        }
        s += rule.weights[q] * fu * inner;
      }
      rows[i] = 0.5 * (b - a) * s;
    }
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return hv * (2.0 * hv - 1.0) * total;
}

}  // namespace fracnelson::frac
