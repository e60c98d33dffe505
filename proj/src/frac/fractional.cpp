#include "fracnelson/frac/fractional.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracnelson/core/parallel.h"
#include "fracnelson/frac/special.h"

namespace fracnelson::frac {

FracOrder::FracOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("fractional order must lie in (0, 1], got " + std::to_string(alpha));
  }
}

std::complex<double> right_sided_phase(FracOrder alpha) {
  return std::polar(1.0, -std::numbers::pi * alpha.value());
}

namespace {

// One interpolation cell seen from the evaluation point x: distances
// u in [near_dist, far_dist] and the function values at those two ends.
// On uniform grids `near_steps` counts whole steps between x and the near end.
struct Cell {
  double near_dist, far_dist, near_value, far_value;
  std::size_t near_steps;
};

template <class Fn>
void for_each_cell(const GridFunction& f, std::size_t k, Side side, Fn&& fn) {
  const auto& g = f.grid();
  const double x = g[k];
  if (side == Side::left) {
    for (std::size_t j = 0; j < k; ++j) fn(Cell{x - g[j + 1], x - g[j], f.cell_right(j), f.cell_left(j), k - j - 1});
  } else {
    for (std::size_t j = k; j < g.steps(); ++j) fn(Cell{g[j] - x, g[j + 1] - x, f.cell_left(j), f.cell_right(j), j - k});
  }
}

// d -> d^e, tabulated at multiples of the step on uniform grids.
class Powers {
 public:
  Powers(const TimeGrid& g, double e) : e_(e), uniform_(g.is_uniform()) {
    if (!uniform_) return;
    double h = g.horizon() / static_cast<double>(g.steps());
    table_.resize(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
      table_[m] = m == 0 ? (e > 0.0 ? 0.0 : INFINITY) : std::pow(static_cast<double>(m) * h, e);
    }
  }
  double operator()(double d, std::size_t steps) const {
    if (uniform_) return table_[steps];
    return d > 0.0 ? std::pow(d, e_) : (e_ > 0.0 ? 0.0 : INFINITY);
  }

 private:
  double e_;
  bool uniform_;
  std::vector<double> table_;
};

void fill_singular_endpoint(std::vector<double>& v, const TimeGrid& g, std::size_t k) {
  const std::size_t n = g.steps();
  if (n < 2) {
    v[k] = v[k == 0 ? 1 : 0];
    return;
  }
  if (k == 0) {
    v[0] = v[1] - (v[2] - v[1]) * (g[1] - g[0]) / (g[2] - g[1]);
  } else {
    v[n] = v[n - 1] + (v[n - 1] - v[n - 2]) * (g[n] - g[n - 1]) / (g[n - 1] - g[n - 2]);
  }
}

}  // namespace

GridFunction rl_integral(const GridFunction& f, FracOrder order, Side side) {
  const double a = order.value();
  const auto& g = f.grid();
  std::vector<double> out(g.size(), 0.0);
  const double inv_gamma = 1.0 / gamma_fn(a);
  const Powers pa(g, a), pa1(g, a + 1.0);
  core::parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      double acc = 0.0;
      for_each_cell(f, k, side, [&](const Cell& c) {
        double slope = (c.far_value - c.near_value) / (c.far_dist - c.near_dist);
        double m0 = (pa(c.far_dist, c.near_steps + 1) - pa(c.near_dist, c.near_steps)) / a;
        double m1 = (pa1(c.far_dist, c.near_steps + 1) - pa1(c.near_dist, c.near_steps)) / (a + 1.0);
        acc += (c.near_value - slope * c.near_dist) * m0 + slope * m1;
      });
      out[k] = acc * inv_gamma;
    }
  });
  return GridFunction(g, std::move(out));
}

GridFunction rl_integral_weighted(const GridFunction& f, FracOrder order, double nu) {
  if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("weight exponent must lie in [0, 1)");
  const double a = order.value();
  const auto& g = f.grid();
  const auto rule = gauss_legendre(8);
  std::vector<double> out(g.size(), 0.0);
  const double inv_gamma = 1.0 / gamma_fn(a);

  core::parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = std::max<std::size_t>(begin, 1); k < end; ++k) {
      const double x = g[k];
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double lo = g[j], hi = g[j + 1];
        const double fl = f.cell_left(j), fr = f.cell_right(j);
        auto fval = [&](double y) { return fl + (fr - fl) * (y - lo) / (hi - lo); };
        auto integrand = [&](double y) {
          return std::pow(x - y, a - 1.0) * (nu > 0.0 ? std::pow(y, -nu) : 1.0) * fval(y);
        };
        auto plain = [&](double p, double q) {
          double s = 0.0, half = 0.5 * (q - p), mid = 0.5 * (q + p);
          for (int i = 0; i < rule.order; ++i) s += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
          return s * half;
        };
        // int_p^x (x-y)^{a-1} F(y) dy with u = x - y = w^{1/a}.
        auto near_x = [&](double p) {
          if (a == 1.0) return plain(p, x);
          double top = std::pow(x - p, a), half = 0.5 * top, s = 0.0;
          for (int i = 0; i < rule.order; ++i) {
            double y = x - std::pow(half * (1.0 + rule.nodes[i]), 1.0 / a);
            s += rule.weights[i] * (nu > 0.0 ? std::pow(y, -nu) : 1.0) * fval(y);
          }
          return s * half / a;
        };
        // int_0^q y^{-nu} G(y) dy with y = w^{1/(1-nu)}.
        auto near_zero = [&](double q) {
          if (nu == 0.0) return plain(0.0, q);
          double e = 1.0 - nu, top = std::pow(q, e), half = 0.5 * top, s = 0.0;
          for (int i = 0; i < rule.order; ++i) {
            double y = std::pow(half * (1.0 + rule.nodes[i]), 1.0 / e);
            s += rule.weights[i] * std::pow(x - y, a - 1.0) * fval(y);
          }
          return s * half / e;
        };
        const bool touches_x = (j + 1 == k), touches_zero = (j == 0);
        if (touches_x && touches_zero) {
          double m = 0.5 * hi;
          acc += near_zero(m) + near_x(m);
        } else if (touches_x) {
          acc += near_x(lo);
        } else if (touches_zero) {
          acc += near_zero(hi);
        } else {
          acc += plain(lo, hi);
        }
      }
      out[k] = acc * inv_gamma;
    }
  });
  return GridFunction(g, std::move(out));
}

GridFunction grid_derivative(const GridFunction& f) {
  const auto& g = f.grid();
  const std::size_t n = g.steps();
  std::vector<double> d(g.size());
  if (n == 1) {
    d[0] = d[1] = (f[1] - f[0]) / (g[1] - g[0]);
    return GridFunction(g, std::move(d));
  }
  // Second-order one-sided stencils at the ends.
  double h1 = g[1] - g[0], h2 = g[2] - g[0];
  d[0] = -(h1 + h2) / (h1 * h2) * f[0] + h2 / (h1 * (h2 - h1)) * f[1] - h1 / (h2 * (h2 - h1)) * f[2];
  h1 = g[n] - g[n - 1];
  h2 = g[n] - g[n - 2];
  d[n] = (h1 + h2) / (h1 * h2) * f[n] - h2 / (h1 * (h2 - h1)) * f[n - 1] + h1 / (h2 * (h2 - h1)) * f[n - 2];
  for (std::size_t k = 1; k < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (g[k + 1] - g[k - 1]);
  return GridFunction(g, std::move(d));
}

GridFunction cumulative_integral(const GridFunction& f) {
  const auto& g = f.grid();
  std::vector<double> c(g.size(), 0.0);
  for (std::size_t j = 0; j < g.steps(); ++j) {
    c[j + 1] = c[j] + 0.5 * (f.cell_left(j) + f.cell_right(j)) * g.step(j);
  }
  return GridFunction(g, std::move(c));
}

GridFunction rl_derivative(const GridFunction& f, FracOrder order, Side side) {
  if (f.rule() == Interpolation::step) {
    throw std::invalid_argument("fractional derivative needs a continuous (linear) interpolation");
  }
  const auto& g = f.grid();
  const std::size_t n = g.steps();
  const std::size_t singular = side == Side::left ? 0 : n;
  if (order.value() == 1.0) {
    GridFunction d = grid_derivative(f);
    return side == Side::left ? d : GridFunction(g, [&] {
      std::vector<double> v(d.samples().begin(), d.samples().end());
      for (auto& x : v) x = -x;
      return v;
    }());
  }
  const double a = order.value();
  const double inv_gamma = 1.0 / gamma_fn(1.0 - a);
  // Functions in the range of I^a behave like c u^a at the endpoint (u the distance
  // to it), which the piecewise-linear rule cannot follow: the error at node k is
  // O(k^{-1-a}) at any resolution. Fit g - g(end) = c u^a + d u + e u^{1+a} on the three
  // nearest nodes, differentiate c u^a exactly (D^a u^a = Gamma(1+a)), and apply the
  // rule to the remainder.
  double c_sing = 0.0;
  std::vector<double> vals(f.samples().begin(), f.samples().end());
  if (n >= 3) {
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs;
    for (int j = 1; j <= 3; ++j) {
      std::size_t idx = side == Side::left ? std::size_t(j) : n - std::size_t(j);
      double u = std::abs(g[idx] - g[singular]);
      m.row(j - 1) << std::pow(u, a), u, std::pow(u, 1.0 + a);
      rhs(j - 1) = f[idx] - f[singular];
    }
    c_sing = m.colPivHouseholderQr().solve(rhs)(0);
    if (!std::isfinite(c_sing)) c_sing = 0.0;
    for (std::size_t k = 0; k <= n; ++k) vals[k] -= c_sing * std::pow(std::abs(g[k] - g[singular]), a);
  }
  const GridFunction fr(g, std::move(vals));
  const double sing_part = c_sing * gamma_fn(1.0 + a);
  std::vector<double> out(g.size(), 0.0);
  const Powers pneg(g, -a), ppos(g, 1.0 - a);
  core::parallel_for(g.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      if (k == singular) continue;
      const double fx = fr[k];
      const double dist = side == Side::left ? g[k] - g[0] : g[n] - g[k];
      double acc = fx / std::pow(dist, a);
      for_each_cell(fr, k, side, [&](const Cell& c) {
        double slope = (c.far_value - c.near_value) / (c.far_dist - c.near_dist);
        // f(x) - f(y) = cst - slope * u on this cell.
        double cst = fx - c.near_value + slope * c.near_dist;
        if (c.near_steps > 0 || c.near_dist > 0.0) {
          acc += cst * (pneg(c.near_dist, c.near_steps) - pneg(c.far_dist, c.near_steps + 1));
        }
        acc -= a * slope * (ppos(c.far_dist, c.near_steps + 1) - ppos(c.near_dist, c.near_steps)) / (1.0 - a);
      });
      out[k] = acc * inv_gamma + sing_part;
    }
  });
  fill_singular_endpoint(out, g, singular);
  return GridFunction(g, std::move(out)).with_singular_point(singular);
}

}  // namespace fracnelson::frac
