#include "fracnelson/young/young.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "fracnelson/frac/fractional.h"
#include "fracnelson/frac/special.h"

namespace fracnelson::young {

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("integrand and integrator must share a grid");
}

GridFunction restrict_to(const GridFunction& f, std::size_t stride) {
  core::TimeGrid coarse = f.grid().coarsen(stride);
  std::vector<double> v;
  for (std::size_t k = 0; k < f.size(); k += stride) v.push_back(f[k]);
  return GridFunction(coarse, std::move(v));
}

}  // namespace

GridFunction young_riemann(const GridFunction& z, const GridFunction& x, RiemannRule rule) {
  require_same_grid(z, x);
  std::vector<double> out(z.size(), 0.0);
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    double zk = rule == RiemannRule::left ? z[k] : 0.5 * (z[k] + z[k + 1]);
    out[k + 1] = out[k] + zk * (x[k + 1] - x[k]);
  }
  return GridFunction(z.grid(), std::move(out));
}

GammaInterval admissible_gamma(HolderExponent alpha, HolderExponent beta) {
  GammaInterval iv{1.0 - beta.value(), alpha.value()};
  if (!(iv.lo < iv.hi)) {
    std::ostringstream os;
    os << "no admissible fractional order: need 1 - beta < gamma < alpha but alpha = " << alpha.value()
       << ", beta = " << beta.value() << "; refine the Hölder exponent certificates";
    throw std::invalid_argument(os.str());
  }
  return iv;
}

double young_fractional(const GridFunction& f, const GridFunction& g, double gamma) {
  require_same_grid(f, g);
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("fractional order must lie in (0, 1)");
  const auto& grid = f.grid();
  const std::size_t n = grid.steps();
  // Inside cell k, D^gamma f = R_f + A_k (x - t_k)^{1-gamma} and D^{1-gamma} g_{T-} =
  // R_g + B_k (t_{k+1} - x)^gamma, where A_k and B_k come from the slope changes of the
  // interpolants at t_k and t_{k+1} and R_f, R_g are smooth in the cell. The derivatives
  // are sampled at nodes and midpoints, the remainders interpolated quadratically and
  // every product integrated exactly against its power weight.
  std::vector<double> fine_t(2 * n + 1), fine_f(2 * n + 1), fine_g(2 * n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    fine_t[2 * k] = grid[k];
    fine_f[2 * k] = f[k];
    fine_g[2 * k] = g[k] - g[n];
    if (k < n) {
      fine_t[2 * k + 1] = 0.5 * (grid[k] + grid[k + 1]);
      fine_f[2 * k + 1] = 0.5 * (f[k] + f[k + 1]);
      fine_g[2 * k + 1] = 0.5 * (g[k] + g[k + 1]) - g[n];
    }
  }
  core::TimeGrid fine(fine_t);
  GridFunction df = frac::rl_derivative(GridFunction(fine, fine_f), frac::FracOrder(gamma));
  GridFunction dg = frac::rl_derivative(GridFunction(fine, fine_g), frac::FracOrder(1.0 - gamma), frac::Side::right);

  const double p = 1.0 - gamma;
  const double ga = frac::gamma_fn(2.0 - gamma), gb = frac::gamma_fn(1.0 + gamma);
  const double beta_ab = frac::beta_fn(2.0 - gamma, 1.0 + gamma), beta_lead = frac::beta_fn(1.0 - gamma, 1.0 + gamma);
  // f(0) x^{-gamma} / Gamma(1 - gamma) is kept out of R_f and integrated on its own.
  const double lead = f[0] / frac::gamma_fn(1.0 - gamma);
  auto slope = [&](const GridFunction& u, std::size_t j) { return j < n ? (u[j + 1] - u[j]) / grid.step(j) : 0.0; };
  const frac::GaussRule gl = frac::gauss_legendre(8);

  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = 2 * k;
    const double a = fine[i], b = fine[i + 2], h = b - a;
    const double ak = (slope(f, k) - (k > 0 ? slope(f, k - 1) : 0.0)) / ga;
    const double bk = (slope(g, k + 1) - slope(g, k)) / gb;
    double rf[3], rg[3];
    for (int j = 0; j < 3; ++j) {
      double u = 0.5 * h * j, x = a + u;
      rf[j] = df[i + j] - ak * std::pow(u, p) - (x > 0.0 ? lead * std::pow(x, -gamma) : 0.0);
      rg[j] = dg[i + j] - bk * std::pow(h - u, gamma);
    }
    // The samples at the singular endpoints are not values of the operators.
    if (k == 0) rf[0] = 2.0 * rf[1] - rf[2];
    if (k + 1 == n) rg[2] = 2.0 * rg[1] - rg[0];
    // Quadratics in u = x - t_k through the three samples.
    auto quad = [h](const double* y, double* c) {
      c[2] = 2.0 * (y[0] - 2.0 * y[1] + y[2]) / (h * h);
      c[1] = (y[2] - y[0]) / h - c[2] * h;
      c[0] = y[0];
    };
    double cf[3], cg[3];
    quad(rf, cf);
    quad(rg, cg);
    double cell = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) cell += cf[r] * cg[s] * std::pow(h, r + s + 1) / (r + s + 1);
    // int_0^h u^p u^j du and int_0^h (h - u)^gamma u^j du.
    for (int j = 0; j < 3; ++j) {
      cell += ak * cg[j] * std::pow(h, p + j + 1) / (p + j + 1);
      cell += bk * cf[j] * std::pow(h, gamma + j + 1) * frac::beta_fn(j + 1.0, gamma + 1.0);
    }
    cell += ak * bk * h * h * beta_ab;
    if (lead != 0.0) {
      if (k == 0) {
        for (int j = 0; j < 3; ++j) cell += lead * cg[j] * std::pow(h, p + j) / (p + j);
        cell += lead * bk * h * beta_lead;
      } else {
        double acc = 0.0;
        for (int q = 0; q < gl.order; ++q) {
          double u = 0.5 * h * (gl.nodes[q] + 1.0);
          acc += gl.weights[q] * std::pow(a + u, -gamma) * (cg[0] + u * (cg[1] + u * cg[2]));
        }
        cell += lead * 0.5 * h * acc;
        // int_a^b x^{-gamma} (b - x)^gamma dx = b B(1 - gamma, 1 + gamma) (1 - I_{a/b}).
        cell += lead * bk * b * beta_lead * boost::math::ibetac(1.0 - gamma, 1.0 + gamma, a / b);
      }
    }
    total += cell;
  }
  return -total;
}

double young_fractional(const GridFunction& f, const GridFunction& g, double gamma, HolderExponent alpha,
                        HolderExponent beta) {
  GammaInterval iv = admissible_gamma(alpha, beta);
  if (!(gamma > iv.lo && gamma < iv.hi)) {
    std::ostringstream os;
    os << "gamma = " << gamma << " outside the admissible interval (" << iv.lo << ", " << iv.hi << ")";
    throw std::invalid_argument(os.str());
  }
  return young_fractional(f, g, gamma);
}

YoungBoundReport young_bound_check(const GridFunction& f, const GridFunction& g, HolderExponent alpha,
                                   HolderExponent beta, const std::vector<std::pair<double, double>>& pairs,
                                   std::size_t levels, double stability_tolerance) {
  require_same_grid(f, g);
  if (!(alpha.value() + beta.value() > 1.0)) throw std::invalid_argument("young_bound_check needs alpha + beta > 1");
  if (levels == 0) throw std::invalid_argument("young_bound_check needs at least one level");
  YoungBoundReport report;
  report.finite = true;
  for (std::size_t level = 0; level < levels; ++level) {
    std::size_t stride = std::size_t{1} << level;
    GridFunction fc = restrict_to(f, stride), gc = restrict_to(g, stride);
    const auto& grid = fc.grid();
    double nf = holder_norm(fc, alpha), ng = holder_norm(gc, beta);
    double kappa = 0.0;
    for (auto [s, t] : pairs) {
      std::size_t i = grid.require_index(s), j = grid.require_index(t);
      if (i > j) std::swap(i, j);
      if (i == j) continue;
      double integral = 0.0;
      for (std::size_t k = i; k < j; ++k) integral += (fc[k] - fc[i]) * (gc[k + 1] - gc[k]);
      if (integral == 0.0) continue;
      double ratio = std::abs(integral) / (nf * ng * std::pow(grid[j] - grid[i], alpha.value() + beta.value()));
      kappa = std::max(kappa, ratio);
    }
    if (!std::isfinite(kappa)) report.finite = false;
    report.kappa_by_level.push_back(kappa);
  }
  report.kappa = report.kappa_by_level.front();
  auto [lo, hi] = std::minmax_element(report.kappa_by_level.begin(), report.kappa_by_level.end());
  report.stable = report.finite && (*hi == 0.0 || (*hi - *lo) / *hi <= stability_tolerance);
  return report;
}

}  // namespace fracnelson::young
