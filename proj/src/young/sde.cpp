#include "fracnelson/young/sde.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/parallel.h"
#include "fracnelson/young/young.h"

namespace fracnelson::young {

namespace {

using FlowState = std::array<double, 2>;

void require_path(std::span<const double> b_path, const TimeGrid& grid) {
  if (b_path.size() != grid.size()) throw std::invalid_argument("driver path length does not match the grid");
}

}  // namespace

FlowValue flow(const CoefficientSet& c, double x1, double x2) {
  if (x2 == 0.0 || c.sigma_sup == 0.0) return {x1, 0.0};
  namespace ode = boost::numeric::odeint;
  FlowState state{x1, 0.0};
  auto rhs = [&c](const FlowState& y, FlowState& dy, double) {
    dy[0] = c.sigma(y[0]);
    dy[1] = c.sigma_prime(y[0]);
  };
  auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_fehlberg78<FlowState>());
  double dt = x2 > 0.0 ? std::min(0.5, x2) : std::max(-0.5, x2);
  ode::integrate_adaptive(stepper, rhs, state, 0.0, x2, dt);
  if (!std::isfinite(state[0]) || !std::isfinite(state[1])) {
    throw SolverError("flow ODE diverged from x1 = " + std::to_string(x1), 0, x2);
  }
  return {state[0], state[1]};
}

SolutionPath doss_sussmann_solve(const CoefficientSet& c, std::span<const double> b_path, const TimeGrid& grid) {
  require_path(b_path, grid);
  SolutionPath sol{grid, std::vector<double>(grid.size()), std::vector<double>(b_path.begin(), b_path.end()),
                   std::vector<double>(grid.size()), 0, Scheme::doss_sussmann};
  const std::size_t n = grid.steps();
  auto& a = sol.a;
  a[0] = c.x0;
  // A' = exp(-log dphi/dx1) b(phi(A, B)); with b = 0, A stays at x0.
  auto rate = [&](double av, double bv, FlowValue* out) {
    FlowValue fv = flow(c, av, bv);
    ++sol.flow_evaluations;
    if (out) *out = fv;
    return std::exp(-fv.log_dx1) * c.b(fv.phi);
  };
  if (b_path[0] != 0.0) {
    // phi(A_0, B_0) = x0 requires A_0 = phi(x0, -B_0).
    a[0] = flow(c, c.x0, -b_path[0]).phi;
  }
  const bool no_drift = c.b_sup == 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    FlowValue here{};
    double h = grid.step(k);
    double b0 = b_path[k], b1 = b_path[k + 1], bm = 0.5 * (b0 + b1);
    if (no_drift) {
      here = flow(c, a[k], b0);
      ++sol.flow_evaluations;
      a[k + 1] = a[k];
    } else {
      double k1 = rate(a[k], b0, &here);
      double k2 = rate(a[k] + 0.5 * h * k1, bm, nullptr);
      double k3 = rate(a[k] + 0.5 * h * k2, bm, nullptr);
      double k4 = rate(a[k] + h * k3, b1, nullptr);
      a[k + 1] = a[k] + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
      if (!std::isfinite(a[k + 1])) throw SolverError("Doss-Sussmann A equation diverged", k, grid[k]);
    }
    sol.x[k] = here.phi;
  }
  sol.x[n] = flow(c, a[n], b_path[n]).phi;
  ++sol.flow_evaluations;
  sol.x[0] = c.x0;
  return sol;
}

SolutionPath euler_young_solve(const CoefficientSet& c, std::span<const double> b_path, const TimeGrid& grid) {
  require_path(b_path, grid);
  SolutionPath sol{grid, std::vector<double>(grid.size()), std::vector<double>(b_path.begin(), b_path.end()), {}, 0,
                   Scheme::euler};
  sol.x[0] = c.x0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    double x = sol.x[k];
    double next = x + c.sigma(x) * (b_path[k + 1] - b_path[k]) + c.b(x) * grid.step(k);
    if (!(std::abs(next) <= 1e12)) throw SolverError("Euler scheme left |X| <= 1e12", k + 1, grid[k + 1]);
    sol.x[k + 1] = next;
  }
  return sol;
}

core::PathEnsemble solve_ensemble(const CoefficientSet& c, const core::PathEnsemble& driver, Scheme scheme) {
  const auto& grid = driver.grid();
  const std::size_t m = driver.n_paths(), np = grid.size();
  std::vector<double> values(m * np);
  core::parallel_for(m, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SolutionPath sol = scheme == Scheme::doss_sussmann ? doss_sussmann_solve(c, driver.path(i), grid)
                                                         : euler_young_solve(c, driver.path(i), grid);
      std::copy(sol.x.begin(), sol.x.end(), values.begin() + static_cast<std::ptrdiff_t>(i * np));
    }
  });
  std::optional<std::vector<double>> drv;
  if (driver.has_driver()) drv.emplace(driver.driver_values().begin(), driver.driver_values().end());
  return core::PathEnsemble(grid, m, std::move(values), std::move(drv),
                            "sde:" + c.name + "|" + driver.label());
}

GridFunction young_residual(const CoefficientSet& c, const SolutionPath& sol) {
  const auto& grid = sol.grid;
  std::vector<double> sig(grid.size()), drift(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    sig[k] = c.sigma(sol.x[k]);
    drift[k] = c.b(sol.x[k]);
  }
  GridFunction stoch = young_riemann(GridFunction(grid, sig), sol.driver_function(), RiemannRule::left);
  std::vector<double> r(grid.size(), 0.0);
  double det = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    det += 0.5 * (drift[k - 1] + drift[k]) * grid.step(k - 1);
    r[k] = sol.x[k] - c.x0 - stoch[k] - det;
  }
  return GridFunction(grid, std::move(r));
}

namespace {

// Running exponent C_k = int_0^{t_k} b'(X) du + int_0^{t_k} sigma'(X) dB, trapezoid rule.
std::vector<double> malliavin_exponent(const CoefficientSet& c, const SolutionPath& sol, std::size_t upto) {
  std::vector<double> e(upto + 1, 0.0);
  for (std::size_t k = 0; k < upto; ++k) {
    double x0 = sol.x[k], x1 = sol.x[k + 1];
    e[k + 1] = e[k] + 0.5 * (c.b_prime(x0) + c.b_prime(x1)) * sol.grid.step(k) +
               0.5 * (c.sigma_prime(x0) + c.sigma_prime(x1)) * (sol.driver[k + 1] - sol.driver[k]);
  }
  return e;
}

}  // namespace

double malliavin_derivative_X(const CoefficientSet& c, const SolutionPath& sol, double s, double t) {
  std::size_t is = sol.grid.require_index(s), it = sol.grid.require_index(t);
  if (is > it) return 0.0;
  std::vector<double> e = malliavin_exponent(c, sol, it);
  return c.sigma(sol.x[is]) * std::exp(e[it] - e[is]);
}

GridFunction malliavin_row(const CoefficientSet& c, const SolutionPath& sol, double t) {
  std::size_t it = sol.grid.require_index(t);
  std::vector<double> e = malliavin_exponent(c, sol, it);
  std::vector<double> row(sol.grid.size(), 0.0);
  for (std::size_t s = 0; s <= it; ++s) row[s] = c.sigma(sol.x[s]) * std::exp(e[it] - e[s]);
  return GridFunction(sol.grid, std::move(row));
}

double variation_statistic(const GridFunction& u, const GridFunction& b, double hurst, std::size_t n) {
  const auto& grid = b.grid();
  if (n == 0 || grid.steps() % n != 0 || !grid.is_uniform()) {
    throw std::invalid_argument("the partition must be a uniform coarsening of the driver grid");
  }
  const std::size_t stride = grid.steps() / n;
  const double p = 1.0 / hurst;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double uk = u(grid[k * stride]);
    if (uk == 0.0) continue;
    total += std::pow(std::abs(uk), p) * std::pow(std::abs(b[(k + 1) * stride] - b[k * stride]), p);
  }
  return total;
}

}  // namespace fracnelson::young
