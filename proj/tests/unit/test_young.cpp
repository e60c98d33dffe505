#include <cmath>

#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/sampling.h"
#include "fracnelson/young/coefficients.h"
#include "fracnelson/young/holder.h"
#include "fracnelson/young/sde.h"
#include "fracnelson/young/young.h"

using namespace fracnelson;
using core::HurstIndex;
using core::TimeGrid;
using frac::GridFunction;
using young::HolderExponent;

namespace {

std::vector<double> fbm_path(double H, const TimeGrid& grid, std::uint64_t run = 0, std::size_t path = 0) {
  auto e = core::circulant_sample(HurstIndex(H), grid, path + 1, {}, run);
  return {e.path(path).begin(), e.path(path).end()};
}

std::vector<double> every(const std::vector<double>& v, std::size_t stride) {
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); k += stride) out.push_back(v[k]);
  return out;
}

}  // namespace

TEST(Coefficients, PresetsAndEllipticity) {
  EXPECT_TRUE(young::preset("sine", 0.0).elliptic);
  EXPECT_TRUE(young::preset("constant", 0.0).elliptic);
  EXPECT_FALSE(young::preset("linear", 1.0).elliptic);
  EXPECT_FALSE(young::preset("vanishing:0.5", 0.0).elliptic);
  EXPECT_EQ(young::preset("proportional:0.25", 0.0).proportional_ratio.value_or(-1), 0.25);
  EXPECT_THROW(young::preset("no-such-preset", 0.0), std::invalid_argument);
  EXPECT_THROW(young::preset("proportional:abc", 0.0), std::invalid_argument);
}

TEST(Coefficients, MismatchedDerivativeIsRejected) {
  auto c = young::preset("sine", 0.0);
  c.sigma_prime = [](double x) { return std::cos(x) + 1e-3; };
  EXPECT_THROW(young::validate(c), std::invalid_argument);
  auto d = young::preset("sine", 0.0);
  d.b = nullptr;
  EXPECT_THROW(young::validate(d), std::invalid_argument);
}

TEST(Holder, SimpleFunctions) {
  auto grid = TimeGrid::uniform(1.0, 256);
  auto one = GridFunction::sample(grid, [](double) { return 3.0; });
  auto id = GridFunction::sample(grid, [](double x) { return x; });
  EXPECT_EQ(young::holder_norm(one, HolderExponent(0.5)), 0.0);
  EXPECT_NEAR(young::holder_norm(id, HolderExponent(1.0)), 1.0, 1e-12);
  EXPECT_NEAR(young::holder_norm(id, HolderExponent(0.5)), 1.0, 1e-12);
  EXPECT_THROW(HolderExponent(0.0), std::invalid_argument);
  EXPECT_THROW(HolderExponent(1.2), std::invalid_argument);
}

TEST(Holder, FbmNormGrowsOnlyAboveItsExponent) {
  const double H = 0.7;
  auto fine = TimeGrid::uniform(1.0, 4096);
  auto b = fbm_path(H, fine, 7);
  auto at = [&](std::size_t stride, double mu) {
    GridFunction f(fine.coarsen(stride), every(b, stride));
    return young::holder_norm(f, HolderExponent(mu));
  };
  double above = at(1, 0.75) / at(64, 0.75);
  double below = at(1, 0.65) / at(64, 0.65);
  EXPECT_GT(above, 1.0);
  EXPECT_GT(above, below);
  EXPECT_TRUE(std::isfinite(at(1, 0.65)));
  GridFunction f(fine, b);
  EXPECT_LE(young::holder_norm(f, HolderExponent(0.65), young::HolderMode::dyadic),
            young::holder_norm(f, HolderExponent(0.65)) * (1 + 1e-12));
}

TEST(YoungRiemann, ExactIdentities) {
  auto grid = TimeGrid::uniform(1.0, 512);
  auto b = fbm_path(0.7, grid);
  GridFunction x(grid, b);
  auto one = GridFunction::sample(grid, [](double) { return 1.0; });
  auto s = young::young_riemann(one, x);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(s[k], b[k] - b[0], 1e-12);
  // sum B_k dB_k = (B_T^2 - sum dB^2) / 2 and the trapezoid sum is B_T^2 / 2.
  double qv = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) qv += std::pow(b[k + 1] - b[k], 2);
  double bt = b.back();
  EXPECT_NEAR(young::young_riemann(x, x)[grid.steps()], 0.5 * (bt * bt - qv), 1e-12);
  EXPECT_NEAR(young::young_riemann(x, x, young::RiemannRule::trapezoid)[grid.steps()], 0.5 * bt * bt, 1e-12);
}

TEST(YoungRiemann, LeftSumErrorShrinksUnderRefinement) {
  const double H = 0.75;
  auto fine = TimeGrid::uniform(1.0, 4096);
  auto b = fbm_path(H, fine, 3);
  double target = 0.5 * b.back() * b.back();
  double prev = INFINITY;
  for (std::size_t stride : {64, 16, 4, 1}) {
    GridFunction x(fine.coarsen(stride), every(b, stride));
    double err = std::abs(young::young_riemann(x, x)[x.size() - 1] - target);
    std::size_t n = 4096 / stride;
    EXPECT_LE(err, 5.0 * std::pow(double(n), 1 - 2 * H)) << "n " << n;
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(YoungRiemann, AgainstOrdinaryIntegral) {
  auto grid = TimeGrid::uniform(1.0, 1000);
  auto f = GridFunction::sample(grid, [](double x) { return std::exp(x); });
  auto id = GridFunction::sample(grid, [](double x) { return x; });
  EXPECT_NEAR(young::young_riemann(f, id, young::RiemannRule::trapezoid)[grid.steps()], std::exp(1.0) - 1.0, 1e-6);
}

TEST(YoungFractional, DeterministicIntegrands) {
  auto grid = TimeGrid::uniform(1.0, 4096);
  auto x = GridFunction::sample(grid, [](double t) { return t; });
  auto x2 = GridFunction::sample(grid, [](double t) { return t * t; });
  auto one = GridFunction::sample(grid, [](double) { return 1.0; });
  EXPECT_NEAR(young::young_fractional(x, x2, 0.5), 2.0 / 3.0, 1e-5);
  EXPECT_NEAR(young::young_fractional(one, x2, 0.5), 1.0, 1e-5);
}

TEST(YoungFractional, AgreesWithRiemannSumOnFbm) {
  // Independent paths: the left sum and the integral of the interpolants differ by
  // sum df dg / 2, which averages out.
  const double H = 0.75;
  auto grid = TimeGrid::uniform(1.0, 4096);
  auto e = core::circulant_sample(HurstIndex(H), grid, 2, {}, 11);
  GridFunction f(grid, std::vector<double>(e.path(0).begin(), e.path(0).end()));
  GridFunction g(grid, std::vector<double>(e.path(1).begin(), e.path(1).end()));
  double left = young::young_riemann(f, g)[grid.steps()];
  double fr = young::young_fractional(f, g, 0.5, HolderExponent(0.7), HolderExponent(0.7));
  EXPECT_NEAR(fr, left, 1e-2 * std::abs(left));
  // f = g: the integral of the interpolants is the trapezoid sum B_T^2 / 2.
  double tr = young::young_riemann(f, f, young::RiemannRule::trapezoid)[grid.steps()];
  EXPECT_NEAR(young::young_fractional(f, f, 0.5), tr, 1e-3 * std::abs(tr));
}

TEST(YoungFractional, AdmissibleInterval) {
  auto g = young::admissible_gamma(HolderExponent(0.65), HolderExponent(0.65));
  EXPECT_NEAR(g.lo, 0.35, 1e-15);
  EXPECT_NEAR(g.hi, 0.65, 1e-15);
  EXPECT_THROW(young::admissible_gamma(HolderExponent(0.3), HolderExponent(0.3)), std::invalid_argument);
  auto grid = TimeGrid::uniform(1.0, 64);
  auto x = GridFunction::sample(grid, [](double t) { return t; });
  EXPECT_THROW(young::young_fractional(x, x, 0.9, HolderExponent(0.65), HolderExponent(0.65)), std::invalid_argument);
}

TEST(YoungBound, ConstantIntegrandAndSmoothPair) {
  auto grid = TimeGrid::uniform(1.0, 1024);
  std::vector<std::pair<double, double>> pairs{{0.0, 1.0}, {0.25, 0.5}, {0.5, 0.75}, {0.125, 0.875}};
  auto c = GridFunction::sample(grid, [](double) { return 2.0; });
  auto id = GridFunction::sample(grid, [](double t) { return t; });
  EXPECT_EQ(young::young_bound_check(c, id, HolderExponent(1.0), HolderExponent(1.0), pairs).kappa, 0.0);
  auto s = GridFunction::sample(grid, [](double t) { return std::sin(6.0 * t); });
  auto r = young::young_bound_check(s, id, HolderExponent(1.0), HolderExponent(1.0), pairs);
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.kappa, 0.5 + 1e-9);
}

TEST(YoungBound, FbmPairIsStable) {
  auto grid = TimeGrid::uniform(1.0, 2048);
  GridFunction b(grid, fbm_path(0.7, grid, 5));
  std::vector<std::pair<double, double>> pairs{{0.0, 1.0}, {0.25, 0.5}, {0.5, 0.75}, {0.125, 0.875}, {0.5, 1.0}};
  auto r = young::young_bound_check(b, b, HolderExponent(0.65), HolderExponent(0.65), pairs);
  EXPECT_TRUE(r.finite);
  EXPECT_TRUE(r.stable) << "levels " << r.kappa_by_level.size();
}

TEST(Flow, LinearSigma) {
  auto c = young::preset("linear", 1.0);
  auto f = young::flow(c, 1.5, 0.7);
  EXPECT_NEAR(f.phi, 1.5 * std::exp(0.7), 1e-10);
  EXPECT_NEAR(f.log_dx1, 0.7, 1e-10);
  auto g = young::flow(c, 1.5, -0.4);
  EXPECT_NEAR(g.phi, 1.5 * std::exp(-0.4), 1e-10);
}

TEST(DossSussmann, UnitSigmaIsShiftedDriver) {
  auto grid = TimeGrid::uniform(1.0, 256);
  auto b = fbm_path(0.7, grid);
  auto sol = young::doss_sussmann_solve(young::preset("constant", 0.3), b, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(sol.x[k], 0.3 + b[k], 1e-12);
  auto eu = young::euler_young_solve(young::preset("constant", 0.3), b, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(eu.x[k], 0.3 + b[k], 1e-12);
}

TEST(DossSussmann, ZeroCoefficientsStayPut) {
  auto grid = TimeGrid::uniform(1.0, 64);
  auto b = fbm_path(0.7, grid);
  for (auto scheme : {young::Scheme::doss_sussmann, young::Scheme::euler}) {
    auto c = young::preset("zero", 0.4);
    auto sol = scheme == young::Scheme::euler ? young::euler_young_solve(c, b, grid) : young::doss_sussmann_solve(c, b, grid);
    for (double v : sol.x) EXPECT_EQ(v, 0.4);
  }
}

TEST(DossSussmann, LinearSigmaIsExponential) {
  auto grid = TimeGrid::uniform(1.0, 1024);
  auto b = fbm_path(0.7, grid, 2);
  auto sol = young::doss_sussmann_solve(young::preset("linear", 1.0), b, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(sol.x[k], std::exp(b[k]), 1e-6 * std::exp(b[k]));
}

TEST(DossSussmann, NoNoiseMatchesLogisticOde) {
  auto grid = TimeGrid::uniform(1.0, 1024);
  auto b = fbm_path(0.7, grid);
  const double x0 = 0.2;
  auto sol = young::doss_sussmann_solve(young::preset("logistic", x0), b, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double e = std::exp(grid[k]);
    EXPECT_NEAR(sol.x[k], x0 * e / (1 - x0 + x0 * e), 1e-8);
  }
}

TEST(DossSussmann, ProportionalClosedForm) {
  // b = r sigma gives X_t = f(B_t + r t) with f' = sigma(f), f(0) = x0.
  const double r = 0.5, x0 = 0.2;
  auto c = young::preset("proportional:0.5", x0);
  auto grid = TimeGrid::uniform(1.0, 512);
  auto b = fbm_path(0.7, grid, 4);
  auto sol = young::doss_sussmann_solve(c, b, grid);
  namespace ode = boost::numeric::odeint;
  for (std::size_t k = 0; k < grid.size(); k += 16) {
    double y = b[k] + r * grid[k];
    std::array<double, 1> state{x0};
    auto rhs = [](const std::array<double, 1>& s, std::array<double, 1>& d, double) { d[0] = 2.0 + std::sin(s[0]); };
    if (y != 0.0) {
      ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<std::array<double, 1>>()),
                              rhs, state, 0.0, y, y / 16);
    }
    EXPECT_NEAR(sol.x[k], state[0], 1e-6) << "t " << grid[k];
  }
}

TEST(DossSussmann, ResidualShrinksUnderRefinement) {
  auto fine = TimeGrid::uniform(1.0, 4096);
  auto b = fbm_path(0.7, fine, 21);
  auto c = young::preset("sine", 0.3);
  double prev = INFINITY;
  for (std::size_t stride : {8, 4, 2, 1}) {
    auto g = fine.coarsen(stride);
    auto sol = young::doss_sussmann_solve(c, every(b, stride), g);
    auto res = young::young_residual(c, sol);
    double m = 0.0;
    for (double v : res.samples()) m = std::max(m, std::abs(v));
    EXPECT_LT(m, prev) << "stride " << stride;
    prev = m;
  }
}

TEST(Euler, ConvergesToDossSussmann) {
  auto fine = TimeGrid::uniform(1.0, 4096);
  auto c = young::preset("sine", 0.3);
  std::vector<double> err(4, 0.0);
  const std::vector<std::size_t> strides{16, 8, 4, 2};
  for (std::size_t p = 0; p < 4; ++p) {
    auto b = fbm_path(0.7, fine, 30, p);
    double ref = young::doss_sussmann_solve(c, b, fine).x.back();
    for (std::size_t i = 0; i < strides.size(); ++i) {
      auto eu = young::euler_young_solve(c, every(b, strides[i]), fine.coarsen(strides[i]));
      err[i] += std::abs(eu.x.back() - ref);
    }
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
}

TEST(Euler, BlowUpIsReported) {
  young::CoefficientSet c;
  c.sigma = [](double) { return 0.0; };
  c.sigma_prime = c.sigma;
  c.sigma_second = c.sigma;
  c.b = [](double x) { return x * x; };
  c.b_prime = [](double x) { return 2 * x; };
  c.x0 = 1.0;
  auto grid = TimeGrid::uniform(3.0, 3000);
  std::vector<double> b(grid.size(), 0.0);
  EXPECT_THROW(young::euler_young_solve(c, b, grid), SolverError);
}

TEST(Malliavin, UnitSigmaIsIndicator) {
  auto grid = TimeGrid::uniform(1.0, 128);
  auto c = young::preset("constant", 0.0);
  auto sol = young::doss_sussmann_solve(c, fbm_path(0.7, grid), grid);
  auto row = young::malliavin_row(c, sol, 0.5);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(row[k], grid[k] <= 0.5 + 1e-12 ? 1.0 : 0.0) << k;
  EXPECT_EQ(young::malliavin_derivative_X(c, sol, 0.75, 0.5), 0.0);
}

TEST(Malliavin, LinearSigmaEqualsSolution) {
  // sigma(x) = x: D_s X_t = X_s exp(B_t - B_s) = X_t for every s <= t.
  auto grid = TimeGrid::uniform(1.0, 512);
  auto c = young::preset("linear", 1.0);
  auto sol = young::doss_sussmann_solve(c, fbm_path(0.7, grid, 9), grid);
  const double t = 0.75;
  double xt = sol.x[grid.require_index(t)];
  auto row = young::malliavin_row(c, sol, t);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= t) {
      EXPECT_NEAR(row[k], xt, 1e-5 * xt);
    } else {
      EXPECT_EQ(row[k], 0.0);
    }
  }
  EXPECT_NEAR(young::malliavin_derivative_X(c, sol, 0.25, t), xt, 1e-5 * xt);
}

TEST(Variation, ZeroIntegrandAndBrownianQuadraticVariation) {
  const std::size_t n = 4096;
  auto grid = TimeGrid::uniform(1.0, n);
  GridFunction b(grid, fbm_path(0.5, grid, 13));
  auto zero = GridFunction::zero(grid);
  auto one = GridFunction::sample(grid, [](double) { return 1.0; });
  EXPECT_EQ(young::variation_statistic(zero, b, 0.5, n), 0.0);
  EXPECT_NEAR(young::variation_statistic(one, b, 0.5, n), 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_THROW(young::variation_statistic(one, b, 0.5, 3000), std::invalid_argument);
}
