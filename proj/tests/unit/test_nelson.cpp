#include <cmath>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "fracnelson/core/sampling.h"
#include "fracnelson/frac/special.h"
#include "fracnelson/nelson/estimator.h"
#include "fracnelson/nelson/fractional_sde.h"
#include "fracnelson/nelson/gaussian.h"
#include "fracnelson/nelson/process.h"
#include "fracnelson/nelson/volterra.h"
#include "fracnelson/nelson/wiener.h"
#include "fracnelson/young/sde.h"

using namespace fracnelson;
using namespace fracnelson::nelson;
using core::HurstIndex;
using core::TimeGrid;

// --- exact Gaussian algebra -------------------------------------------------

TEST(GaussianIncrement, BrownianForwardIsUnpredictable) {
  std::vector<double> cond{1.0};
  auto r = gaussian_conditional_increment(HurstIndex(0.5), 1.0, 0.01, Direction::forward, cond);
  ASSERT_EQ(r.coefficients.size(), 1u);
  EXPECT_NEAR(r.coefficients[0], 0.0, 1e-12);
  EXPECT_NEAR(r.variance, 0.0, 1e-12);
}

TEST(GaussianIncrement, PresentCoefficientFrozenValue) {
  std::vector<double> cond{1.0};
  auto r = gaussian_conditional_increment(HurstIndex(0.7), 1.0, 0.01, Direction::forward, cond);
  double closed = (std::pow(1.01, 1.4) - 1.0 - std::pow(0.01, 1.4)) / (2 * 0.01);
  EXPECT_NEAR(r.coefficients[0], closed, 1e-12);
  EXPECT_NEAR(r.coefficients[0], 0.6222, 5e-5);
  // Tends to H as h decreases, monotonically on this ladder.
  double prev = 0.0;
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    double c = gaussian_conditional_increment(HurstIndex(0.7), 1.0, h, Direction::forward, cond).coefficients[0];
    EXPECT_GT(c, prev);
    prev = c;
  }
  // coefficient = H + O(h) - h^{2H-1} / 2
  EXPECT_NEAR(prev, 0.7, std::pow(1e-5, 0.4));
}

TEST(GaussianIncrement, BrownianBackwardVarianceIsInverseTime) {
  for (double t : {0.5, 1.0, 2.0}) {
    for (double h : {0.1, 0.01}) {
      std::vector<double> cond{t, t + h};
      auto r = gaussian_conditional_increment(HurstIndex(0.5), t, h, Direction::backward, cond);
      EXPECT_NEAR(r.variance, 1.0 / t, 1e-9) << t << ' ' << h;
    }
  }
}

TEST(GaussianIncrement, DuplicateTimesAreSingular) {
  std::vector<double> cond{1.0, 1.0};
  EXPECT_THROW(gaussian_conditional_increment(HurstIndex(0.7), 1.0, 0.01, Direction::forward, cond),
               std::invalid_argument);
}

TEST(BackwardVariance, BrownianAndFractionalRates) {
  for (double h : {1e-2, 1e-3, 1e-4}) EXPECT_NEAR(backward_variance_exact(HurstIndex(0.5), 1.0, h), 1.0, 1e-8);
  std::vector<double> lx, ly;
  for (int i = 0; i <= 8; ++i) {
    double h = std::pow(10.0, -2.0 - 0.25 * i);
    lx.push_back(std::log(h));
    ly.push_back(std::log(backward_variance_exact(HurstIndex(0.7), 1.0, h)));
  }
  double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, -0.6, 0.1);
  double d3 = backward_determinant(HurstIndex(0.7), 1.0, 1e-3) / std::pow(1e-3, 1.4);
  double d4 = backward_determinant(HurstIndex(0.7), 1.0, 1e-4) / std::pow(1e-4, 1.4);
  EXPECT_GT(d4, 0.0);
  EXPECT_LE(std::abs(d3 / d4 - 1.0), 0.01);
}

TEST(AnalyticPresent, CaseSplit) {
  EXPECT_EQ(analytic_fbm_present(HurstIndex(0.5), 1.0, 0.8, Direction::forward).value(), 0.0);
  EXPECT_NEAR(analytic_fbm_present(HurstIndex(0.5), 2.0, 0.8, Direction::backward).value(), 0.4, 1e-15);
  EXPECT_NEAR(analytic_fbm_present(HurstIndex(0.7), 2.0, 1.0, Direction::forward).value(), 0.35, 1e-15);
  EXPECT_NEAR(analytic_fbm_present(HurstIndex(0.7), 2.0, 1.0, Direction::backward).value(), 0.35, 1e-15);
  EXPECT_FALSE(analytic_fbm_present(HurstIndex(0.3), 1.0, 1.0, Direction::forward).has_value());
  EXPECT_FALSE(analytic_fbm_present(HurstIndex(0.3), 1.0, 1.0, Direction::backward).has_value());
}

TEST(Extrapolation, WeightsRemoveTheCorrection) {
  std::vector<double> steps{0.1, 0.05, 0.025, 0.0125};
  for (double e : {0.4, 1.0}) {
    std::vector<double> ex{e};
    auto w = extrapolation_weights(steps, ex);
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    double v = 0.0;
    for (std::size_t j = 0; j < steps.size(); ++j) v += w[j] * (3.0 - 2.0 * std::pow(steps[j], e));
    EXPECT_NEAR(v, 3.0, 1e-10);
  }
  auto p = polynomial_extrapolation_weights(steps, 2);
  double v = 0.0;
  for (std::size_t j = 0; j < steps.size(); ++j) v += p[j] * (1.0 + steps[j] - 4.0 * steps[j] * steps[j]);
  EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(Types, LadderAndSigmaFields) {
  EXPECT_THROW(HLadder({0.1, 0.1}, Direction::forward), std::invalid_argument);
  EXPECT_THROW(HLadder({0.1, -0.05}, Direction::forward), std::invalid_argument);
  EXPECT_THROW(HLadder({}, Direction::forward), std::invalid_argument);
  EXPECT_EQ(SigmaFieldSpec::present(1.0).times_for(0.1), std::vector<double>{1.0});
  EXPECT_TRUE(SigmaFieldSpec::present(1.0).scalar());
  EXPECT_EQ(SigmaFieldSpec::past_lattice(1.0, 4).times_for(0.1).size(), 4u);
  EXPECT_FALSE(SigmaFieldSpec::past_lattice(1.0, 4).scalar());
  EXPECT_THROW(SigmaFieldSpec::past(1.0, {}), std::invalid_argument);
  EXPECT_THROW(SigmaFieldSpec::past(1.0, {1.2}), std::invalid_argument);
  EXPECT_THROW(SigmaFieldSpec::future(1.0, {0.5}), std::invalid_argument);
}

// --- Monte Carlo estimator ----------------------------------------------------

TEST(Estimator, ExactVersusMonteCarloSlope) {
  const std::size_t m = 100000;
  auto grid = TimeGrid::uniform(1.1, 22);
  const double t = 1.0;
  std::vector<double> cond{t};
  for (double H : {0.6, 0.7, 0.8}) {
    auto e = core::cholesky_sample(HurstIndex(H), grid, m, {}, std::uint64_t(H * 100));
    EstimatorConfig cfg;
    cfg.hurst = H;
    for (double h : {0.1, 0.05}) {
      BinLattice bins;
      auto step = regress_conditional(e, t, h, Direction::forward, SigmaFieldSpec::present(t), bins, cfg);
      double exact = gaussian_conditional_increment(HurstIndex(H), t, h, Direction::forward, cond).coefficients[0];
      EXPECT_NEAR(step.slope, exact, 3.0 * step.slope_se) << "H " << H << " h " << h;
    }
  }
}

TEST(Estimator, BrownianPresentRegressionIsFlat) {
  auto grid = TimeGrid::uniform(1.1, 44);
  auto e = core::cholesky_sample(HurstIndex(0.5), grid, 20000, {}, 5);
  BinLattice bins;
  auto step = regress_conditional(e, 1.0, 0.05, Direction::forward, SigmaFieldSpec::present(1.0), bins);
  int outside = 0, valid = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (!bins.valid[b]) continue;
    ++valid;
    if (std::abs(step.binned.value[b]) > 4.0 * step.binned.se[b] + 1e-12) ++outside;
  }
  EXPECT_GT(valid, 5);
  EXPECT_EQ(outside, 0);
}

TEST(Estimator, DeterministicProcessIsConstantAndDegenerate) {
  auto grid = TimeGrid::uniform(1.1, 44);
  const std::size_t m = 200;
  std::vector<double> v(m * grid.size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < grid.size(); ++k) v[i * grid.size() + k] = grid[k] * grid[k];
  core::PathEnsemble e(grid, m, std::move(v), std::nullopt, "t^2");
  const double t = 1.0, h = 0.05;
  BinLattice bins;
  auto step = regress_conditional(e, t, h, Direction::forward, SigmaFieldSpec::present(t), bins);
  int valid = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (!bins.valid[b]) continue;
    ++valid;
    EXPECT_NEAR(step.binned.value[b], 2 * t + h, 1e-9);
  }
  EXPECT_GE(valid, 1);
  auto rep = estimate_derivative(e, SigmaFieldSpec::present(t), t, HLadder({0.1, 0.05, 0.025}, Direction::forward));
  EXPECT_FALSE(rep.nondegenerate);
  EXPECT_EQ(rep.verdict, Verdict::convergent);
  EXPECT_NEAR(rep.evaluate(1.0), 2.0, 1e-6);
}

TEST(Estimator, FbmPresentIsConvergentAndNondegenerate) {
  const double H = 0.7, t = 1.0;
  auto grid = TimeGrid::uniform(1.1, 44);
  auto e = core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 6);
  EstimatorConfig cfg;
  cfg.hurst = H;
  auto rep = estimate_derivative(e, SigmaFieldSpec::present(t), t, HLadder({0.1, 0.05, 0.025}, Direction::forward), cfg);
  EXPECT_EQ(rep.verdict, Verdict::convergent);
  EXPECT_TRUE(rep.nondegenerate);
  // 5% at M = 1e5, scaled for M = 2e4.
  EXPECT_LE(relative_l2_error(rep, [&](double x) { return H * x / t; }), 0.05 * std::sqrt(5.0));
}

TEST(Estimator, ForwardBackwardSymmetry) {
  const double H = 0.7, t = 1.0;
  auto grid = TimeGrid::uniform(1.1, 44);
  auto e = core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 7);
  EstimatorConfig cfg;
  cfg.hurst = H;
  auto f = estimate_derivative(e, SigmaFieldSpec::present(t), t, HLadder({0.1, 0.05, 0.025}, Direction::forward), cfg);
  auto b = estimate_derivative(e, SigmaFieldSpec::present(t), t, HLadder({0.1, 0.05, 0.025}, Direction::backward), cfg);
  double chi2 = 0.0;
  int nu = 0;
  for (std::size_t k = 0; k < f.bins.size() && k < b.bins.size(); ++k) {
    if (!f.bins.valid[k] || !b.bins.valid[k]) continue;
    double se2 = f.limit.se[k] * f.limit.se[k] + b.limit.se[k] * b.limit.se[k];
    chi2 += std::pow(f.limit.value[k] - b.limit.value[k], 2) / se2;
    ++nu;
  }
  ASSERT_GT(nu, 5);
  EXPECT_LE(chi2 / nu, 1.0 + 3.0 * std::sqrt(2.0 / nu));
}

TEST(Estimator, EvenConditioningNull) {
  const double H = 0.7, t = 1.0;
  auto grid = TimeGrid::uniform(1.1, 44);
  auto e = core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 8);
  EstimatorConfig cfg;
  cfg.hurst = H;
  auto rep = estimate_derivative(e, SigmaFieldSpec::even(t), t, HLadder({0.1, 0.05, 0.025}, Direction::forward), cfg);
  int valid = 0;
  for (std::size_t k = 0; k < rep.bins.size(); ++k) {
    if (!rep.bins.valid[k]) continue;
    ++valid;
    EXPECT_LE(std::abs(rep.limit.value[k]), 3.0 * rep.limit.se[k]) << "bin " << k;
  }
  EXPECT_GT(valid, 5);
  EXPECT_FALSE(rep.nondegenerate);
}

TEST(Estimator, PastConditioningDiverges) {
  const double H = 0.7;
  auto grid = TimeGrid::uniform(1.128, 564);
  auto e = core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 9);
  EstimatorConfig cfg;
  cfg.hurst = H;
  auto rep = estimate_derivative(e, SigmaFieldSpec::past_lattice(1.0, 8), 1.0,
                                 HLadder({0.128, 0.032, 0.008, 0.002}, Direction::forward), cfg);
  EXPECT_EQ(rep.verdict, Verdict::divergent);
}

TEST(Estimator, PastConditioningDivergesForEllipticSde) {
  // At least 9 of 10 anchor times.
  auto p = ProcessSpec::parse("sde:0.6:sine@0.5");
  auto grid = TimeGrid::uniform(1.05, 105);
  auto e = simulate(p, grid, 10000, {});
  EstimatorConfig cfg;
  cfg.hurst = 0.6;
  int divergent = 0;
  for (int i = 0; i < 10; ++i) {
    double t = 0.6 + 0.03 * i;
    auto rep = estimate_derivative(e, SigmaFieldSpec::past_lattice(t, 4), t,
                                   HLadder({0.08, 0.04, 0.02, 0.01}, Direction::forward), cfg);
    divergent += rep.verdict == Verdict::divergent;
  }
  EXPECT_GE(divergent, 9);
}

// --- fractional diffusions ----------------------------------------------------

TEST(FractionalSde, DiscriminatingProbe) {
  // Eq. (22) vanishes on the whole t-lattice iff the solved ensemble is constant.
  const double H = 0.7;
  auto grid = TimeGrid::uniform(1.0, 100);
  auto b = core::cholesky_sample(HurstIndex(H), grid, 200, {}, 12);
  for (double x0 : {0.0, 1.0}) {
    auto c = young::preset("vanishing:0.5", x0);
    auto x = young::solve_ensemble(c, b);
    bool constant = true, zero = true;
    for (std::size_t i = 0; i < x.n_paths(); ++i) {
      for (std::size_t k = 0; k < grid.size(); ++k) constant = constant && x.value(i, k) == x0;
      for (int j = 1; j <= 10; ++j) {
        std::size_t k = grid.require_index(0.1 * j);
        double d = proportional_present_derivative(c, HurstIndex(H), grid[k], x.value(i, k), b.value(i, k));
        zero = zero && d == 0.0;
      }
    }
    EXPECT_EQ(constant, zero) << "x0 " << x0;
    EXPECT_EQ(constant, x0 == 0.0);
  }
}

TEST(FractionalSde, UnitSigmaMatchesFbmPresent) {
  auto c = young::preset("proportional:0", 0.0);
  c.sigma = [](double) { return 1.0; };
  c.sigma_prime = [](double) { return 0.0; };
  c.sigma_second = c.sigma_prime;
  double d = proportional_present_derivative(c, HurstIndex(0.7), 2.0, 0.3, 1.0);
  EXPECT_NEAR(d, analytic_fbm_present(HurstIndex(0.7), 2.0, 1.0, Direction::forward).value(), 1e-15);
  EXPECT_THROW(proportional_present_derivative(young::preset("sine", 0.0), HurstIndex(0.7), 1.0, 0.0, 0.0),
               std::invalid_argument);
}

TEST(FractionalSde, ProportionalMonteCarlo) {
  const double H = 0.7, t = 1.0, r = 0.5;
  auto grid = TimeGrid::uniform(1.1, 44);
  auto c = young::preset("proportional:0.5", 0.0);
  auto x = young::solve_ensemble(c, core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 13));
  EstimatorConfig cfg;
  cfg.hurst = H;
  auto rep = estimate_derivative(x, SigmaFieldSpec::present(t), t, HLadder({0.1, 0.05, 0.025}, Direction::forward), cfg);
  auto truth = [&](double xv) {
    return proportional_present_derivative(c, HurstIndex(H), t, xv, inverse_flow(c, xv) - r * t);
  };
  // 5% at M = 1e5, scaled for M = 2e4.
  EXPECT_LE(relative_l2_error(rep, truth), 0.05 * std::sqrt(5.0));
}

TEST(FractionalSde, BetaVanishesForProportionalCoefficients) {
  const HurstIndex H(0.7);
  auto grid = TimeGrid::uniform(1.0, 256);
  auto b = core::circulant_sample(H, grid, 3, {}, 14);
  auto c = young::preset("proportional:0.5", 0.0);
  for (std::size_t i = 0; i < b.n_paths(); ++i) {
    auto sol = young::doss_sussmann_solve(c, b.path(i), grid);
    for (double r : {0.0, 0.25, 1.0}) {
      for (double v : compute_beta(c, sol, r, H).samples()) EXPECT_LE(std::abs(v), 1e-10);
    }
  }
  auto a = young::preset("affine", 0.0);
  auto sol = young::doss_sussmann_solve(a, b.path(0), grid);
  for (double v : compute_beta(a, sol, 0.0, H).samples()) EXPECT_LE(std::abs(v), 1e-15);
  EXPECT_THROW(compute_beta(young::preset("linear", 1.0), sol, 0.5, H), std::invalid_argument);
}

TEST(FractionalSde, AffineBetaAgainstQuadrature) {
  const HurstIndex H(0.7);
  const double p = 0.2, r = 0.5;
  auto grid = TimeGrid::uniform(1.0, 2048);
  auto b = core::circulant_sample(H, grid, 1, {}, 15);
  auto c = young::preset("affine", 0.0);
  auto beta = compute_beta(c, young::doss_sussmann_solve(c, b.path(0), grid), r, H);
  const double C = frac::kernel_normalization(H);
  boost::math::quadrature::tanh_sinh<double> ts;
  for (int i = 1; i <= 10; ++i) {
    double t = 0.1 * i;
    auto f = [&](double y) { return std::pow(t - y, p - 1) * std::pow(y, -p) * std::max(0.0, r - y); };
    double ref = C * std::pow(t, p) / std::tgamma(p) * ts.integrate(f, 0.0, std::min(t, r));
    EXPECT_NEAR(beta(t), ref, 1e-3) << "t " << t;
  }
}

TEST(FractionalSde, GeneralExpressionReducesToProportionalFormula) {
  const double H = 0.7, t = 1.0, r = 0.5;
  auto grid = TimeGrid::uniform(1.0, 40);
  auto c = young::preset("proportional:0.5", 0.0);
  auto x = young::solve_ensemble(c, core::cholesky_sample(HurstIndex(H), grid, 20000, {}, 16));
  auto out = present_derivative_expression(c, x, HurstIndex(H), t);
  ASSERT_TRUE(std::holds_alternative<BinnedFunction>(out));
  const auto& f = std::get<BinnedFunction>(out);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < f.bins.size(); ++k) {
    if (!f.bins.valid[k]) continue;
    double xv = f.bins.mean[k];
    double truth = proportional_present_derivative(c, HurstIndex(H), t, xv, inverse_flow(c, xv) - r * t);
    num += f.bins.count[k] * std::pow(f.estimate.value[k] - truth, 2);
    den += f.bins.count[k] * truth * truth;
  }
  EXPECT_LE(std::sqrt(num / den), 0.02);

  auto sine = young::preset("sine", 0.0);
  auto xs = young::solve_ensemble(sine, core::cholesky_sample(HurstIndex(H), grid, 200, {}, 17));
  auto un = present_derivative_expression(sine, xs, HurstIndex(H), t);
  ASSERT_TRUE(std::holds_alternative<UnevaluatedTerm>(un));
  EXPECT_FALSE(std::get<UnevaluatedTerm>(un).term.empty());
}

TEST(WeakPairing, FrozenTargetAndNullFunctional) {
  const HurstIndex H(0.7);
  const double t = 0.5, T = 1.0;
  const double target = 0.7 * (std::pow(0.5, 0.4) + std::pow(0.5, 0.4));
  // 0.7 (0.5^0.4 + 0.5^0.4) = 1.0610016; a value quoted as 1.0609 is off in the fourth decimal.
  EXPECT_NEAR(target, 1.0610016, 1e-6);
  std::vector<double> steps{1e-3, 5e-4, 2.5e-4};
  auto w = polynomial_extrapolation_weights(steps, 2);
  double ex = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) ex += w[j] * fbm_pairing_exact(H, t, T, steps[j]);
  EXPECT_NEAR(ex, target, 1e-6);

  auto grid = TimeGrid::uniform(T, 40);
  auto b = core::cholesky_sample(H, grid, 20000, {}, 18);
  CylindricalFunctional one{{T}, [](std::span<const double>) { return 1.0; },
                            [](std::span<const double>) { return std::vector<double>{0.0}; }, "1"};
  auto r = weak_pairing_limit(b, b, H, one, t, {0.2, 0.1, 0.05}, 1);
  EXPECT_LE(std::abs(r.limit), 3.0 * r.limit_se);
  EXPECT_EQ(r.closed_form, 0.0);
}

TEST(WeakPairing, SdeWithUnitSigmaGivesMeanDrift) {
  const HurstIndex H(0.7);
  const double t = 0.5;
  auto grid = TimeGrid::uniform(1.0, 40);
  auto b = core::cholesky_sample(H, grid, 20000, {}, 19);
  auto c = young::preset("bounded-drift", 0.3);
  auto x = young::solve_ensemble(c, b);
  CylindricalFunctional one{{1.0}, [](std::span<const double>) { return 1.0; },
                            [](std::span<const double>) { return std::vector<double>{0.0}; }, "1"};
  auto r = weak_pairing_limit(x, b, H, one, t, {0.2, 0.1, 0.05}, 1);
  auto col = x.column(grid.require_index(t));
  double mean = 0.0, sq = 0.0;
  for (double v : col) mean += std::sin(v) / col.size();
  for (double v : col) sq += std::pow(std::sin(v) - mean, 2) / (col.size() - 1);
  double se = std::sqrt(r.limit_se * r.limit_se + sq / col.size());
  EXPECT_NEAR(r.limit, mean, 3.0 * se);
}

// --- Wiener diffusions ----------------------------------------------------------

TEST(WienerDrifts, BrownianAndZeroDensity) {
  auto bm = young::preset("constant", 0.0);
  auto p = DensityModel::gaussian([](double) { return 0.0; }, [](double t) { return t; });
  auto d = wiener_drifts(bm, p, 2.0, 0.6);
  EXPECT_EQ(d.forward, 0.0);
  EXPECT_NEAR(d.backward, 0.3, 1e-12);
  auto narrow = DensityModel::gaussian([](double) { return 0.0; }, [](double) { return 1e-4; });
  auto ou = young::preset("ou:1", 0.0);
  auto far = wiener_drifts(ou, narrow, 1.0, 10.0);
  EXPECT_EQ(narrow.density(1.0, 10.0), 0.0);
  EXPECT_EQ(far.backward, ou.b(10.0));
}

TEST(WienerDrifts, OrnsteinUhlenbeckBackward) {
  const double theta = 1.5, x0 = 1.0;
  auto c = young::preset("ou:1.5", x0);
  auto p = DensityModel::gaussian([&](double t) { return ou_moments(theta, x0, t).first; },
                                  [&](double t) { return ou_moments(theta, x0, t).second; });
  for (double t : {0.2, 0.5, 1.0}) {
    double m = x0 * std::exp(-theta * t), v = (1 - std::exp(-2 * theta * t)) / (2 * theta);
    auto [mm, vv] = ou_moments(theta, x0, t);
    EXPECT_NEAR(mm, m, 1e-14);
    EXPECT_NEAR(vv, v, 1e-14);
    for (double x : {-0.5, 0.3, 1.2}) {
      auto d = wiener_drifts(c, p, t, x);
      EXPECT_NEAR(d.forward, -theta * x, 1e-14);
      EXPECT_NEAR(d.backward, -theta * x + (x - m) / v, 1e-10);
    }
  }
}

TEST(WienerDrifts, OrnsteinUhlenbeckMonteCarlo) {
  const double theta = 1.0, x0 = 1.0, t = 0.5;
  auto grid = TimeGrid::uniform(1.0, 200);
  auto e = ou_sample(theta, x0, grid, 20000, {}, 20);
  auto [m, v] = ou_moments(theta, x0, t);
  auto rep = estimate_derivative(e, SigmaFieldSpec::present(t), t, HLadder({0.2, 0.1, 0.05}, Direction::backward));
  auto truth = [&](double x) { return -theta * x + (x - m) / v; };
  EXPECT_LE(relative_l2_error(rep, truth), 0.1);
}

TEST(DensityModel, KernelEstimateIsNormalized) {
  core::PathRng rng({3, 0}, 0, 0);
  std::vector<double> s(5000);
  for (double& v : s) v = rng.normal();
  auto k = DensityModel::kernel(s);
  EXPECT_GT(k.bandwidth(), 0.0);
  double mass = 0.0;
  for (int i = -800; i <= 800; ++i) mass += k.density(0.0, 0.01 * i) * 0.01;
  EXPECT_NEAR(mass, 1.0, 1e-3);
  EXPECT_THROW(DensityModel::gaussian([](double) { return 0.0; }, [](double) { return 0.0; }).density(1.0, 0.0),
               std::invalid_argument);
}

// --- Volterra kernels -------------------------------------------------------------

TEST(VolterraCriterion, BrownianKernelConverges) {
  auto k = frac::KernelSpec::fbm(HurstIndex(0.5));
  for (double t : {0.3, 0.9}) {
    auto r = volterra_criterion(k, t);
    EXPECT_EQ(r.verdict, Verdict::convergent);
    auto f = derivative_functional(k, t, TimeGrid::uniform(1.0, 50));
    ASSERT_TRUE(f.has_value());
    for (double w : f->weights) EXPECT_EQ(w, 0.0);
  }
}

TEST(VolterraCriterion, FractionalKernelDiverges) {
  auto k = frac::KernelSpec::fbm(HurstIndex(0.75));
  EXPECT_EQ(volterra_criterion(k, 0.5).verdict, Verdict::divergent);
  EXPECT_FALSE(derivative_functional(k, 0.5, TimeGrid::uniform(1.0, 50)).has_value());
}

TEST(VolterraCriterion, PiecewiseKernelSwitches) {
  auto k = frac::KernelSpec::piecewise_hurst(0.5, 1.0);
  auto early = volterra_criterion(k, 0.3);
  EXPECT_EQ(early.verdict, Verdict::convergent);
  auto f = derivative_functional(k, 0.3, TimeGrid::uniform(1.0, 50));
  ASSERT_TRUE(f.has_value());
  std::vector<double> dw(50, 0.1);
  EXPECT_EQ((*f)(dw), 0.0);
  EXPECT_EQ(volterra_criterion(k, 0.8).verdict, Verdict::divergent);
}

TEST(VolterraCriterion, NonFiniteDerivativeIsLocated) {
  auto k = frac::KernelSpec::custom([](double t, double s) { return s < t ? 1.0 : 0.0; },
                                    [](double t, double s) { return s < 0.5 * t ? std::nan("") : 0.0; }, "nan-dt");
  auto r = volterra_criterion(k, 0.8);
  EXPECT_EQ(r.verdict, Verdict::divergent);
  ASSERT_TRUE(r.singular_at.has_value());
  EXPECT_DOUBLE_EQ(r.singular_at->first, 0.8);
}

TEST(XiStatistic, MeasuresConvergentTimes) {
  auto grid = TimeGrid::uniform(1.0, 64);
  EXPECT_NEAR(xi_statistic(frac::KernelSpec::fbm(HurstIndex(0.5)), grid).value, 1.0, 1e-12);
  EXPECT_NEAR(xi_statistic(frac::KernelSpec::fbm(HurstIndex(0.75)), grid).value, 0.0, 1e-12);
  for (double c : {0.25, 0.5, 0.75}) {
    auto x = xi_statistic(frac::KernelSpec::piecewise_hurst(c, 1.0), grid);
    EXPECT_LE(std::abs(x.value - c), grid.mesh()) << "c " << c;
    EXPECT_EQ(x.inconclusive, 0.0);
  }
}

// --- process descriptors ------------------------------------------------------------

TEST(ProcessSpec, ParsesEveryFamily) {
  auto f = ProcessSpec::parse("fbm:0.7:circulant");
  EXPECT_EQ(f.kind, ProcessSpec::Kind::fbm);
  EXPECT_EQ(f.sampler, "circulant");
  auto s = ProcessSpec::parse("sde:0.6:sine@0.5");
  EXPECT_EQ(s.kind, ProcessSpec::Kind::sde);
  EXPECT_DOUBLE_EQ(s.x0, 0.5);
  EXPECT_DOUBLE_EQ(s.driving_hurst(), 0.6);
  EXPECT_EQ(ProcessSpec::parse("volterra:piecewise:0.5").kind, ProcessSpec::Kind::volterra);
  EXPECT_EQ(ProcessSpec::parse("wiener:ou:1@1").kind, ProcessSpec::Kind::wiener);
  EXPECT_THROW(ProcessSpec::parse("levy:1"), std::invalid_argument);
  EXPECT_THROW(ProcessSpec::parse("fbm:1.2"), std::invalid_argument);
}
