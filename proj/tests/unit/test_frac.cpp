#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/sampling.h"
#include "fracnelson/frac/fractional.h"
#include "fracnelson/frac/grid_function.h"
#include "fracnelson/frac/kernel.h"
#include "fracnelson/frac/operators.h"
#include "fracnelson/frac/special.h"

using namespace fracnelson;
using core::HurstIndex;
using core::TimeGrid;
using frac::FracOrder;
using frac::GridFunction;
using frac::Side;

namespace {

double max_err(const GridFunction& a, const std::function<double(double)>& f, std::size_t skip_front = 0) {
  double m = 0.0;
  for (std::size_t k = skip_front; k < a.size(); ++k) {
    if (a.singular_point() == k) continue;
    m = std::max(m, std::abs(a[k] - f(a.grid()[k])));
  }
  return m;
}

double max_err(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.singular_point() == k || b.singular_point() == k) continue;
    m = std::max(m, std::abs(a[k] - b[k]));
  }
  return m;
}

const TimeGrid& unit_grid() {
  static const TimeGrid g = TimeGrid::uniform(1.0, 2048);
  return g;
}

GridFunction smooth() {
  return GridFunction::sample(unit_grid(), [](double x) { return 1.0 + x + std::sin(3.0 * x); });
}

}  // namespace

TEST(Special, GammaAndBeta) {
  EXPECT_NEAR(frac::gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(frac::gamma_fn(5.0), 24.0, 1e-11);
  EXPECT_NEAR(frac::beta_fn(2.0, 3.0), 1.0 / 12.0, 1e-14);
}

TEST(Special, KernelConstantSquared) {
  for (double H : {0.6, 0.75, 0.9}) {
    double c = frac::fbm_kernel_constant(HurstIndex(H));
    EXPECT_NEAR(c * c, H * (2 * H - 1) / frac::beta_fn(2 - 2 * H, H - 0.5), 1e-12);
  }
}

TEST(FracOrder, Range) {
  EXPECT_THROW(FracOrder(0.0), std::invalid_argument);
  EXPECT_THROW(FracOrder(1.5), std::invalid_argument);
  EXPECT_NO_THROW(FracOrder(1.0));
}

TEST(GridFunction, StepRuleIsLeftContinuous) {
  auto g = TimeGrid::uniform(1.0, 4);
  GridFunction f(g, {0.0, 1.0, 2.0, 3.0, 4.0}, frac::Interpolation::step);
  EXPECT_EQ(f(0.25), 1.0);
  EXPECT_EQ(f(0.3), 2.0);
  GridFunction l(g, {0.0, 1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(l(0.375), 1.5, 1e-15);
}

TEST(GridFunction, CsvRoundTrip) {
  auto f = smooth();
  std::stringstream s;
  frac::write_csv(s, f);
  auto r = frac::read_grid_function_csv(s);
  EXPECT_TRUE(r.grid() == f.grid());
  EXPECT_TRUE(std::equal(r.samples().begin(), r.samples().end(), f.samples().begin()));
}

TEST(RlIntegral, ZeroAndOrderOne) {
  auto z = GridFunction::zero(unit_grid());
  EXPECT_EQ(max_err(frac::rl_integral(z, FracOrder(0.4)), [](double) { return 0.0; }), 0.0);
  auto f = smooth();
  EXPECT_LT(max_err(frac::rl_integral(f, FracOrder(1.0)), frac::cumulative_integral(f)), 1e-12);
}

TEST(RlIntegral, MonomialLaw) {
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    auto xm = GridFunction::sample(unit_grid(), [mu](double x) { return std::pow(x, mu); });
    for (double a : {0.25, 0.5, 0.75}) {
      double k = std::tgamma(mu + 1) / std::tgamma(mu + a + 1);
      EXPECT_LE(max_err(frac::rl_integral(xm, FracOrder(a)), [&](double x) { return k * std::pow(x, mu + a); }), 1e-3)
          << "mu " << mu << " alpha " << a;
    }
  }
}

TEST(RlIntegral, RightSidedConstant) {
  auto one = GridFunction::sample(unit_grid(), [](double) { return 1.0; });
  for (double a : {0.3, 0.7}) {
    auto r = frac::rl_integral(one, FracOrder(a), Side::right);
    EXPECT_LE(max_err(r, [a](double x) { return std::pow(1.0 - x, a) / std::tgamma(1 + a); }), 1e-10);
  }
  auto ph = frac::right_sided_phase(FracOrder(0.5));
  EXPECT_NEAR(std::abs(ph), 1.0, 1e-15);
}

TEST(RlIntegral, Semigroup) {
  auto f = smooth();
  for (auto [a, b] : {std::pair{0.25, 0.5}, std::pair{0.5, 0.5}, std::pair{0.3, 0.4}}) {
    EXPECT_LE(max_err(frac::rl_integral(frac::rl_integral(f, FracOrder(a)), FracOrder(b)),
                      frac::rl_integral(f, FracOrder(a + b))),
              1e-3);
  }
}

TEST(RlDerivative, OfConstant) {
  const double c = 2.5;
  auto f = GridFunction::sample(unit_grid(), [c](double) { return c; });
  for (double a : {0.25, 0.5, 0.75}) {
    auto d = frac::rl_derivative(f, FracOrder(a));
    ASSERT_TRUE(d.singular_point().has_value());
    EXPECT_EQ(*d.singular_point(), 0u);
    for (std::size_t k = 1; k < d.size(); ++k) {
      double x = unit_grid()[k];
      double want = c / (std::tgamma(1 - a) * std::pow(x, a));
      EXPECT_NEAR(d[k], want, 1e-9 * std::abs(want)) << "x " << x;
    }
  }
}

TEST(RlDerivative, OrderOneIsGridDerivative) {
  auto f = smooth();
  EXPECT_LT(max_err(frac::rl_derivative(f, FracOrder(1.0)), frac::grid_derivative(f)), 1e-12);
}

TEST(RlDerivative, InvertsIntegralOnBothSides) {
  auto f = smooth();
  for (double a : {0.25, 0.5, 0.75}) {
    for (Side s : {Side::left, Side::right}) {
      EXPECT_LE(max_err(frac::rl_derivative(frac::rl_integral(f, FracOrder(a), s), FracOrder(a), s), f), 1e-3)
          << "alpha " << a;
    }
  }
}

TEST(RlDerivative, RejectsStepInput) {
  auto f = smooth().with_rule(frac::Interpolation::step);
  EXPECT_THROW(frac::rl_derivative(f, FracOrder(0.5)), std::invalid_argument);
}

TEST(KernelKH, BasicValues) {
  EXPECT_EQ(frac::kernel_KH(HurstIndex(0.75), 0.5, 0.5), 0.0);
  EXPECT_EQ(frac::kernel_KH(HurstIndex(0.75), 0.5, 0.9), 0.0);
  EXPECT_EQ(frac::kernel_KH(HurstIndex(0.5), 0.9, 0.5), 1.0);
  EXPECT_THROW(frac::kernel_KH(HurstIndex(0.3), 1.0, 0.5), UnsupportedFormError);
}

TEST(KernelKH, FactorizesTheCovariance) {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double H : {0.6, 0.75}) {
    HurstIndex h(H);
    for (auto [s, t] : {std::pair{0.5, 1.0}, std::pair{1.0, 1.0}, std::pair{0.3, 0.8}}) {
      double v = ts.integrate([&](double u) { return frac::kernel_KH(h, t, u) * frac::kernel_KH(h, s, u); }, 0.0, s);
      EXPECT_NEAR(v, core::fbm_covariance(h, s, t), 1e-4 * core::fbm_covariance(h, s, t)) << H << ' ' << s << ' ' << t;
    }
  }
}

TEST(KernelKH, TimeDerivativeClosedForm) {
  const HurstIndex h(0.75);
  double c = frac::fbm_kernel_constant(h);
  EXPECT_NEAR(frac::kernel_KH_dt(h, 1.0, 0.5), c * std::pow(2.0, 0.25) * std::pow(0.5, -0.75), 1e-12);
  EXPECT_EQ(frac::kernel_KH_dt(HurstIndex(0.5), 1.0, 0.5), 0.0);
  for (auto [t, s] : {std::pair{1.0, 0.5}, std::pair{0.7, 0.2}}) {
    const double e = 1e-5;
    double fd = (frac::kernel_KH(h, t + e, s) - frac::kernel_KH(h, t - e, s)) / (2 * e);
    EXPECT_NEAR(fd, frac::kernel_KH_dt(h, t, s), 1e-4 * std::abs(fd));
  }
}

TEST(KernelSpec, CustomKernelMustVanishAboveDiagonal) {
  auto bad = frac::KernelSpec::custom([](double, double) { return 1.0; }, std::nullopt, "leaky");
  EXPECT_THROW(bad.check_volterra(1.0), std::invalid_argument);
  auto good = frac::KernelSpec::custom([](double t, double s) { return s < t ? t - s : 0.0; }, std::nullopt, "ramp");
  EXPECT_NO_THROW(good.check_volterra(1.0));
  auto nan = frac::KernelSpec::custom([](double t, double s) { return s < t ? std::nan("") : 0.0; }, std::nullopt, "nan");
  EXPECT_THROW(nan(1.0, 0.5), KernelEvaluationError);
}

TEST(OpKH, ZeroAndBrownianCase) {
  auto z = GridFunction::zero(unit_grid());
  EXPECT_EQ(max_err(frac::op_KH(z, HurstIndex(0.7)), [](double) { return 0.0; }), 0.0);
  auto f = smooth();
  EXPECT_LT(max_err(frac::op_KH(f, HurstIndex(0.5)), frac::cumulative_integral(f)), 1e-12);
}

TEST(OpOH, ConstantInputClosedForm) {
  // I^p(y^{-p}) = Gamma(1 - p), so O_H 1 = C Gamma(1 - p) s^p and K_H 1 = C Gamma(1 - p) t^{1+p} / (1 + p).
  for (double H : {0.6, 0.75}) {
    HurstIndex h(H);
    const double p = H - 0.5, C = frac::kernel_normalization(h);
    auto one = GridFunction::sample(unit_grid(), [](double) { return 1.0; });
    EXPECT_LE(max_err(frac::op_OH(one, h), [&](double s) { return C * std::tgamma(1 - p) * std::pow(s, p); }), 1e-6);
    EXPECT_LE(max_err(frac::op_KH(one, h),
                      [&](double t) { return C * std::tgamma(1 - p) * std::pow(t, 1 + p) / (1 + p); }),
              1e-6);
  }
}

TEST(OpOH, RunningIntegralIsKH) {
  for (double H : {0.6, 0.75}) {
    auto phi = GridFunction::sample(unit_grid(), [](double x) { return 1.0 + x; });
    EXPECT_LE(max_err(frac::cumulative_integral(frac::op_OH(phi, HurstIndex(H))), frac::op_KH(phi, HurstIndex(H))),
              1e-3);
  }
}

TEST(OpKHInverse, RoundTripAndZero) {
  auto h = GridFunction::sample(unit_grid(), [](double x) { return std::cos(2.0 * x) + x; });
  for (double H : {0.6, 0.75}) {
    EXPECT_LE(max_err(frac::op_KH_inverse(frac::op_KH(h, HurstIndex(H)), HurstIndex(H)), h), 1e-3);
  }
  auto z = GridFunction::zero(unit_grid());
  EXPECT_EQ(max_err(frac::op_KH_inverse(z, HurstIndex(0.7)), [](double) { return 0.0; }), 0.0);
  auto shifted = GridFunction::sample(unit_grid(), [](double x) { return 1.0 + x; });
  EXPECT_THROW(frac::op_KH_inverse(shifted, HurstIndex(0.7)), std::invalid_argument);
}

TEST(InnerProductH, IndicatorsReproduceCovarianceLattice) {
  const HurstIndex h(0.75);
  auto grid = TimeGrid::uniform(2.0, 50);
  auto indicator = [&](double t) {
    return GridFunction::sample(grid, [t](double x) { return x <= t + 1e-12 ? 1.0 : 0.0; }, frac::Interpolation::step);
  };
  EXPECT_NEAR(frac::inner_product_H(indicator(1.0), indicator(2.0), h), std::sqrt(2.0), 1e-4 * std::sqrt(2.0));
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 5; ++j) {
      double s = 0.4 * i, t = 0.4 * j;
      double want = core::fbm_covariance(h, s, t);
      EXPECT_NEAR(frac::inner_product_H(indicator(s), indicator(t), h), want, 1e-4 * want) << s << ' ' << t;
    }
  }
  auto z = GridFunction::zero(grid).with_rule(frac::Interpolation::step);
  EXPECT_EQ(frac::inner_product_H(z, indicator(1.0), h), 0.0);
}

TEST(InnerProductH, AbsoluteModeDominatesSigned) {
  const HurstIndex h(0.7);
  auto f = GridFunction::sample(unit_grid().coarsen(16), [](double x) { return std::sin(9.0 * x); });
  double sg = frac::inner_product_H(f, f, h);
  double ab = frac::inner_product_H(f, f, h, frac::InnerProductMode::absolute);
  EXPECT_GT(sg, 0.0);
  EXPECT_GE(ab, sg);
}
