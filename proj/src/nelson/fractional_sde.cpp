#include "fracnelson/nelson/fractional_sde.h"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracnelson/core/sampling.h"
#include "fracnelson/frac/operators.h"
#include "fracnelson/nelson/estimator.h"
#include "fracnelson/nelson/gaussian.h"

namespace fracnelson::nelson {

namespace {

double g_term(const young::CoefficientSet& c, double x) {
  double s = c.sigma(x);
  return (c.b_prime(x) * s - c.b(x) * c.sigma_prime(x)) / s;
}

void require_elliptic(const young::CoefficientSet& c) {
  if (!c.elliptic) throw std::invalid_argument("coefficient set '" + c.name + "' is not elliptic");
}

}  // namespace

double proportional_present_derivative(const young::CoefficientSet& c, HurstIndex h, double t, double x_t,
                                       double b_t) {
  if (!c.proportional_ratio) throw std::invalid_argument("drift is not proportional to sigma");
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  return h.value() * c.sigma(x_t) * b_t / t + c.b(x_t);
}

double inverse_flow(const young::CoefficientSet& c, double x) {
  require_elliptic(c);
  if (x == c.x0) return 0.0;
  auto f = [&](double y) { return 1.0 / c.sigma(y); };
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, c.x0, x, 10, 1e-13);
}

frac::GridFunction compute_beta(const young::CoefficientSet& c, const young::SolutionPath& sol, double r,
                                HurstIndex h) {
  require_elliptic(c);
  const auto& grid = sol.grid;
  std::size_t kr = grid.require_index(r);
  std::vector<double> g(grid.size()), u(grid.size(), 0.0);
  for (std::size_t k = 0; k <= kr; ++k) g[k] = g_term(c, sol.x[k]);
  for (std::size_t k = kr; k-- > 0;) u[k] = u[k + 1] + 0.5 * (g[k] + g[k + 1]) * grid.step(k);
  return frac::op_OH(frac::GridFunction(grid, std::move(u)), h);
}

std::variant<BinnedFunction, UnevaluatedTerm> present_derivative_expression(const young::CoefficientSet& c,
                                                                            const core::PathEnsemble& x,
                                                                            HurstIndex h, double t,
                                                                            const EstimatorConfig& config,
                                                                            double beta_tolerance) {
  if (!c.elliptic)
    return UnevaluatedTerm{"beta", "sigma is not elliptic, so the divergence terms are undefined"};
  const auto& grid = x.grid();
  std::size_t kt = grid.require_index(t);
  double gmax = 0.0;
  for (std::size_t i = 0; i < x.n_paths(); ++i)
    for (std::size_t k = 0; k <= kt; ++k) gmax = std::max(gmax, std::abs(g_term(c, x.value(i, k))));
  if (gmax > beta_tolerance)
    return UnevaluatedTerm{"divergence of beta", "beta does not vanish (max |g| = " + std::to_string(gmax) + ")"};

  std::vector<double> a(x.n_paths()), xt(x.n_paths());
  for (std::size_t i = 0; i < x.n_paths(); ++i) {
    double drift = 0.0;
    for (std::size_t k = 0; k < kt; ++k) {
      double f0 = c.b(x.value(i, k)) / c.sigma(x.value(i, k));
      double f1 = c.b(x.value(i, k + 1)) / c.sigma(x.value(i, k + 1));
      drift += 0.5 * (f0 + f1) * grid.step(k);
    }
    xt[i] = x.value(i, kt);
    a[i] = inverse_flow(c, xt[i]) - drift;
  }
  BinnedFunction f = binned_conditional_mean(a, xt, config);
  for (std::size_t b = 0; b < f.bins.size(); ++b) {
    double xb = f.bins.mean[b];
    double scale = h.value() * c.sigma(xb) / t;
    f.estimate.value[b] = c.b(xb) + scale * f.estimate.value[b];
    f.estimate.se[b] *= std::abs(scale);
  }
  return f;
}

double fbm_pairing_exact(HurstIndex h, double t, double u, double step) {
  return (core::fbm_covariance(h, t + step, u) - core::fbm_covariance(h, t, u)) / step;
}

WeakPairingResult weak_pairing_limit(const core::PathEnsemble& z, const core::PathEnsemble& b, HurstIndex h,
                                     const CylindricalFunctional& v, double t, const std::vector<double>& steps,
                                     std::size_t degree) {
  if (!h.regular()) throw std::invalid_argument("weak pairing needs H > 1/2");
  if (z.n_paths() != b.n_paths() || !(z.grid() == b.grid())) throw std::invalid_argument("ensembles do not match");
  if (steps.size() < degree + 1) throw std::invalid_argument("ladder too short for the extrapolation degree");
  const auto& grid = z.grid();
  const std::size_t m = z.n_paths(), L = steps.size();
  const std::size_t kt = grid.require_index(t);
  std::vector<std::size_t> ku;
  for (double u : v.times) ku.push_back(grid.require_index(u));
  std::vector<std::size_t> kh;
  for (double s : steps) kh.push_back(grid.require_index(t + s));

  auto w = polynomial_extrapolation_weights(steps, degree);
  const double hv = h.value();
  WeakPairingResult r;
  r.steps = steps;

  // per path: V, the pairings per step, their extrapolation and the closed-form integrand
  Eigen::MatrixXd y(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(L));
  Eigen::VectorXd closed(static_cast<Eigen::Index>(m));
  std::vector<double> args(ku.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ku.size(); ++j) args[j] = b.value(i, ku[j]);
    double val = v.phi(args);
    auto grad = v.gradient(args);
    double cf = 0.0;
    for (std::size_t j = 0; j < ku.size(); ++j) {
      // H (2H-1) int_0^u |t-s|^{2H-2} ds
      double u = v.times[j];
      double inner = std::pow(t, 2 * hv - 1) + (u >= t ? 1.0 : -1.0) * std::pow(std::abs(u - t), 2 * hv - 1);
      cf += grad[j] * hv * inner;
    }
    closed(static_cast<Eigen::Index>(i)) = cf;
    for (std::size_t j = 0; j < L; ++j) {
      double inc = (z.value(i, kh[j]) - z.value(i, kt)) / steps[j];
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = val * inc;
    }
  }
  const double dm = static_cast<double>(m);
  auto mean_se = [&](const Eigen::VectorXd& x) {
    double mu = x.mean();
    double var = (x.array() - mu).square().sum() / (dm - 1.0);
    return std::make_pair(mu, std::sqrt(var / dm));
  };
  for (std::size_t j = 0; j < L; ++j) {
    auto [mu, se] = mean_se(y.col(static_cast<Eigen::Index>(j)));
    r.estimates.push_back(mu);
    r.se.push_back(se);
  }
  Eigen::VectorXd zl = y * Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(L));
  std::tie(r.limit, r.limit_se) = mean_se(zl);
  std::tie(r.closed_form, r.closed_form_se) = mean_se(closed);

  // the extrapolation from the steps without the coarsest one should agree
  if (L >= degree + 2) {
    std::vector<double> tail(steps.begin() + 1, steps.end());
    auto w2 = polynomial_extrapolation_weights(tail, degree);
    double alt = 0.0;
    for (std::size_t j = 0; j < tail.size(); ++j) alt += w2[j] * r.estimates[j + 1];
    double lim_raw = 0.0;
    for (std::size_t j = 0; j < L; ++j) lim_raw += w[j] * r.estimates[j];
    r.verdict = std::abs(alt - lim_raw) <= std::max(1e-3, 3.0 * r.limit_se * std::sqrt(2.0)) ? Verdict::convergent
                                                                                              : Verdict::inconclusive;
  }
  return r;
}

}  // namespace fracnelson::nelson
