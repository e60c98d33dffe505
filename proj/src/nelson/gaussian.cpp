#include "fracnelson/nelson/gaussian.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/sampling.h"

namespace fracnelson::nelson {

namespace {

Eigen::MatrixXd covariance(HurstIndex h, std::span<const double> times) {
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = core::fbm_covariance(h, times[i], times[j]);
  return m;
}

}  // namespace

ConditionalIncrement gaussian_conditional_increment(HurstIndex h, double t, double step, Direction direction,
                                                    std::span<const double> cond_times) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (cond_times.empty()) throw std::invalid_argument("no conditioning times");
  double a = direction == Direction::forward ? t : t - step;
  double b = direction == Direction::forward ? t + step : t;
  if (a < 0.0) throw std::invalid_argument("increment starts before 0");

  Eigen::MatrixXd m = covariance(h, cond_times);
  Eigen::VectorXd v(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    v(i) = (core::fbm_covariance(h, b, cond_times[i]) - core::fbm_covariance(h, a, cond_times[i])) / step;

  Eigen::MatrixXd l;
  try {
    l = core::cholesky_lower(m);
  } catch (const CholeskyError& e) {
    throw std::invalid_argument(std::string("singular conditioning covariance: ") + e.what());
  }
  // relative pivot check: a numerically rank-deficient matrix is singular too
  double dmax = m.diagonal().maxCoeff();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (l(i, i) * l(i, i) <= 1e-13 * dmax) throw std::invalid_argument("singular conditioning covariance");

  Eigen::VectorXd y = l.triangularView<Eigen::Lower>().solve(v);
  Eigen::VectorXd coef = l.transpose().triangularView<Eigen::Upper>().solve(y);
  ConditionalIncrement out;
  out.coefficients.assign(coef.data(), coef.data() + coef.size());
  out.variance = y.squaredNorm();
  return out;
}

double backward_variance_exact(HurstIndex h, double t, double step) {
  const double times[2] = {t, t + step};
  return gaussian_conditional_increment(h, t, step, Direction::backward, times).variance;
}

double backward_determinant(HurstIndex h, double t, double step) {
  double a = core::fbm_covariance(h, t, t);
  double b = core::fbm_covariance(h, t + step, t + step);
  double c = core::fbm_covariance(h, t, t + step);
  return a * b - c * c;
}

std::optional<double> analytic_fbm_present(HurstIndex h, double t, double b_t, Direction direction) {
  if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
  double hv = h.value();
  if (hv < 0.5) return std::nullopt;
  if (hv == 0.5) return direction == Direction::forward ? 0.0 : b_t / t;
  return hv * b_t / t;
}

std::vector<double> extrapolation_weights(std::span<const double> steps, std::span<const double> exponents) {
  const auto n = static_cast<Eigen::Index>(steps.size());
  const auto p = static_cast<Eigen::Index>(exponents.size()) + 1;
  if (n < p) throw std::invalid_argument("extrapolation needs at least as many steps as basis functions");
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) x(i, j) = std::pow(steps[i], exponents[j - 1]);
  }
  // first row of (X^T X)^{-1} X^T
  Eigen::MatrixXd pinv = x.completeOrthogonalDecomposition().pseudoInverse();
  std::vector<double> w(steps.size());
  for (Eigen::Index i = 0; i < n; ++i) w[i] = pinv(0, i);
  return w;
}

std::vector<double> polynomial_extrapolation_weights(std::span<const double> steps, std::size_t degree) {
  std::vector<double> e;
  for (std::size_t d = 1; d <= degree; ++d) e.push_back(static_cast<double>(d));
  return extrapolation_weights(steps, e);
}

}  // namespace fracnelson::nelson
