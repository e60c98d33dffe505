#include "fracnelson/nelson/wiener.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fracnelson/core/parallel.h"

namespace fracnelson::nelson {

DensityModel DensityModel::gaussian(std::function<double(double)> mean, std::function<double(double)> variance) {
  DensityModel d;
  d.mean_ = std::move(mean);
  d.variance_ = std::move(variance);
  return d;
}

DensityModel DensityModel::kernel(std::vector<double> samples, double bandwidth_factor) {
  if (samples.size() < 2) throw std::invalid_argument("kernel density needs at least two samples");
  double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n - 1.0;
  DensityModel d;
  d.bandwidth_ = bandwidth_factor * 1.06 * std::sqrt(var) * std::pow(n, -0.2);
  if (!(d.bandwidth_ > 0.0)) throw std::invalid_argument("degenerate samples for kernel density");
  d.samples_ = std::move(samples);
  return d;
}

double DensityModel::density(double t, double x) const {
  constexpr double c = 0.3989422804014327;  // 1/sqrt(2 pi)
  if (mean_) {
    double v = variance_(t), d = x - mean_(t);
    if (!(v > 0.0)) throw std::invalid_argument("Gaussian density model needs a positive variance at t = " + std::to_string(t));
    return c / std::sqrt(v) * std::exp(-0.5 * d * d / v);
  }
  double s = 0.0;
  for (double xi : samples_) {
    double u = (x - xi) / bandwidth_;
    s += std::exp(-0.5 * u * u);
  }
  return c * s / (static_cast<double>(samples_.size()) * bandwidth_);
}

double DensityModel::density_dx(double t, double x) const {
  if (mean_) {
    double p = density(t, x);
    return -(x - mean_(t)) / variance_(t) * p;
  }
  constexpr double c = 0.3989422804014327;
  double s = 0.0;
  for (double xi : samples_) {
    double u = (x - xi) / bandwidth_;
    s -= u * std::exp(-0.5 * u * u);
  }
  return c * s / (static_cast<double>(samples_.size()) * bandwidth_ * bandwidth_);
}

Drifts wiener_drifts(const young::CoefficientSet& c, const DensityModel& p, double t, double x) {
  double b = c.b(x);
  double dens = p.density(t, x);
  if (!(dens > 0.0)) return {b, b};
  double s = c.sigma(x);
  double flux = 2.0 * s * c.sigma_prime(x) * dens + s * s * p.density_dx(t, x);
  return {b, b - flux / dens};
}

std::pair<double, double> ou_moments(double theta, double x0, double t) {
  if (theta == 0.0) return {x0, t};
  return {x0 * std::exp(-theta * t), -std::expm1(-2.0 * theta * t) / (2.0 * theta)};
}

core::PathEnsemble ou_sample(double theta, double x0, const core::TimeGrid& grid, std::size_t n_paths,
                             const core::SeedSpec& seed, std::uint64_t run) {
  const std::size_t np = grid.size(), n = grid.steps();
  std::vector<double> decay(n), scale(n);
  for (std::size_t k = 0; k < n; ++k) {
    double dt = grid.step(k);
    decay[k] = std::exp(-theta * dt);
    scale[k] = std::sqrt(ou_moments(theta, 0.0, dt).second);
  }
  std::vector<double> values(n_paths * np), driver(n_paths * n);
  core::parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      core::PathRng rng(seed, run, i);
      double* x = values.data() + i * np;
      double* w = driver.data() + i * n;
      x[0] = x0;
      for (std::size_t k = 0; k < n; ++k) {
        double xi = rng.normal();
        x[k + 1] = decay[k] * x[k] + scale[k] * xi;
        w[k] = xi * std::sqrt(grid.step(k));
      }
    }
  });
  return core::PathEnsemble(grid, n_paths, std::move(values), std::move(driver), "ou");
}

core::PathEnsemble wiener_sample(const young::CoefficientSet& c, const core::TimeGrid& grid, std::size_t n_paths,
                                 const core::SeedSpec& seed, std::size_t substeps, std::uint64_t run) {
  if (substeps == 0) throw std::invalid_argument("substeps must be positive");
  const std::size_t np = grid.size(), n = grid.steps();
  std::vector<double> values(n_paths * np), driver(n_paths * n);
  core::parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      core::PathRng rng(seed, run, i);
      double* x = values.data() + i * np;
      double* w = driver.data() + i * n;
      x[0] = c.x0;
      for (std::size_t k = 0; k < n; ++k) {
        double dt = grid.step(k) / static_cast<double>(substeps);
        double y = x[k], sum = 0.0;
        for (std::size_t s = 0; s < substeps; ++s) {
          double dw = rng.normal() * std::sqrt(dt);
          y += c.b(y) * dt + c.sigma(y) * dw;
          sum += dw;
        }
        x[k + 1] = y;
        w[k] = sum;
      }
    }
  });
  return core::PathEnsemble(grid, n_paths, std::move(values), std::move(driver), "wiener:" + c.name);
}

}  // namespace fracnelson::nelson
