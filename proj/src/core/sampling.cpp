#include "fracnelson/core/sampling.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "fracnelson/core/errors.h"
#include "fracnelson/core/parallel.h"

namespace fracnelson::core {

double fbm_covariance(HurstIndex h, double s, double t) {
  if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_covariance: negative time");
  double e = 2.0 * h.value();
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("cholesky_lower: matrix not square");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) throw CholeskyError(static_cast<std::size_t>(j), d);
    double ljj = std::sqrt(d);
    l(j, j) = ljj;
    if (j + 1 < n) {
      l.col(j).tail(n - j - 1) =
          (a.col(j).tail(n - j - 1) - l.bottomLeftCorner(n - j - 1, j) * l.row(j).head(j).transpose()) / ljj;
    }
  }
  return l;
}

PathEnsemble cholesky_sample(HurstIndex h, const TimeGrid& grid, std::size_t n_paths,
                             const SeedSpec& seed, std::uint64_t run) {
  const std::size_t n = grid.steps();
  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cov(i, j) = fbm_covariance(h, grid[i + 1], grid[j + 1]);
  // Row-major copy makes the per-path triangular products contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> l = cholesky_lower(cov);

  std::vector<double> values(n_paths * (n + 1), 0.0);
  std::vector<double> driver(n_paths * n);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    Eigen::VectorXd xi(n);
    for (std::size_t p = begin; p < end; ++p) {
      PathRng rng(seed, run, p);
      for (std::size_t j = 0; j < n; ++j) xi[j] = rng.normal();
      double* row = values.data() + p * (n + 1);
      for (std::size_t k = 0; k < n; ++k) {
        row[k + 1] = l.row(k).head(k + 1).dot(xi.head(k + 1));
        driver[p * n + k] = xi[k] * std::sqrt(grid.step(k));
      }
    }
  });
  return PathEnsemble(grid, n_paths, std::move(values), std::move(driver),
                      "fbm:" + std::to_string(h.value()) + ":cholesky");
}

namespace {

struct FftwBuffer {
  explicit FftwBuffer(std::size_t m) : data(fftw_alloc_complex(m)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

struct FftwPlan {
  ~FftwPlan() { fftw_destroy_plan(plan); }
  fftw_plan plan;
};

}  // namespace

PathEnsemble circulant_sample_increments(std::span<const double> gamma, const TimeGrid& grid,
                                         std::size_t n_paths, const SeedSpec& seed,
                                         std::uint64_t run, std::string label) {
  if (!grid.is_uniform()) throw std::invalid_argument("circulant sampling requires a uniform grid");
  const std::size_t n = grid.steps();
  if (gamma.size() < n) throw std::invalid_argument("autocovariance shorter than the number of steps");
  const std::size_t m = 2 * n;

  FftwBuffer in(m), out(m);
  FftwPlan plan{fftw_plan_dft_1d(static_cast<int>(m), in.data, out.data, FFTW_FORWARD, FFTW_ESTIMATE)};

  // First row of the circulant: gamma(0..n-1), a free entry at n, then the mirror.
  std::vector<double> c(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) c[k] = gamma[k];
  c[n] = gamma.size() > n ? gamma[n] : 0.0;
  for (std::size_t k = 1; k < n; ++k) c[m - k] = gamma[k];
  for (std::size_t k = 0; k < m; ++k) {
    in.data[k][0] = c[k];
    in.data[k][1] = 0.0;
  }
  fftw_execute(plan.plan);
  std::vector<double> scale(m);
  double lmax = 0.0;
  for (std::size_t k = 0; k < m; ++k) lmax = std::max(lmax, std::abs(out.data[k][0]));
  for (std::size_t k = 0; k < m; ++k) {
    double lambda = out.data[k][0];
    if (lambda < -1e-12 * lmax) throw EmbeddingError(k, lambda);
    // Only round-off sized negatives reach here.
    scale[k] = std::sqrt(std::max(lambda, 0.0) / static_cast<double>(m));
  }

  std::vector<double> values(n_paths * (n + 1), 0.0);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    FftwBuffer win(m), wout(m);
    for (std::size_t p = begin; p < end; ++p) {
      PathRng rng(seed, run, p);
      for (std::size_t k = 0; k < m; ++k) {
        win.data[k][0] = scale[k] * rng.normal();
        win.data[k][1] = scale[k] * rng.normal();
      }
      fftw_execute_dft(plan.plan, win.data, wout.data);
      double* row = values.data() + p * (n + 1);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += wout.data[k][0];
        row[k + 1] = acc;
      }
    }
  });
  return PathEnsemble(grid, n_paths, std::move(values), std::nullopt, std::move(label));
}

PathEnsemble circulant_sample(HurstIndex h, const TimeGrid& grid, std::size_t n_paths,
                              const SeedSpec& seed, std::uint64_t run) {
  const std::size_t n = grid.steps();
  const double e = 2.0 * h.value();
  const double dt = grid.horizon() / static_cast<double>(n);
  const double var = std::pow(dt, e);
  std::vector<double> gamma(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double kk = static_cast<double>(k);
    gamma[k] = 0.5 * var * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(std::abs(kk - 1.0), e));
  }
  return circulant_sample_increments(gamma, grid, n_paths, seed, run,
                                     "fbm:" + std::to_string(h.value()) + ":circulant");
}

PathEnsemble volterra_sample(const frac::KernelSpec& k, const TimeGrid& grid, std::size_t n_paths,
                             const SeedSpec& seed, std::uint64_t run) {
  const std::size_t n = grid.steps();
  // weights(r, j) = K(t_{r+1}, midpoint of step j) for j <= r.
  std::vector<double> weights(n * n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      double t = grid[r + 1];
      for (std::size_t j = 0; j <= r; ++j) weights[r * n + j] = k(t, 0.5 * (grid[j] + grid[j + 1]));
    }
  });
  std::vector<double> values(n_paths * (n + 1), 0.0);
  std::vector<double> driver(n_paths * n);
  parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      PathRng rng(seed, run, p);
      double* dw = driver.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) dw[j] = rng.normal() * std::sqrt(grid.step(j));
      double* row = values.data() + p * (n + 1);
      for (std::size_t r = 0; r < n; ++r) {
        const double* w = weights.data() + r * n;
        double acc = 0.0;
        for (std::size_t j = 0; j <= r; ++j) acc += w[j] * dw[j];
        row[r + 1] = acc;
      }
    }
  });
  return PathEnsemble(grid, n_paths, std::move(values), std::move(driver), "volterra:" + k.description());
}

Eigen::MatrixXd empirical_covariance(const PathEnsemble& e, std::span<const double> times) {
  if (e.n_paths() < 2) throw std::invalid_argument("empirical_covariance needs at least two paths");
  std::vector<std::size_t> idx;
  for (double t : times) idx.push_back(e.grid().require_index(t));
  const std::size_t d = idx.size(), m = e.n_paths();
  Eigen::MatrixXd x(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < d; ++a) x(i, a) = e.value(i, idx[a]);
  Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::MatrixXd c = (x.transpose() * x) / static_cast<double>(m - 1);
  return 0.5 * (c + c.transpose());
}

}  // namespace fracnelson::core
