#include "fracnelson/core/time_grid.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracnelson::core {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("time grid needs at least two points");
  if (points_.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t k = 1; k < points_.size(); ++k) {
    double d = points_[k] - points_[k - 1];
    if (!(d > 0.0) || !std::isfinite(points_[k])) {
      throw std::invalid_argument("time grid not strictly increasing at index " + std::to_string(k));
    }
    mesh_ = std::max(mesh_, d);
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0) throw std::invalid_argument("uniform grid needs T > 0 and n >= 1");
  std::vector<double> p(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) p[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  p.back() = horizon;
  return TimeGrid(std::move(p));
}

TimeGrid TimeGrid::through(std::vector<double> times, double tol) {
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  std::vector<double> p;
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("negative time in grid");
    if (p.empty() || t - p.back() > tol) p.push_back(t);
  }
  return TimeGrid(std::move(p));
}

bool TimeGrid::is_uniform(double rtol) const {
  double h = horizon() / static_cast<double>(steps());
  for (std::size_t k = 0; k < steps(); ++k) {
    if (std::abs(step(k) - h) > rtol * h) return false;
  }
  return true;
}

std::optional<std::size_t> TimeGrid::index_of(double t, double tol) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t - tol);
  if (it != points_.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - points_.begin());
  return std::nullopt;
}

std::size_t TimeGrid::require_index(double t, double tol) const {
  auto k = index_of(t, tol);
  if (!k) throw std::invalid_argument("time " + std::to_string(t) + " is not a grid point");
  return *k;
}

TimeGrid TimeGrid::coarsen(std::size_t stride) const {
  if (stride == 0 || steps() % stride != 0) {
    throw std::invalid_argument("coarsening stride must divide the number of steps");
  }
  std::vector<double> p;
  for (std::size_t k = 0; k < size(); k += stride) p.push_back(points_[k]);
  return TimeGrid(std::move(p));
}

}  // namespace fracnelson::core
