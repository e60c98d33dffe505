#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace fracnelson::core {

/// Strictly increasing time points 0 = t_0 < t_1 < ... < t_n = T.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// n equal steps on [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t steps);

  /// Grid through the given times (0 is added; duplicates within `tol` merged).
  static TimeGrid through(std::vector<double> times, double tol = 1e-12);

  std::span<const double> points() const noexcept { return points_; }
  double operator[](std::size_t k) const { return points_[k]; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t steps() const noexcept { return points_.size() - 1; }
  double horizon() const noexcept { return points_.back(); }
  double mesh() const noexcept { return mesh_; }
  double step(std::size_t k) const { return points_[k + 1] - points_[k]; }

  bool is_uniform(double rtol = 1e-9) const;

  /// Index of a grid point within `tol` of t, if any.
  std::optional<std::size_t> index_of(double t, double tol = 1e-9) const;
  /// As index_of, but throws std::invalid_argument when t is not a grid point.
  std::size_t require_index(double t, double tol = 1e-9) const;

  /// Every `stride`-th point; the last point must be kept.
  TimeGrid coarsen(std::size_t stride) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.points_ == b.points_; }

 private:
  std::vector<double> points_;
  double mesh_ = 0.0;
};

}  // namespace fracnelson::core
