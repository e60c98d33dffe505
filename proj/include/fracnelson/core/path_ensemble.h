#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracnelson/core/time_grid.h"

namespace fracnelson::core {

/// M sample paths of a process on a shared grid, stored row-major (one row per path).
/// The optional driver holds the Brownian increments that produced each path:
/// driver column j belongs to the step [t_j, t_{j+1}].
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t n_paths, std::vector<double> values,
               std::optional<std::vector<double>> driver, std::string label);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t n_points() const noexcept { return grid_.size(); }
  const std::string& label() const noexcept { return label_; }

  std::span<const double> path(std::size_t i) const {
    return {values_.data() + i * n_points(), n_points()};
  }
  double value(std::size_t i, std::size_t k) const { return values_[i * n_points() + k]; }
  std::span<const double> values() const noexcept { return values_; }

  bool has_driver() const noexcept { return driver_.has_value(); }
  /// Driver row of path i (n entries). Throws std::logic_error without a driver.
  std::span<const double> driver(std::size_t i) const;
  std::span<const double> driver_values() const;

  /// Values of all paths at grid index k.
  std::vector<double> column(std::size_t k) const;

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<double> values_;
  std::optional<std::vector<double>> driver_;
  std::string label_;
};

}  // namespace fracnelson::core
