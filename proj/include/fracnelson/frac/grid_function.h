#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fracnelson/core/time_grid.h"

namespace fracnelson::frac {

using core::TimeGrid;

/// How a GridFunction is read between grid points. `step` is left-continuous:
/// on (t_k, t_{k+1}] the value is the sample at t_{k+1}, so 1_{[0, t_m]} is exact.
enum class Interpolation { linear, step };

/// Samples of a function on a TimeGrid.
class GridFunction {
 public:
  GridFunction(TimeGrid grid, std::vector<double> samples, Interpolation rule = Interpolation::linear);

  static GridFunction sample(const TimeGrid& grid, const std::function<double(double)>& f,
                             Interpolation rule = Interpolation::linear);
  static GridFunction zero(const TimeGrid& grid);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t k) const { return samples_[k]; }
  std::size_t size() const noexcept { return samples_.size(); }
  Interpolation rule() const noexcept { return rule_; }

  /// Interpolated value at x in [0, T].
  double operator()(double x) const;

  /// Value at the left (near = false) or right end of cell k as seen from inside the cell.
  double cell_left(std::size_t k) const;
  double cell_right(std::size_t k) const;

  /// Grid point where the operator that produced this function is singular. The
  /// sample stored there is a linear extrapolation from its neighbours, not a value
  /// of the operator.
  std::optional<std::size_t> singular_point() const noexcept { return singular_; }
  GridFunction with_singular_point(std::size_t k) const;

  GridFunction with_rule(Interpolation rule) const;

 private:
  TimeGrid grid_;
  std::vector<double> samples_;
  Interpolation rule_;
  std::optional<std::size_t> singular_;
};

/// Two-column CSV (t,value).
void write_csv(std::ostream& out, const GridFunction& f);
GridFunction read_grid_function_csv(std::istream& in);

}  // namespace fracnelson::frac
