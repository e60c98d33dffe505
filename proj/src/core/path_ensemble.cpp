#include "fracnelson/core/path_ensemble.h"

#include <cmath>
#include <stdexcept>

namespace fracnelson::core {

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t n_paths, std::vector<double> values,
                           std::optional<std::vector<double>> driver, std::string label)
    : grid_(std::move(grid)), n_paths_(n_paths), values_(std::move(values)), driver_(std::move(driver)),
      label_(std::move(label)) {
  if (n_paths_ == 0) throw std::invalid_argument("ensemble needs at least one path");
  if (values_.size() != n_paths_ * grid_.size()) throw std::invalid_argument("ensemble value count mismatch");
  if (driver_ && driver_->size() != n_paths_ * grid_.steps()) {
    throw std::invalid_argument("ensemble driver count mismatch");
  }
}

std::span<const double> PathEnsemble::driver(std::size_t i) const {
  if (!driver_) throw std::logic_error("ensemble has no driver");
  return {driver_->data() + i * grid_.steps(), grid_.steps()};
}

std::span<const double> PathEnsemble::driver_values() const {
  if (!driver_) throw std::logic_error("ensemble has no driver");
  return *driver_;
}

std::vector<double> PathEnsemble::column(std::size_t k) const {
  std::vector<double> c(n_paths_);
  for (std::size_t i = 0; i < n_paths_; ++i) c[i] = value(i, k);
  return c;
}

}  // namespace fracnelson::core
