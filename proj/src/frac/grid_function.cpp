#include "fracnelson/frac/grid_function.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fracnelson/core/ensemble_io.h"
#include "fracnelson/core/errors.h"

namespace fracnelson::frac {

GridFunction::GridFunction(TimeGrid grid, std::vector<double> samples, Interpolation rule)
    : grid_(std::move(grid)), samples_(std::move(samples)), rule_(rule) {
  if (samples_.size() != grid_.size()) throw std::invalid_argument("grid function length does not match grid");
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!std::isfinite(samples_[k])) {
      throw std::invalid_argument("grid function sample " + std::to_string(k) + " is not finite");
    }
  }
}

GridFunction GridFunction::sample(const TimeGrid& grid, const std::function<double(double)>& f,
                                  Interpolation rule) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = f(grid[k]);
  return GridFunction(grid, std::move(v), rule);
}

GridFunction GridFunction::zero(const TimeGrid& grid) {
  return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

double GridFunction::operator()(double x) const {
  auto pts = grid_.points();
  if (x <= pts.front()) return samples_.front();
  if (x >= pts.back()) return samples_.back();
  auto it = std::upper_bound(pts.begin(), pts.end(), x);
  std::size_t k = static_cast<std::size_t>(it - pts.begin()) - 1;  // x in [t_k, t_{k+1})
  if (x == pts[k]) return samples_[k];
  if (rule_ == Interpolation::step) return samples_[k + 1];
  double w = (x - pts[k]) / (pts[k + 1] - pts[k]);
  return (1.0 - w) * samples_[k] + w * samples_[k + 1];
}

double GridFunction::cell_left(std::size_t k) const {
  return rule_ == Interpolation::step ? samples_[k + 1] : samples_[k];
}

double GridFunction::cell_right(std::size_t k) const { return samples_[k + 1]; }

GridFunction GridFunction::with_singular_point(std::size_t k) const {
  GridFunction g = *this;
  g.singular_ = k;
  return g;
}

GridFunction GridFunction::with_rule(Interpolation rule) const {
  GridFunction g = *this;
  g.rule_ = rule;
  return g;
}

void write_csv(std::ostream& out, const GridFunction& f) {
  out << "t,value\r\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    out << core::format_double(f.grid()[k]) << ',' << core::format_double(f[k]) << "\r\n";
  }
}

GridFunction read_grid_function_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value") throw FormatError("grid function CSV header must be t,value");
  std::vector<double> t, v;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("grid function CSV row without comma: " + line);
    try {
      t.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw FormatError("grid function CSV row is not numeric: " + line);
    }
  }
  return GridFunction(TimeGrid(std::move(t)), std::move(v));
}

}  // namespace fracnelson::frac
