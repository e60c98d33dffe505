#include "fracnelson/nelson/types.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracnelson::nelson {

std::string to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "convergent";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SigmaFieldSpec SigmaFieldSpec::present(double t) {
  SigmaFieldSpec s;
  s.kind = Kind::present;
  s.anchor = t;
  s.name = "present";
  return s;
}

SigmaFieldSpec SigmaFieldSpec::past(double t, std::vector<double> times) {
  if (times.empty()) throw std::invalid_argument("past sigma-field needs at least one time");
  for (double u : times)
    if (u > t + 1e-12) throw std::invalid_argument("past conditioning time beyond the anchor");
  SigmaFieldSpec s;
  s.kind = Kind::past;
  s.anchor = t;
  s.dimension = times.size();
  s.times = std::move(times);
  s.name = "past";
  return s;
}

SigmaFieldSpec SigmaFieldSpec::past_lattice(double t, std::size_t k) {
  if (k == 0) throw std::invalid_argument("past lattice needs k >= 1");
  SigmaFieldSpec s;
  s.kind = Kind::past;
  s.anchor = t;
  s.lattice = k;
  s.dimension = k;
  s.name = "past:" + std::to_string(k);
  return s;
}

SigmaFieldSpec SigmaFieldSpec::future(double t, std::vector<double> times) {
  if (times.empty()) throw std::invalid_argument("future sigma-field needs at least one time");
  for (double u : times)
    if (u < t - 1e-12) throw std::invalid_argument("future conditioning time before the anchor");
  SigmaFieldSpec s;
  s.kind = Kind::future;
  s.anchor = t;
  s.dimension = times.size();
  s.times = std::move(times);
  s.past_measurable = false;
  s.name = "future";
  return s;
}

SigmaFieldSpec SigmaFieldSpec::future_lattice(double t, std::size_t k) {
  if (k == 0) throw std::invalid_argument("future lattice needs k >= 1");
  SigmaFieldSpec s;
  s.kind = Kind::future;
  s.anchor = t;
  s.lattice = k;
  s.dimension = k;
  s.past_measurable = false;
  s.name = "future:" + std::to_string(k);
  return s;
}

SigmaFieldSpec SigmaFieldSpec::even(double t) {
  return function(
      t,
      [t](std::span<const double> path, const TimeGrid& grid) {
        double x = path[grid.require_index(t)];
        return std::vector<double>{x * x};
      },
      1, true, "even");
}

SigmaFieldSpec SigmaFieldSpec::function(double t, Evaluator evaluator, std::size_t dimension, bool past_measurable,
                                        std::string name) {
  if (!evaluator || dimension == 0) throw std::invalid_argument("function sigma-field needs an evaluator");
  SigmaFieldSpec s;
  s.kind = Kind::function;
  s.anchor = t;
  s.evaluator = std::move(evaluator);
  s.dimension = dimension;
  s.past_measurable = past_measurable;
  s.name = std::move(name);
  return s;
}

std::vector<double> SigmaFieldSpec::times_for(double h) const {
  switch (kind) {
    case Kind::present: return {anchor};
    case Kind::function: return {};
    case Kind::past:
    case Kind::future: {
      if (!times.empty()) return times;
      std::vector<double> out;
      double sign = kind == Kind::past ? -1.0 : 1.0;
      for (std::size_t j = 0; j < lattice; ++j) out.push_back(anchor + sign * static_cast<double>(j) * h);
      return out;
    }
  }
  return {};
}

bool SigmaFieldSpec::scalar() const { return dimension == 1; }

HLadder::HLadder(std::vector<double> steps, Direction direction)
    : steps_(std::move(steps)), direction_(direction) {
  if (steps_.empty()) throw std::invalid_argument("empty h-ladder");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!(steps_[i] > 0.0)) throw std::invalid_argument("h-ladder steps must be positive");
    if (i > 0 && !(steps_[i] < steps_[i - 1])) throw std::invalid_argument("h-ladder must be strictly decreasing");
  }
}

double DerivativeReport::evaluate(double x) const {
  if (!scalar) throw std::logic_error("evaluate() needs a scalar conditioning variable");
  // local-linear fit through the valid bins, same weights as the value model
  double bw = std::max(smoother_bandwidth, 1e-300);
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    if (!bins.valid[b]) continue;
    double u = (bins.mean[b] - x) / bw;
    double w = static_cast<double>(bins.count[b]) * std::exp(-0.5 * u * u);
    double d = bins.mean[b] - x;
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    t0 += w * limit.value[b];
    t1 += w * d * limit.value[b];
  }
  if (s0 == 0.0) return std::nan("");
  double det = s0 * s2 - s1 * s1;
  if (std::abs(det) <= 1e-12 * s0 * s2 || s2 == 0.0) return t0 / s0;
  return (s2 * t0 - s1 * t1) / det;
}

}  // namespace fracnelson::nelson
