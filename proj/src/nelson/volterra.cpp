#include "fracnelson/nelson/volterra.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracnelson/core/errors.h"

namespace fracnelson::nelson {

namespace {

struct NonFinite {
  double t, s;
};

double derivative(const frac::KernelSpec& k, double t, double s, const RefinementSchedule& sch) {
  double d;
  try {
    if (k.has_right_dt()) {
      d = k.right_dt(t, s);
    } else {
      double h = sch.fd_steps.empty() ? 1e-5 : sch.fd_steps.back();
      d = (k(t + h, s) - k(t, s)) / h;
    }
  } catch (const KernelEvaluationError&) {
    throw NonFinite{t, s};
  }
  if (!std::isfinite(d)) throw NonFinite{t, s};
  return d;
}

double squared_integral(const frac::KernelSpec& k, double t, double a, double b, const RefinementSchedule& sch) {
  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  auto f = [&](double s) {
    double d = derivative(k, t, s, sch);
    return d * d;
  };
  double err = 0.0;
  double v = ts.integrate(f, a, b, 1e-10, &err);
  if (!std::isfinite(v)) throw NonFinite{t, 0.5 * (a + b)};
  return v;
}

}  // namespace

double DerivativeFunctional::operator()(std::span<const double> dw) const {
  if (dw.size() != weights.size()) throw std::invalid_argument("driver row does not match the grid");
  double s = 0.0;
  for (std::size_t j = 0; j < dw.size(); ++j) s += weights[j] * dw[j];
  return s;
}

CriterionResult volterra_criterion(const frac::KernelSpec& k, double t, const RefinementSchedule& sch) {
  if (!(t > 0.0)) throw std::invalid_argument("criterion needs t > 0");
  if (!(sch.first_fraction > 0.0 && sch.first_fraction < 1.0) || !(sch.ratio > 1.0) || sch.levels < 2)
    throw std::invalid_argument("bad refinement schedule");
  CriterionResult r;
  try {
    double delta = sch.first_fraction * t;
    double total = squared_integral(k, t, 0.0, t - delta, sch);
    r.deltas.push_back(delta);
    r.integrals.push_back(total);
    for (std::size_t m = 0; m < sch.levels; ++m) {
      double next = delta / sch.ratio;
      total += squared_integral(k, t, t - delta, t - next, sch);
      delta = next;
      r.deltas.push_back(delta);
      r.integrals.push_back(total);
    }
  } catch (const NonFinite& e) {
    r.verdict = Verdict::divergent;
    r.singular_at = std::make_pair(e.t, e.s);
    std::ostringstream os;
    os << "non-finite derivative at (t, s) = (" << e.t << ", " << e.s << ")";
    r.note = os.str();
    return r;
  }

  const auto& in = r.integrals;
  const std::size_t n = in.size();
  if (in.back() == 0.0) {
    r.verdict = Verdict::convergent;
    r.note = "derivative vanishes";
    return r;
  }
  std::vector<double> inc;
  for (std::size_t m = 1; m < n; ++m) inc.push_back(in[m] - in[m - 1]);
  std::size_t growing = 0;
  for (std::size_t m = inc.size() - sch.growth_steps; m < inc.size(); ++m)
    if (inc[m] > 0.0 && inc[m] >= sch.growth_ratio * inc[m - 1]) ++growing;
  if (growing == sch.growth_steps) {
    r.verdict = Verdict::divergent;
    r.note = "increments do not shrink";
  } else if (std::abs(inc.back()) <= sch.cauchy_tolerance * std::abs(in.back())) {
    r.verdict = Verdict::convergent;
    r.note = "Cauchy";
  } else {
    r.verdict = Verdict::inconclusive;
  }
  return r;
}

std::optional<DerivativeFunctional> derivative_functional(const frac::KernelSpec& k, double t,
                                                          const core::TimeGrid& grid,
                                                          const RefinementSchedule& schedule) {
  if (volterra_criterion(k, t, schedule).verdict != Verdict::convergent) return std::nullopt;
  DerivativeFunctional f{grid, std::vector<double>(grid.steps(), 0.0)};
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    if (grid[j + 1] > t + 1e-12) break;
    f.weights[j] = derivative(k, t, 0.5 * (grid[j] + grid[j + 1]), schedule);
  }
  return f;
}

XiResult xi_statistic(const frac::KernelSpec& k, const core::TimeGrid& grid, const RefinementSchedule& schedule) {
  XiResult x;
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    double t = 0.5 * (grid[j] + grid[j + 1]);
    auto v = volterra_criterion(k, t, schedule).verdict;
    x.times.push_back(t);
    x.verdicts.push_back(v);
    if (v == Verdict::convergent) x.value += grid.step(j);
    if (v == Verdict::inconclusive) x.inconclusive += grid.step(j);
  }
  return x;
}

}  // namespace fracnelson::nelson
