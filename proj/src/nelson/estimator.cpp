#include "fracnelson/nelson/estimator.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "fracnelson/nelson/gaussian.h"

namespace fracnelson::nelson {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Increment {
  std::size_t from, to;
  double h;
};

Increment increment(const TimeGrid& g, double t, double h, Direction d) {
  std::size_t k = g.require_index(t);
  std::size_t j = g.require_index(d == Direction::forward ? t + h : t - h);
  return d == Direction::forward ? Increment{k, j, h} : Increment{j, k, h};
}

VectorXd responses(const core::PathEnsemble& e, const Increment& inc) {
  VectorXd y(static_cast<Eigen::Index>(e.n_paths()));
  for (std::size_t i = 0; i < e.n_paths(); ++i)
    y(static_cast<Eigen::Index>(i)) = (e.value(i, inc.to) - e.value(i, inc.from)) / inc.h;
  return y;
}

MatrixXd conditioning(const core::PathEnsemble& e, const SigmaFieldSpec& spec, double h) {
  const auto m = static_cast<Eigen::Index>(e.n_paths());
  if (spec.kind == SigmaFieldSpec::Kind::function) {
    MatrixXd q(m, static_cast<Eigen::Index>(spec.dimension));
    for (Eigen::Index i = 0; i < m; ++i) {
      auto v = spec.evaluator(e.path(static_cast<std::size_t>(i)), e.grid());
      if (v.size() != spec.dimension) throw std::invalid_argument("sigma-field evaluator returned a wrong dimension");
      for (Eigen::Index j = 0; j < q.cols(); ++j) q(i, j) = v[static_cast<std::size_t>(j)];
    }
    return q;
  }
  auto times = spec.times_for(h);
  std::vector<std::size_t> idx;
  for (double u : times) {
    if (u < -1e-12) throw std::invalid_argument("conditioning time before 0");
    idx.push_back(e.grid().require_index(std::max(u, 0.0)));
  }
  MatrixXd q(m, static_cast<Eigen::Index>(idx.size()));
  for (Eigen::Index i = 0; i < m; ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      q(i, static_cast<Eigen::Index>(j)) = e.value(static_cast<std::size_t>(i), idx[j]);
  return q;
}

// Driver increments on [t, t+h], which are independent of any past-measurable
// conditioning variable and hence have conditional mean zero. Contiguous columns
// are summed into at most `max` groups.
MatrixXd controls(const core::PathEnsemble& e, const Increment& inc, Direction d, const SigmaFieldSpec& spec,
                  const EstimatorConfig& cfg) {
  const auto m = static_cast<Eigen::Index>(e.n_paths());
  if (!cfg.control_variates || d != Direction::forward || !spec.past_measurable || !e.has_driver() ||
      cfg.max_control_variates == 0)
    return MatrixXd(m, 0);
  std::size_t first = inc.from, last = inc.to;  // driver columns [first, last)
  std::size_t n = last - first;
  std::size_t groups = std::min(n, cfg.max_control_variates);
  MatrixXd c = MatrixXd::Zero(m, static_cast<Eigen::Index>(groups));
  for (Eigen::Index i = 0; i < m; ++i) {
    auto dw = e.driver(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < n; ++j) c(i, static_cast<Eigen::Index>(j * groups / n)) += dw[first + j];
  }
  return c;
}

// Products of the controls with powers of the standardized conditioning variable.
MatrixXd interact(const MatrixXd& c, const VectorXd& v, std::size_t degree) {
  if (c.cols() == 0 || degree == 0) return c;
  const double m = static_cast<double>(v.size());
  double mean = v.mean();
  double sd = std::sqrt((v.array() - mean).square().sum() / std::max(1.0, m - 1.0));
  if (!(sd > 0.0)) return c;
  VectorXd z = (v.array() - mean) / sd;
  MatrixXd out(c.rows(), c.cols() * static_cast<Eigen::Index>(degree + 1));
  VectorXd pw = VectorXd::Ones(v.size());
  for (std::size_t d = 0; d <= degree; ++d) {
    out.middleCols(static_cast<Eigen::Index>(d) * c.cols(), c.cols()) = c.array().colwise() * pw.array();
    pw = pw.cwiseProduct(z);
  }
  return out;
}

std::vector<std::size_t> assign(const BinLattice& bins, const VectorXd& v) {
  std::vector<std::size_t> out(static_cast<std::size_t>(v.size()));
  const std::size_t nb = bins.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (bins.width <= 0.0) {
      out[static_cast<std::size_t>(i)] = 0;
      continue;
    }
    double u = std::floor((v(i) - bins.origin) / bins.width);
    auto b = u < 0.0 ? std::size_t{0} : static_cast<std::size_t>(u);
    out[static_cast<std::size_t>(i)] = std::min(b, nb - 1);
  }
  return out;
}

BinLattice make_bins(const VectorXd& v, const EstimatorConfig& cfg) {
  BinLattice bins;
  const double m = static_cast<double>(v.size());
  double mean = v.mean();
  double sd = std::sqrt((v.array() - mean).square().sum() / std::max(1.0, m - 1.0));
  double lo = v.minCoeff(), hi = v.maxCoeff();
  double width = cfg.bandwidth_factor * std::pow(m, -0.2) * sd;
  std::size_t nb = 1;
  if (width > 0.0 && hi > lo) {
    nb = static_cast<std::size_t>(std::floor((hi - lo) / width)) + 1;
  } else {
    width = 0.0;
  }
  bins.origin = lo;
  bins.width = width;
  bins.count.assign(nb, 0);
  bins.mean.assign(nb, 0.0);
  auto idx = assign(bins, v);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    ++bins.count[idx[static_cast<std::size_t>(i)]];
    bins.mean[idx[static_cast<std::size_t>(i)]] += v(i);
  }
  bins.valid.assign(nb, false);
  for (std::size_t b = 0; b < nb; ++b) {
    if (bins.count[b] > 0) bins.mean[b] /= static_cast<double>(bins.count[b]);
    bins.valid[b] = bins.count[b] >= cfg.min_bin_count;
  }
  return bins;
}

struct BinStats {
  BinnedEstimate est;
  double pooled_variance = 0.0;  // within-bin residual variance
  double variance = 0.0;         // noise-corrected variance of the bin means
  double variance_se = 0.0;
  double n_valid = 0.0;          // paths in valid bins
  std::size_t n_bins = 0;        // valid bins
};

BinStats bin_stats(const VectorXd& y, const std::vector<std::size_t>& idx, const BinLattice& bins) {
  const std::size_t nb = bins.size();
  std::vector<double> sum(nb, 0.0), sq(nb, 0.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) sum[idx[static_cast<std::size_t>(i)]] += y(i);
  BinStats s;
  s.est.value.assign(nb, std::nan(""));
  s.est.se.assign(nb, std::nan(""));
  for (std::size_t b = 0; b < nb; ++b)
    if (bins.count[b] > 0) s.est.value[b] = sum[b] / static_cast<double>(bins.count[b]);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    auto b = idx[static_cast<std::size_t>(i)];
    double d = y(i) - s.est.value[b];
    sq[b] += d * d;
  }
  double within = 0.0, grand = 0.0;
  std::size_t dof = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (!bins.valid[b]) continue;
    double n = static_cast<double>(bins.count[b]);
    s.est.se[b] = std::sqrt(sq[b] / (n - 1.0) / n);
    within += sq[b];
    dof += bins.count[b] - 1;
    s.n_valid += n;
    grand += sum[b];
    ++s.n_bins;
  }
  if (s.n_bins == 0) return s;
  s.pooled_variance = dof > 0 ? within / static_cast<double>(dof) : 0.0;
  grand /= s.n_valid;
  double between = 0.0, var_se2 = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (!bins.valid[b]) continue;
    double n = static_cast<double>(bins.count[b]);
    double d = s.est.value[b] - grand;
    between += n * d * d;
    double se2 = s.est.se[b] * s.est.se[b];
    double f = n / s.n_valid;
    var_se2 += 4.0 * f * f * d * d * se2 + 2.0 * f * f * se2 * se2;
  }
  s.variance = between / s.n_valid - static_cast<double>(s.n_bins - 1) * s.pooled_variance / s.n_valid;
  s.variance_se = std::sqrt(var_se2);
  return s;
}

// y - C beta with beta from the within-bin regression of y on C.
VectorXd apply_controls_binned(const VectorXd& y, const MatrixXd& c, const std::vector<std::size_t>& idx,
                               const BinLattice& bins) {
  if (c.cols() == 0) return y;
  const std::size_t nb = bins.size();
  VectorXd ybar = VectorXd::Zero(static_cast<Eigen::Index>(nb));
  MatrixXd cbar = MatrixXd::Zero(static_cast<Eigen::Index>(nb), c.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    auto b = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]);
    ybar(b) += y(i);
    cbar.row(b) += c.row(i);
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (bins.count[b] == 0) continue;
    ybar(static_cast<Eigen::Index>(b)) /= static_cast<double>(bins.count[b]);
    cbar.row(static_cast<Eigen::Index>(b)) /= static_cast<double>(bins.count[b]);
  }
  MatrixXd cc = MatrixXd::Zero(c.cols(), c.cols());
  VectorXd cy = VectorXd::Zero(c.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    auto b = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]);
    VectorXd dc = (c.row(i) - cbar.row(b)).transpose();
    cc.selfadjointView<Eigen::Lower>().rankUpdate(dc);
    cy += dc * (y(i) - ybar(b));
  }
  cc = cc.selfadjointView<Eigen::Lower>();
  VectorXd beta = cc.ldlt().solve(cy);
  return y - c * beta;
}

// Bins holding at least `factor` paths per control get their own coefficients
// (on the plain controls); the remaining bins keep the pooled adjustment.
void localize_controls(VectorXd& adj, const VectorXd& y, const MatrixXd& c, const std::vector<std::size_t>& idx,
                       const BinLattice& bins, double factor) {
  const Eigen::Index q = c.cols();
  if (q == 0 || factor <= 0.0) return;
  std::vector<std::vector<Eigen::Index>> members(bins.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) members[idx[static_cast<std::size_t>(i)]].push_back(i);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const auto& mem = members[b];
    if (static_cast<double>(mem.size()) < factor * static_cast<double>(q)) continue;
    const auto n = static_cast<Eigen::Index>(mem.size());
    MatrixXd cb(n, q);
    VectorXd yb(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      cb.row(k) = c.row(mem[static_cast<std::size_t>(k)]);
      yb(k) = y(mem[static_cast<std::size_t>(k)]);
    }
    MatrixXd cc = cb.rowwise() - cb.colwise().mean();
    VectorXd beta = (cc.transpose() * cc).ldlt().solve(cc.transpose() * (yb.array() - yb.mean()).matrix());
    VectorXd out = yb - cb * beta;
    for (Eigen::Index k = 0; k < n; ++k) adj(mem[static_cast<std::size_t>(k)]) = out(k);
  }
}

struct LinearFit {
  LinearEstimate est;
  VectorXd fitted;       // intercept + conditioning part
  double variance = 0.0; // noise-corrected variance of the conditional estimator
  double variance_se = 0.0;
  VectorXd adjusted;     // y minus the control-variate part
};

LinearFit linear_fit(const VectorXd& y, const MatrixXd& q, const MatrixXd& c) {
  const Eigen::Index m = y.size(), d = q.cols(), r = c.cols();
  const Eigen::Index p = 1 + d + r;
  if (m <= p + 1) throw std::invalid_argument("too few paths for the regression");
  MatrixXd x(m, p);
  x.col(0).setOnes();
  x.middleCols(1, d) = q;
  if (r > 0) x.rightCols(r) = c;
  Eigen::HouseholderQR<MatrixXd> qr(x);
  VectorXd beta = qr.solve(y);
  MatrixXd rmat = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  MatrixXd rinv = rmat.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
  MatrixXd cov_unit = rinv * rinv.transpose();
  VectorXd resid = y - x * beta;
  double s2 = resid.squaredNorm() / static_cast<double>(m - p);

  LinearFit f;
  f.est.residual_variance = s2;
  for (Eigen::Index j = 0; j < 1 + d; ++j) {
    f.est.coefficients.push_back(beta(j));
    f.est.se.push_back(std::sqrt(s2 * cov_unit(j, j)));
  }
  f.fitted = x.leftCols(1 + d) * beta.head(1 + d);
  f.adjusted = r > 0 ? VectorXd(y - c * beta.tail(r)) : y;

  // variance of the conditioning part, with the estimation noise removed
  VectorXd bc = beta.segment(1, d);
  MatrixXd qc = q.rowwise() - q.colwise().mean();
  MatrixXd sigma = qc.transpose() * qc / static_cast<double>(m - 1);
  MatrixXd cov_b = s2 * cov_unit.block(1, 1, d, d);
  double raw = bc.dot(sigma * bc);
  MatrixXd sc = sigma * cov_b;
  f.variance = raw - sc.trace();
  double v2 = 4.0 * bc.dot(sigma * cov_b * sigma * bc) + 2.0 * (sc * sc).trace();
  f.variance_se = std::sqrt(std::max(0.0, v2));
  return f;
}

std::vector<double> default_exponents(const EstimatorConfig& cfg) {
  if (!cfg.exponents.empty()) return cfg.exponents;
  if (cfg.hurst && *cfg.hurst > 0.5) return {std::min(1.0, 2.0 * *cfg.hurst - 1.0)};
  return {1.0};
}

// Local-linear smoother of the bin means, evaluated at the valid bins. With
// `leave_out`, bin a is dropped from its own fit.
std::vector<double> smooth(const BinLattice& bins, const BinnedEstimate& est, double bw, bool leave_out = false) {
  std::vector<double> out(bins.size(), std::nan(""));
  for (std::size_t a = 0; a < bins.size(); ++a) {
    if (!bins.valid[a]) continue;
    double x = bins.mean[a];
    double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (!bins.valid[b] || (leave_out && b == a)) continue;
      double d = bins.mean[b] - x;
      double u = bw > 0.0 ? d / bw : 0.0;
      double w = static_cast<double>(bins.count[b]) * std::exp(-0.5 * u * u);
      s0 += w;
      s1 += w * d;
      s2 += w * d * d;
      t0 += w * est.value[b];
      t1 += w * d * est.value[b];
    }
    if (s0 == 0.0) continue;
    double det = s0 * s2 - s1 * s1;
    out[a] = (s2 > 0.0 && std::abs(det) > 1e-12 * s0 * s2) ? (s2 * t0 - s1 * t1) / det : t0 / s0;
  }
  return out;
}

// Bandwidth (in bin widths) minimizing the count-weighted leave-one-out error.
double select_bandwidth(const BinLattice& bins, const BinnedEstimate& est) {
  static constexpr double candidates[] = {0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  double best = 2.0, best_score = std::numeric_limits<double>::infinity();
  for (double c : candidates) {
    auto loo = smooth(bins, est, c * bins.width, true);
    double score = 0.0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (!bins.valid[b] || std::isnan(loo[b])) continue;
      double d = est.value[b] - loo[b];
      score += static_cast<double>(bins.count[b]) * d * d;
    }
    if (score < best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

void set_slope(LadderStep& step, const VectorXd& y, const VectorXd& v) {
  MatrixXd q(v.size(), 1);
  q.col(0) = v;
  if (v.maxCoeff() == v.minCoeff()) return;
  auto f = linear_fit(y, q, MatrixXd(v.size(), 0));
  step.slope = f.est.coefficients[1];
  step.slope_se = f.est.se[1];
}

}  // namespace

BinnedFunction binned_conditional_mean(std::span<const double> y, std::span<const double> v,
                                       const EstimatorConfig& config) {
  if (y.size() != v.size() || y.empty()) throw std::invalid_argument("binned mean needs matching non-empty samples");
  Eigen::Map<const VectorXd> vy(y.data(), static_cast<Eigen::Index>(y.size()));
  Eigen::Map<const VectorXd> vv(v.data(), static_cast<Eigen::Index>(v.size()));
  BinnedFunction f;
  f.bins = make_bins(vv, config);
  f.estimate = bin_stats(vy, assign(f.bins, vv), f.bins).est;
  return f;
}

LadderStep regress_conditional(const core::PathEnsemble& e, double t, double h, Direction direction,
                               const SigmaFieldSpec& spec, BinLattice& bins, const EstimatorConfig& config) {
  auto inc = increment(e.grid(), t, h, direction);
  VectorXd y = responses(e, inc);
  MatrixXd q = conditioning(e, spec, h);
  MatrixXd c = controls(e, inc, direction, spec, config);
  LadderStep step;
  step.h = h;
  if (spec.scalar()) {
    VectorXd v = q.col(0);
    MatrixXd raw = c;
    c = interact(c, v, config.control_variate_degree);
    step.control_variates = static_cast<std::size_t>(c.cols());
    if (bins.size() == 0) bins = make_bins(v, config);
    auto idx = assign(bins, v);
    VectorXd adj = apply_controls_binned(y, c, idx, bins);
    localize_controls(adj, y, raw, idx, bins, config.local_control_factor);
    auto s = bin_stats(adj, idx, bins);
    step.binned = s.est;
    step.variance = s.variance;
    set_slope(step, adj, v);
  } else {
    step.control_variates = static_cast<std::size_t>(c.cols());
    auto f = linear_fit(y, q, c);
    step.linear = f.est;
    step.variance = f.variance;
  }
  return step;
}

DerivativeReport estimate_derivative(const core::PathEnsemble& e, const SigmaFieldSpec& spec, double t,
                                     const HLadder& ladder, const EstimatorConfig& config) {
  if (spec.kind == SigmaFieldSpec::Kind::future && ladder.direction() == Direction::forward && spec.lattice == 0)
    for (double u : spec.times)
      if (u > t + 1e-12 && u < t + ladder[0] - 1e-12)
        throw std::invalid_argument("future conditioning time inside the forward increment");
  DerivativeReport r;
  r.t = t;
  r.direction = ladder.direction();
  r.spec_name = spec.name;
  r.scalar = spec.scalar();
  r.exponents = default_exponents(config);

  const std::size_t L = ladder.size();
  const auto m = static_cast<Eigen::Index>(e.n_paths());
  MatrixXd adjusted(m, static_cast<Eigen::Index>(L));
  MatrixXd q_last;
  std::vector<std::size_t> idx;

  for (std::size_t j = 0; j < L; ++j) {
    double h = ladder[j];
    auto inc = increment(e.grid(), t, h, ladder.direction());
    VectorXd y = responses(e, inc);
    MatrixXd q = conditioning(e, spec, h);
    MatrixXd c = controls(e, inc, ladder.direction(), spec, config);
    LadderStep step;
    step.h = h;
    if (r.scalar) {
      VectorXd v = q.col(0);
      MatrixXd raw = c;
      c = interact(c, v, config.control_variate_degree);
      step.control_variates = static_cast<std::size_t>(c.cols());
      if (j == 0) {
        r.bins = make_bins(v, config);
        idx = assign(r.bins, v);
      }
      VectorXd adj = apply_controls_binned(y, c, idx, r.bins);
      localize_controls(adj, y, raw, idx, r.bins, config.local_control_factor);
      auto s = bin_stats(adj, idx, r.bins);
      step.binned = s.est;
      step.variance = s.variance;
      set_slope(step, adj, v);
      adjusted.col(static_cast<Eigen::Index>(j)) = adj;
    } else {
      step.control_variates = static_cast<std::size_t>(c.cols());
      auto f = linear_fit(y, q, c);
      step.linear = f.est;
      step.variance = f.variance;
      adjusted.col(static_cast<Eigen::Index>(j)) = f.adjusted;
      if (j + 1 == L) q_last = q;
    }
    r.steps.push_back(std::move(step));
  }

  // divergence: variance growth over consecutive ladder steps
  std::size_t run = 0;
  bool divergent = false;
  for (std::size_t j = 1; j < L; ++j) {
    double a = r.steps[j - 1].variance, b = r.steps[j].variance;
    double ratio = a > 0.0 ? b / a : std::nan("");
    r.variance_ratios.push_back(ratio);
    if (a > 0.0 && b >= config.divergence_growth * a) {
      if (++run >= config.divergence_steps) divergent = true;
    } else {
      run = 0;
    }
  }

  // extrapolated limit, path by path
  std::vector<double> steps(ladder.steps().begin(), ladder.steps().end());
  bool can_extrapolate = L >= r.exponents.size() + 1;
  VectorXd z = VectorXd::Zero(m);
  if (can_extrapolate) {
    r.extrapolation_weights = extrapolation_weights(steps, r.exponents);
    for (std::size_t j = 0; j < L; ++j) z += r.extrapolation_weights[j] * adjusted.col(static_cast<Eigen::Index>(j));
  } else {
    r.extrapolation_weights.assign(L, 0.0);
    r.extrapolation_weights.back() = 1.0;
    z = adjusted.col(static_cast<Eigen::Index>(L - 1));
  }

  // Cauchy gap between the two-point extrapolations of the last two step pairs
  bool cauchy = false;
  if (L >= 3) {
    const double e0[1] = {r.exponents.front()};
    const double s1[2] = {steps[L - 2], steps[L - 1]};
    const double s0[2] = {steps[L - 3], steps[L - 2]};
    auto w1 = extrapolation_weights(s1, e0);
    auto w0 = extrapolation_weights(s0, e0);
    VectorXd g = w1[0] * adjusted.col(static_cast<Eigen::Index>(L - 2)) +
                 w1[1] * adjusted.col(static_cast<Eigen::Index>(L - 1)) -
                 w0[0] * adjusted.col(static_cast<Eigen::Index>(L - 3)) -
                 w0[1] * adjusted.col(static_cast<Eigen::Index>(L - 2));
    double gap2 = 0.0, se2 = 0.0;
    if (r.scalar) {
      auto s = bin_stats(g, idx, r.bins);
      for (std::size_t b = 0; b < r.bins.size(); ++b) {
        if (!r.bins.valid[b]) continue;
        double f = static_cast<double>(r.bins.count[b]) / s.n_valid;
        gap2 += f * s.est.value[b] * s.est.value[b];
        se2 += f * s.est.se[b] * s.est.se[b];
      }
    } else {
      auto f = linear_fit(g, q_last, MatrixXd(m, 0));
      gap2 = f.fitted.squaredNorm() / static_cast<double>(m);
      se2 = static_cast<double>(q_last.cols() + 1) * f.est.residual_variance / static_cast<double>(m);
    }
    r.cauchy_gap = std::sqrt(gap2);
    r.cauchy_tolerance = std::max(config.cauchy_floor, config.cauchy_se_multiple * std::sqrt(se2));
    cauchy = r.cauchy_gap <= r.cauchy_tolerance;
  }
  r.verdict = divergent ? Verdict::divergent : (cauchy ? Verdict::convergent : Verdict::inconclusive);

  if (r.scalar) {
    auto s = bin_stats(z, idx, r.bins);
    r.limit = s.est;
    r.limit_variance = s.variance;
    r.limit_variance_se = s.variance_se;
    double bins_used = config.smoother_bins > 0.0 ? config.smoother_bins : select_bandwidth(r.bins, r.limit);
    r.smoother_bandwidth = bins_used * r.bins.width;
    r.value_model = smooth(r.bins, r.limit, r.smoother_bandwidth);
  } else {
    auto f = linear_fit(z, q_last, MatrixXd(m, 0));
    r.limit_linear = f.est;
    r.limit_variance = f.variance;
    r.limit_variance_se = f.variance_se;
  }
  r.nondegenerate = r.limit_variance > config.nondegeneracy_z * r.limit_variance_se && r.limit_variance > 0.0;
  return r;
}

namespace {

double l2(const DerivativeReport& r, const std::vector<double>& a, const std::function<double(double)>& truth) {
  if (!r.scalar) throw std::logic_error("relative L2 error needs a scalar conditioning variable");
  double num = 0.0, den = 0.0;
  for (std::size_t b = 0; b < r.bins.size(); ++b) {
    if (!r.bins.valid[b]) continue;
    double n = static_cast<double>(r.bins.count[b]);
    double f = truth(r.bins.mean[b]);
    num += n * (a[b] - f) * (a[b] - f);
    den += n * f * f;
  }
  return std::sqrt(num / den);
}

}  // namespace

double relative_l2_error(const DerivativeReport& r, const std::function<double(double)>& truth) {
  return l2(r, r.value_model, truth);
}

double relative_l2_error_raw(const DerivativeReport& r, const std::function<double(double)>& truth) {
  return l2(r, r.limit.value, truth);
}

}  // namespace fracnelson::nelson
