#include "switchdiff/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace switchdiff {

namespace {

constexpr double kDeviationFloor = 1e-300;

// Below this the measured norm is dominated by roundoff accumulated in the
// segment products, not by the actual deviation; such samples carry no slope
// information and would flatten rate fits.
constexpr double kNoiseFloor = 1e-13;

double projector_distance(const Projector& a, const Projector& b) {
  return weighted_operator_norm(a.matrix - b.matrix, a.mass);
}

}  // namespace

Ensemble::Ensemble(std::vector<OperatorModel> ops,
                   std::vector<std::string> names, double tol)
    : operators(std::move(ops)), labels(std::move(names)), kernel_tol(tol) {
  if (operators.empty())
    throw std::invalid_argument("ensemble needs at least one operator");
  if (!labels.empty() && labels.size() != operators.size())
    throw std::invalid_argument("label count must equal the operator count");
  if (labels.empty())
    for (std::size_t i = 0; i < operators.size(); ++i)
      labels.push_back("state_" + std::to_string(i));

  const int n = operators.front().dim();
  const Eigen::VectorXd& m = operators.front().mass;
  for (const auto& op : operators) {
    if (op.dim() != n)
      throw std::invalid_argument("ensemble operators must share one dimension");
    if ((op.mass - m).cwiseAbs().maxCoeff() > 1e-12 * m.maxCoeff())
      throw std::invalid_argument("ensemble operators must share one mass vector");
    op.validate(1e-11);
  }
  spectra.reserve(operators.size());
  for (const auto& op : operators) spectra.push_back(eigendecompose(op));
  p_k = intersection_projector(operators, kernel_tol);
}

PropagatorWalker::PropagatorWalker(const Ensemble& ensemble,
                                   const Trajectory& trajectory)
    : ensemble_(ensemble),
      trajectory_(trajectory),
      renewal_(trajectory.renewal_times()) {
  if (trajectory.states.empty())
    throw std::invalid_argument("trajectory has no states");
  for (int s : trajectory.states)
    if (s < 0 || s >= ensemble.n_states())
      throw std::invalid_argument("trajectory visits a state without an operator");
  state_ = trajectory.states.front();
  at_renewal_ = Eigen::MatrixXd::Identity(ensemble.dim(), ensemble.dim());
  value_ = at_renewal_;
}

const Eigen::MatrixXd& PropagatorWalker::segment_exponential(int state,
                                                             double duration) {
  const auto key = std::make_pair(state, duration);
  auto it = segment_cache_.find(key);
  if (it == segment_cache_.end())
    it = segment_cache_.emplace(key, evolve(ensemble_.spectra[state], duration))
             .first;
  return it->second;
}

const Eigen::MatrixXd& PropagatorWalker::at(double t) {
  if (t < last_t_)
    throw std::invalid_argument("query times must not decrease");
  if (t > renewal_.back() * (1.0 + 1e-12) && t > renewal_.back() + 1e-12)
    throw std::invalid_argument("query time lies beyond the sampled horizon");
  t = std::min(t, renewal_.back());
  last_t_ = t;

  // Fold full segments into the product at the renewal point, newest factor
  // on the left, then apply the partial segment.
  while (segment_ + 1 < renewal_.size() && renewal_[segment_ + 1] <= t) {
    at_renewal_ = segment_exponential(trajectory_.states[segment_],
                                      trajectory_.holdings[segment_]) *
                  at_renewal_;
    ++segment_;
  }
  state_ = trajectory_.states[segment_];
  const double partial = t - renewal_[segment_];
  if (partial == 0.0)
    value_ = at_renewal_;
  else
    value_ = evolve(ensemble_.spectra[state_], partial) * at_renewal_;
  return value_;
}

Eigen::MatrixXd propagate(const Ensemble& ensemble,
                          const Trajectory& trajectory, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  PropagatorWalker walker(ensemble, trajectory);
  return walker.at(t);
}

DeviationSeries deviation_series(const Ensemble& ensemble,
                                 const Trajectory& trajectory,
                                 const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0)
      throw std::invalid_argument("sample times must be nonnegative");
    if (i > 0 && times[i] < times[i - 1])
      throw std::invalid_argument("sample times must be non-decreasing");
  }

  PropagatorWalker walker(ensemble, trajectory);
  const int n = ensemble.dim();
  const Eigen::MatrixXd complement =
      Eigen::MatrixXd::Identity(n, n) - ensemble.p_k.matrix;

  DeviationSeries series;
  series.trajectory_seed = trajectory.seed;
  series.times = times;
  series.deviation.reserve(times.size());
  series.residual.reserve(times.size());
  series.state_at_time.reserve(times.size());
  series.clamped.reserve(times.size());
  for (double t : times) {
    const Eigen::MatrixXd& s = walker.at(t);
    double dev = weighted_operator_norm(s - ensemble.p_k.matrix, ensemble.mass());
    double res = weighted_operator_norm(complement * s, ensemble.mass());
    const bool clamp = dev < kNoiseFloor || res < kNoiseFloor;
    series.deviation.push_back(std::max(dev, kDeviationFloor));
    series.residual.push_back(std::max(res, kDeviationFloor));
    series.state_at_time.push_back(walker.current_state());
    series.clamped.push_back(clamp);
  }
  return series;
}

double covering_contraction_norm(const Ensemble& ensemble,
                                 const std::vector<int>& sequence,
                                 const std::vector<double>& durations) {
  if (sequence.empty())
    throw std::invalid_argument("state sequence must be non-empty");
  if (sequence.size() != durations.size())
    throw std::invalid_argument("sequence and duration lengths must match");
  std::vector<bool> covered(ensemble.n_states(), false);
  for (int s : sequence) {
    if (s < 0 || s >= ensemble.n_states())
      throw std::invalid_argument("sequence visits a state without an operator");
    covered[s] = true;
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; }))
    throw std::invalid_argument("sequence must cover every state of the ensemble");
  for (double d : durations)
    if (!(d > 0.0))
      throw std::invalid_argument("durations must be strictly positive");

  const int n = ensemble.dim();
  Eigen::MatrixXd product = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t k = 0; k < sequence.size(); ++k)
    product = evolve(ensemble.spectra[sequence[k]], durations[k]) * product;
  product = (Eigen::MatrixXd::Identity(n, n) - ensemble.p_k.matrix) * product;
  return weighted_operator_norm(product, ensemble.mass());
}

RateReport theoretical_rate(const Ensemble& ensemble,
                            const SemiMarkovSpec& spec) {
  if (spec.n_states() != ensemble.n_states())
    throw std::invalid_argument(
        "switching law and ensemble disagree on the state count");
  const Eigen::VectorXd theta = occupation_fractions(spec);

  RateReport report;
  report.states.reserve(ensemble.n_states());
  for (int j = 0; j < ensemble.n_states(); ++j) {
    RateReport::StateRow row;
    row.state = j;
    row.theta = theta[j];

    const Projector p_j = kernel_projector(ensemble.spectra[j], ensemble.kernel_tol);
    row.kernel_matches = p_j.rank == ensemble.p_k.rank &&
                         projector_distance(p_j, ensemble.p_k) <= 1e-8;

    // Gap below the kernel band of this generator; a full-kernel generator
    // has no gap and contributes nothing.
    if (p_j.rank < ensemble.dim()) {
      row.gap = spectral_gap(ensemble.operators[j], ensemble.kernel_tol);
      if (row.kernel_matches) row.contribution = -row.gap * row.theta;
    }

    if (row.kernel_matches) {
      report.assumption_holds = true;
      if (row.contribution > report.alpha_conservative) {
        report.alpha_conservative = row.contribution;
        report.conservative_state = j;
      }
    }
    report.alpha_averaged += row.contribution;
    report.states.push_back(row);
  }
  return report;
}

double estimate_rate(const DeviationSeries& series, double t_lo, double t_hi) {
  if (!(t_lo < t_hi))
    throw std::invalid_argument("rate window must satisfy t_lo < t_hi");
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo || t > t_hi || series.clamped[i]) continue;
    const double y = -std::log(series.deviation[i]);
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
    ++count;
  }
  if (count < 3)
    throw std::invalid_argument(
        "rate fit needs at least three unclamped samples in the window");
  const double var = sum_tt - sum_t * sum_t / count;
  if (var == 0.0)
    throw std::invalid_argument("rate fit needs distinct sample times");
  return (sum_ty - sum_t * sum_y / count) / var;
}

GronwallReport gronwall_bound_check(const Ensemble& ensemble,
                                    const Trajectory& trajectory,
                                    const Eigen::VectorXd& f,
                                    const std::vector<double>& times) {
  if (f.size() != ensemble.dim())
    throw std::invalid_argument("vector length must match the ensemble dimension");
  const Projector p0 = kernel_projector(ensemble.spectra[0], ensemble.kernel_tol);
  if (p0.rank != ensemble.p_k.rank || projector_distance(p0, ensemble.p_k) > 1e-8)
    throw std::invalid_argument(
        "decay bound requires the state-0 kernel to equal the intersection kernel");

  double gap = 0.0;
  if (p0.rank < ensemble.dim())
    gap = spectral_gap(ensemble.operators[0], ensemble.kernel_tol);

  const int n = ensemble.dim();
  const Eigen::MatrixXd complement =
      Eigen::MatrixXd::Identity(n, n) - ensemble.p_k.matrix;
  auto m_norm2 = [&](const Eigen::VectorXd& v) {
    return v.dot(ensemble.mass().cwiseProduct(v));
  };
  const double base = m_norm2(complement * f);

  const std::vector<double> renewal = trajectory.renewal_times();
  auto occupation_in_state0 = [&](double t) {
    double occ = 0.0;
    for (std::size_t k = 0; k + 1 < renewal.size() && renewal[k] < t; ++k)
      if (trajectory.states[k] == 0)
        occ += std::min(t, renewal[k + 1]) - renewal[k];
    return occ;
  };

  PropagatorWalker walker(ensemble, trajectory);
  GronwallReport report;
  report.times = times;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const double lhs = m_norm2(complement * (walker.at(t) * f));
    const double rhs = base * std::exp(2.0 * gap * occupation_in_state0(t));
    report.lhs.push_back(lhs);
    report.rhs.push_back(rhs);
    report.min_margin = std::min(report.min_margin, rhs - lhs);
  }
  report.holds = report.min_margin >= -1e-9;
  return report;
}

UnitClockReport unit_clock_decay_check(const Ensemble& ensemble,
                                       const Trajectory& trajectory) {
  const Projector p0 = constants_projector(ensemble.mass());
  for (int j = 0; j < ensemble.n_states(); ++j) {
    const Projector pj = kernel_projector(ensemble.spectra[j], ensemble.kernel_tol);
    if (pj.rank != 1 || projector_distance(pj, p0) > 1e-8)
      throw std::invalid_argument(
          "unit-clock bound requires every kernel to be exactly the constants");
  }
  for (double tau : trajectory.holdings)
    if (tau != 1.0)
      throw std::invalid_argument("unit-clock bound requires unit holding times");

  const int n = ensemble.dim();
  const Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(n, n) - p0.matrix;

  UnitClockReport report;
  report.delta = 0.0;
  for (int j = 0; j < ensemble.n_states(); ++j)
    report.delta = std::max(
        report.delta, weighted_operator_norm(
                          complement * evolve(ensemble.spectra[j], 1.0),
                          ensemble.mass()));

  const int k_max = static_cast<int>(std::floor(trajectory.horizon));
  PropagatorWalker walker(ensemble, trajectory);
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double value = weighted_operator_norm(
        complement * walker.at(static_cast<double>(k)), ensemble.mass());
    const double bound = std::pow(report.delta, std::max(k - 1, 0));
    report.norms.push_back(value);
    report.bounds.push_back(bound);
    report.min_margin = std::min(report.min_margin, bound - value);
  }
  report.holds = report.min_margin >= -1e-9;
  return report;
}

}  // namespace switchdiff
