#include "switchdiff/semi_markov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace switchdiff {

HoldingDistribution HoldingDistribution::deterministic(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument("deterministic holding time must be positive and finite");
  return {Kind::deterministic, value, 0.0};
}

HoldingDistribution HoldingDistribution::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("exponential rate must be positive and finite");
  return {Kind::exponential, rate, 0.0};
}

HoldingDistribution HoldingDistribution::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw std::invalid_argument("gamma shape and rate must be positive and finite");
  return {Kind::gamma, shape, rate};
}

double HoldingDistribution::mean() const {
  switch (kind) {
    case Kind::deterministic: return a;
    case Kind::exponential: return 1.0 / a;
    case Kind::gamma: return a / b;
  }
  return 0.0;
}

double HoldingDistribution::sample(SplitMix64& gen) const {
  switch (kind) {
    case Kind::deterministic: return a;
    case Kind::exponential: return draw_exponential(gen, a);
    case Kind::gamma: return draw_gamma(gen, a, b);
  }
  return 0.0;
}

std::string HoldingDistribution::describe() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::deterministic: out << "deterministic(" << a << ")"; break;
    case Kind::exponential: out << "exponential(rate=" << a << ")"; break;
    case Kind::gamma: out << "gamma(shape=" << a << ", rate=" << b << ")"; break;
  }
  return out.str();
}

std::string SpecReport::joined() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

namespace {

bool strongly_connected(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  auto reaches_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double link = forward ? p(v, w) : p(w, v);
        if (link > 0.0 && !seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all(true) && reaches_all(false);
}

}  // namespace

SpecReport validate_spec(const SemiMarkovSpec& spec) {
  SpecReport report;
  const int n = spec.n_states();

  if (n < 1 || spec.transition.cols() != n) {
    report.violations.push_back("transition matrix must be square and non-empty");
    return report;
  }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (spec.transition(i, j) < 0.0)
        report.violations.push_back("transition entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative");
      row_sum += spec.transition(i, j);
    }
    if (std::abs(row_sum - 1.0) > 1e-12)
      report.violations.push_back("transition row " + std::to_string(i) +
                                  " sums to " + std::to_string(row_sum) +
                                  "; rows must sum to 1");
  }
  if (report.violations.empty() && !strongly_connected(spec.transition))
    report.violations.push_back(
        "embedded chain is reducible; the transition matrix must be irreducible");

  if (spec.holding.size() != static_cast<std::size_t>(n)) {
    report.violations.push_back("need one holding law per state");
  } else {
    bool all_deterministic = true;
    for (int i = 0; i < n; ++i) {
      const double mean = spec.holding[i].mean();
      if (!(mean > 0.0) || !std::isfinite(mean))
        report.violations.push_back("holding law of state " + std::to_string(i) +
                                    " must have a positive finite mean");
      if (spec.holding[i].kind != HoldingDistribution::Kind::deterministic)
        all_deterministic = false;
    }
    if (all_deterministic)
      report.warnings.push_back(
          "every holding law is deterministic; clock periodicities are not "
          "averaged out and long-run statements may degrade");
  }

  if (spec.initial_distribution.size() == 0) {
    if (spec.initial_state < 0 || spec.initial_state >= n)
      report.violations.push_back("initial state index is out of range");
  } else {
    if (spec.initial_distribution.size() != n)
      report.violations.push_back("initial distribution length must equal the state count");
    else {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        if (spec.initial_distribution[i] < 0.0)
          report.violations.push_back("initial distribution has a negative entry");
        total += spec.initial_distribution[i];
      }
      if (std::abs(total - 1.0) > 1e-12)
        report.violations.push_back("initial distribution must sum to 1");
    }
  }
  return report;
}

std::vector<double> Trajectory::renewal_times() const {
  std::vector<double> t(holdings.size() + 1);
  t[0] = 0.0;
  for (std::size_t k = 0; k < holdings.size(); ++k) t[k + 1] = t[k] + holdings[k];
  return t;
}

int Trajectory::state_at(double t) const {
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  double acc = 0.0;
  for (std::size_t k = 0; k < holdings.size(); ++k) {
    acc += holdings[k];
    if (t < acc) return states[k];
  }
  if (states.empty()) throw std::invalid_argument("empty trajectory");
  return states.back();
}

Eigen::VectorXd invariant_distribution(const Eigen::MatrixXd& transition) {
  SemiMarkovSpec probe;
  probe.transition = transition;
  probe.holding.assign(static_cast<std::size_t>(transition.rows()),
                       HoldingDistribution::exponential(1.0));
  const SpecReport report = validate_spec(probe);
  if (!report.ok())
    throw std::invalid_argument("invalid transition matrix: " + report.joined());

  const int n = static_cast<int>(transition.rows());
  // rho (P - I) = 0 with the normalization row sum(rho) = 1 replacing the
  // last equation; nonsingular for irreducible chains.
  Eigen::MatrixXd system = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
  system.row(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::VectorXd rho = system.partialPivLu().solve(rhs);

  // One damped fixed-point pass knocks out any residual left by the solve;
  // damping keeps periodic chains convergent.
  for (int pass = 0; pass < 64; ++pass) {
    const double residual = (transition.transpose() * rho - rho).lpNorm<1>();
    if (residual <= 1e-13 && std::abs(rho.sum() - 1.0) <= 1e-13) break;
    rho = 0.5 * (transition.transpose() * rho + rho);
    rho /= rho.sum();
  }
  const double residual = (transition.transpose() * rho - rho).lpNorm<1>();
  if (residual > 1e-12)
    throw std::runtime_error("invariant distribution residual did not converge");
  return rho;
}

Eigen::VectorXd occupation_fractions(const SemiMarkovSpec& spec) {
  const SpecReport report = validate_spec(spec);
  if (!report.ok())
    throw std::invalid_argument("invalid switching law: " + report.joined());
  const Eigen::VectorXd rho = invariant_distribution(spec.transition);
  Eigen::VectorXd theta(spec.n_states());
  for (int i = 0; i < spec.n_states(); ++i)
    theta[i] = rho[i] * spec.holding[i].mean();
  return theta / theta.sum();
}

Trajectory sample_trajectory(const SemiMarkovSpec& spec, double horizon,
                             std::uint64_t seed) {
  const SpecReport report = validate_spec(spec);
  if (!report.ok())
    throw std::invalid_argument("invalid switching law: " + report.joined());
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be positive and finite");

  SplitMix64 gen(seed);
  Trajectory traj;
  traj.horizon = horizon;
  traj.seed = seed;

  int state = spec.initial_state;
  if (spec.initial_distribution.size() > 0)
    state = draw_categorical(gen, spec.initial_distribution.data(),
                             spec.n_states());
  traj.states.push_back(state);

  double t = 0.0;
  Eigen::VectorXd row(spec.n_states());
  while (t < horizon) {
    const double tau = spec.holding[state].sample(gen);
    row = spec.transition.row(state);
    state = draw_categorical(gen, row.data(), spec.n_states());
    traj.holdings.push_back(tau);
    traj.states.push_back(state);
    t += tau;
  }
  return traj;
}

Eigen::VectorXd empirical_occupation(const Trajectory& trajectory, double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("occupation time must be positive");
  const std::vector<double> renewal = trajectory.renewal_times();
  if (t > renewal.back())
    throw std::invalid_argument("time lies beyond the sampled horizon");

  const int n_states =
      1 + *std::max_element(trajectory.states.begin(), trajectory.states.end());
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(n_states);
  for (std::size_t k = 0; k + 1 < renewal.size() && renewal[k] < t; ++k)
    occ[trajectory.states[k]] += std::min(t, renewal[k + 1]) - renewal[k];
  return occ / t;
}

}  // namespace switchdiff
