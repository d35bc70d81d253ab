#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchdiff/rng.hpp"

namespace switchdiff {

/// Holding-time law for one state of the switching process.  The catalogue
/// is limited to laws that are either constant or have a density bounded
/// away from zero on (0, t) for every t; uniform laws fail that requirement
/// and are rejected at parse time.
struct HoldingDistribution {
  enum class Kind { deterministic, exponential, gamma };

  Kind kind = Kind::exponential;
  double a = 1.0;  // value (deterministic), rate (exponential), shape (gamma)
  double b = 0.0;  // rate (gamma)

  static HoldingDistribution deterministic(double value);
  static HoldingDistribution exponential(double rate);
  static HoldingDistribution gamma(double shape, double rate);

  double mean() const;
  double sample(SplitMix64& gen) const;
  std::string describe() const;

  bool operator==(const HoldingDistribution&) const = default;
};

/// Semi-Markov switching law: an embedded chain given by a row-stochastic
/// irreducible transition matrix plus one holding law per state.  The start
/// state is either fixed (initial_state) or drawn from initial_distribution
/// when that vector is non-empty.
struct SemiMarkovSpec {
  Eigen::MatrixXd transition;
  std::vector<HoldingDistribution> holding;
  int initial_state = 0;
  Eigen::VectorXd initial_distribution;  // empty = point mass at initial_state

  int n_states() const { return static_cast<int>(transition.rows()); }
};

/// Outcome of validate_spec: every violated requirement is listed, and
/// non-fatal oddities (all-deterministic clocks) are surfaced as warnings.
struct SpecReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  std::string joined() const;
};

SpecReport validate_spec(const SemiMarkovSpec& spec);

/// Sampled switching path.  states has one more entry than holdings; the
/// renewal times are reconstructed as prefix sums rather than stored.
/// Sampling runs until the last renewal time reaches the horizon.
struct Trajectory {
  std::vector<int> states;
  std::vector<double> holdings;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  int n_jumps() const { return static_cast<int>(holdings.size()); }
  std::vector<double> renewal_times() const;

  /// State index of the segment containing t (right-continuous).
  int state_at(double t) const;
};

/// Unique invariant distribution of a row-stochastic irreducible matrix,
/// solved directly; the residual ||rho^T P - rho^T||_1 is driven below 1e-12.
Eigen::VectorXd invariant_distribution(const Eigen::MatrixXd& transition);

/// Long-run fraction of real time in each state:
/// Theta_x = rho_x mu_x / sum_j rho_j mu_j.
Eigen::VectorXd occupation_fractions(const SemiMarkovSpec& spec);

/// Deterministic in (spec, horizon, seed).  Per step the holding draw for
/// the current state comes first, the categorical draw for the next state
/// second; the draw order is part of the reproducibility contract.
Trajectory sample_trajectory(const SemiMarkovSpec& spec, double horizon,
                             std::uint64_t seed);

/// Exact occupation fractions of the path on [0, t], integrated piecewise;
/// t must lie in (0, last renewal time].
Eigen::VectorXd empirical_occupation(const Trajectory& trajectory, double t);

}  // namespace switchdiff
