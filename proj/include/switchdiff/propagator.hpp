#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "switchdiff/operator_model.hpp"
#include "switchdiff/semi_markov.hpp"
#include "switchdiff/spectral.hpp"

namespace switchdiff {

/// A family of generators indexed by switching state, all acting on one
/// weighted space.  Construction validates the shared dimension and mass,
/// weighted self-adjointness and negative semi-definiteness of each member,
/// caches each spectrum, and computes the projector onto the intersection of
/// the kernels.
struct Ensemble {
  std::vector<OperatorModel> operators;
  std::vector<std::string> labels;
  std::vector<Spectrum> spectra;
  Projector p_k;
  double kernel_tol = 1e-9;

  explicit Ensemble(std::vector<OperatorModel> ops,
                    std::vector<std::string> labels = {}, double tol = 1e-9);

  int dim() const { return operators.front().dim(); }
  int n_states() const { return static_cast<int>(operators.size()); }
  const Eigen::VectorXd& mass() const { return operators.front().mass; }
};

/// Random propagator along a sampled path: the time-ordered product of
/// segment exponentials, with the newest factor applied on the left.
Eigen::MatrixXd propagate(const Ensemble& ensemble,
                          const Trajectory& trajectory, double t);

/// ||S(t) - P_K||_m and ||(I - P_K) S(t)||_m over a sample grid.  The two
/// agree up to rounding because S - P_K = (I - P_K) S; both are recorded so
/// the identity stays observable.  Values below 1e-300 are clamped; samples
/// under 1e-13 are flagged (indistinguishable from accumulated roundoff) so
/// rate fits skip them instead of fitting through the noise plateau.
struct DeviationSeries {
  std::vector<double> times;
  std::vector<double> deviation;
  std::vector<double> residual;
  std::vector<int> state_at_time;
  std::vector<bool> clamped;
  std::uint64_t trajectory_seed = 0;
};

DeviationSeries deviation_series(const Ensemble& ensemble,
                                 const Trajectory& trajectory,
                                 const std::vector<double>& times);

/// || (I - P_K) e^{d_L A_{k_L}} ... e^{d_1 A_{k_1}} ||_m for an explicit
/// state sequence.  The sequence must cover every state of the ensemble.
double covering_contraction_norm(const Ensemble& ensemble,
                                 const std::vector<int>& sequence,
                                 const std::vector<double>& durations);

/// Rate prediction per state.  A state qualifies when the kernel of its
/// generator coincides with the intersection kernel K; the gap of a
/// qualifying generator then sits strictly below the K-band.
struct RateReport {
  struct StateRow {
    int state = 0;
    bool kernel_matches = false;
    double gap = 0.0;       // spectral gap of this generator (when defined)
    double theta = 0.0;     // long-run occupation fraction
    double contribution = 0.0;  // (-gap) * theta for qualifying states, else 0
  };

  std::vector<StateRow> states;
  bool assumption_holds = false;   // at least one state qualifies
  double alpha_conservative = 0.0; // best single qualifying state bound
  int conservative_state = -1;
  double alpha_averaged = 0.0;     // sum of qualifying contributions
};

RateReport theoretical_rate(const Ensemble& ensemble,
                            const SemiMarkovSpec& spec);

/// Least-squares slope of -log(deviation) over times in [t_lo, t_hi].
/// Clamped samples are ignored; fewer than three usable samples is an error.
double estimate_rate(const DeviationSeries& series, double t_lo, double t_hi);

/// Pathwise decay bound in the decaying form
///   ||(I-P_K) S(t) f||^2 <= ||(I-P_K) f||^2 * exp(2 gap_1 * occ_1(t)),
/// where gap_1 is the spectral gap of the state-0 generator and occ_1 the
/// time spent in state 0.  Requires the state-0 kernel to equal K.
struct GronwallReport {
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double min_margin = 0.0;  // min of rhs - lhs
  bool holds = false;       // min_margin >= -1e-9
};

GronwallReport gronwall_bound_check(const Ensemble& ensemble,
                                    const Trajectory& trajectory,
                                    const Eigen::VectorXd& f,
                                    const std::vector<double>& times);

/// Unit-clock bound || (I-P_0) S(k) ||_m <= delta^(k-1) with
/// delta = max_i || (I-P_0) e^{A_i} ||_m, checked at integer times.
/// Requires every kernel to be exactly the constants and all holding times
/// equal to one.
struct UnitClockReport {
  double delta = 0.0;
  std::vector<double> norms;    // index k holds ||(I-P_0) S(k)||
  std::vector<double> bounds;   // index k holds delta^max(k-1, 0)
  double min_margin = 0.0;      // min of bound - norm
  bool holds = false;
};

UnitClockReport unit_clock_decay_check(const Ensemble& ensemble,
                                       const Trajectory& trajectory);

/// Incremental propagator evaluation along one trajectory; query times must
/// be non-decreasing.  Segment exponentials are memoized by (state,
/// duration), which collapses the cost of deterministic clocks.
class PropagatorWalker {
 public:
  PropagatorWalker(const Ensemble& ensemble, const Trajectory& trajectory);

  /// S(t); t must not decrease between calls and must stay within the
  /// sampled horizon.
  const Eigen::MatrixXd& at(double t);

  int current_state() const { return state_; }

 private:
  const Ensemble& ensemble_;
  const Trajectory& trajectory_;
  std::vector<double> renewal_;
  std::size_t segment_ = 0;
  int state_ = 0;
  double last_t_ = 0.0;
  Eigen::MatrixXd at_renewal_;  // S at the last passed renewal time
  Eigen::MatrixXd value_;
  std::map<std::pair<int, double>, Eigen::MatrixXd> segment_cache_;

  const Eigen::MatrixXd& segment_exponential(int state, double duration);
};

}  // namespace switchdiff
