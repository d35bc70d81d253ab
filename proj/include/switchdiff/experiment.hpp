#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "switchdiff/graph.hpp"
#include "switchdiff/metric_graph.hpp"
#include "switchdiff/propagator.hpp"
#include "switchdiff/semi_markov.hpp"

namespace switchdiff {

/// Invalid configuration: carries one message per violated requirement.
/// The command line maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

struct TimeGrid {
  enum class Kind { log_spaced, linear, explicit_times };
  Kind kind = Kind::log_spaced;
  int count = 64;
  double t_min = 0.0;  // log grids replace 0 with horizon/1000
  double t_max = 0.0;  // 0 means the horizon
  std::vector<double> times;

  std::vector<double> materialize(double horizon) const;
};

/// Full description of one switching experiment.
///
///   {"ensemble": {"kind": "combinatorial", "graphs": [...]}
///                | {"kind": "metric", "metric_graphs": [...], "h_target": h}
///                | {"kind": "interval", "kinds": ["neumann", ...], "n": 200},
///    "switching": {...},
///    "horizon": 200.0,
///    "times": {"kind": "log", "count": 64, "t_min": 0.1},
///    "master_seed": 1,
///    "n_trajectories": 20,
///    "rate_window": [20.0, 180.0],
///    "out_dir": "results"}
struct ExperimentConfig {
  enum class EnsembleKind { combinatorial, metric, interval };

  EnsembleKind ensemble_kind = EnsembleKind::combinatorial;
  std::vector<WeightedGraph> graphs;
  std::vector<MetricGraph> metric_graphs;
  double h_target = 0.05;
  std::vector<IntervalKind> interval_kinds;
  int interval_n = 200;
  std::vector<double> variable_p_samples;

  SemiMarkovSpec switching;
  double horizon = 0.0;
  TimeGrid times;
  std::uint64_t master_seed = 0;
  int n_trajectories = 1;
  std::optional<std::pair<double, double>> rate_window;
  std::string out_dir;
  double kernel_tol = 1e-9;
};

ExperimentConfig config_from_json(const nlohmann::json& j);

/// Parses just the "ensemble" block (the value, not the wrapper object);
/// switching and run parameters keep their defaults.
ExperimentConfig ensemble_config_from_json(const nlohmann::json& ensemble_block);

/// Builds the generator family a config describes; throws ConfigError when
/// the description violates a requirement.
Ensemble build_ensemble(const ExperimentConfig& config);

struct TrajectoryResult {
  int index = 0;
  std::uint64_t seed = 0;
  double final_deviation = 0.0;
  double final_residual = 0.0;
  double alpha_empirical = 0.0;     // NaN when the fit was not possible
  double gronwall_min_margin = 0.0; // NaN when the bound does not apply
  Eigen::VectorXd occupation;       // empirical fractions at the horizon
  std::string csv;                  // deviation series export
};

struct ExperimentSummary {
  RateReport rate;
  std::vector<TrajectoryResult> trajectories;
  double final_deviation_median = 0.0;
  double final_deviation_worst = 0.0;
  double alpha_empirical_median = 0.0;
  Eigen::VectorXd theta_formula;
  Eigen::VectorXd theta_empirical_mean;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
};

nlohmann::json summary_to_json(const ExperimentSummary& summary);

/// Samples, propagates and summarizes all trajectories; writes one deviation
/// CSV per trajectory plus summary.json when out_dir is set.  Worker count
/// is capped by the SWITCHDIFF_THREADS environment variable; outputs do not
/// depend on the thread count.
ExperimentSummary run_experiment(const ExperimentConfig& config);

}  // namespace switchdiff
