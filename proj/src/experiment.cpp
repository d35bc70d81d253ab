#include "switchdiff/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "switchdiff/json_io.hpp"

namespace switchdiff {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& messages) {
  std::string out;
  for (const auto& m : messages) {
    if (!out.empty()) out += "; ";
    out += m;
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid]
                           : 0.5 * (values[mid - 1] + values[mid]);
}

int worker_count(int n_jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("SWITCHDIFF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<unsigned>(n, static_cast<unsigned>(n_jobs)));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error("invalid configuration: " + join(messages)),
      messages_(std::move(messages)) {}

std::vector<double> TimeGrid::materialize(double horizon) const {
  if (kind == Kind::explicit_times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < 0.0 || times[i] > horizon)
        throw ConfigError({"sample times must lie in [0, horizon]"});
      if (i > 0 && times[i] < times[i - 1])
        throw ConfigError({"sample times must be non-decreasing"});
    }
    return times;
  }
  if (count < 2) throw ConfigError({"time grids need at least two points"});
  const double hi = t_max > 0.0 ? std::min(t_max, horizon) : horizon;

  std::vector<double> grid;
  grid.reserve(count + 1);
  if (kind == Kind::linear) {
    const double lo = t_min;
    for (int i = 0; i < count; ++i)
      grid.push_back(lo + (hi - lo) * i / (count - 1));
  } else {
    // Log-spaced with an explicit t = 0 sample in front.
    double lo = t_min > 0.0 ? t_min : hi / 1000.0;
    grid.push_back(0.0);
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < count; ++i)
      grid.push_back(lo * std::exp(ratio * i / (count - 1)));
  }
  return grid;
}

ExperimentConfig ensemble_config_from_json(const json& ens) {
  std::vector<std::string> errors;
  ExperimentConfig config;

  try {
    const std::string kind = ens.at("kind").get<std::string>();
    if (kind == "combinatorial") {
      config.ensemble_kind = ExperimentConfig::EnsembleKind::combinatorial;
      for (const auto& g : ens.at("graphs"))
        config.graphs.push_back(graph_from_json(g));
    } else if (kind == "metric") {
      config.ensemble_kind = ExperimentConfig::EnsembleKind::metric;
      for (const auto& g : ens.at("metric_graphs"))
        config.metric_graphs.push_back(metric_from_json(g));
      if (ens.contains("h_target"))
        config.h_target = ens.at("h_target").get<double>();
    } else if (kind == "interval") {
      config.ensemble_kind = ExperimentConfig::EnsembleKind::interval;
      for (const auto& name : ens.at("kinds"))
        config.interval_kinds.push_back(
            interval_kind_from_name(name.get<std::string>()));
      if (ens.contains("n")) config.interval_n = ens.at("n").get<int>();
      if (ens.contains("p"))
        config.variable_p_samples = ens.at("p").get<std::vector<double>>();
    } else {
      errors.push_back("ensemble kind must be combinatorial, metric, or interval");
    }
  } catch (const std::exception& e) {
    errors.push_back(std::string("ensemble: ") + e.what());
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return config;
}

ExperimentConfig config_from_json(const json& j) {
  std::vector<std::string> errors;
  ExperimentConfig config;

  try {
    config = ensemble_config_from_json(j.at("ensemble"));
  } catch (const ConfigError& e) {
    errors = e.messages();
  } catch (const std::exception& e) {
    errors.push_back(std::string("ensemble: ") + e.what());
  }

  try {
    config.switching = spec_from_json(j.at("switching"));
  } catch (const std::exception& e) {
    errors.push_back(std::string("switching: ") + e.what());
  }

  try {
    config.horizon = j.at("horizon").get<double>();
    if (j.contains("times")) {
      const auto& t = j.at("times");
      if (t.is_array()) {
        config.times.kind = TimeGrid::Kind::explicit_times;
        config.times.times = t.get<std::vector<double>>();
      } else {
        const std::string grid_kind = t.value("kind", "log");
        if (grid_kind == "log")
          config.times.kind = TimeGrid::Kind::log_spaced;
        else if (grid_kind == "linear")
          config.times.kind = TimeGrid::Kind::linear;
        else
          errors.push_back("times.kind must be log or linear");
        config.times.count = t.value("count", 64);
        config.times.t_min = t.value("t_min", 0.0);
        config.times.t_max = t.value("t_max", 0.0);
      }
    }
    if (j.contains("master_seed"))
      config.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("n_trajectories"))
      config.n_trajectories = j.at("n_trajectories").get<int>();
    if (j.contains("rate_window")) {
      const auto& w = j.at("rate_window");
      config.rate_window = std::make_pair(w.at(0).get<double>(),
                                          w.at(1).get<double>());
    }
    if (j.contains("out_dir")) config.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("tol")) config.kernel_tol = j.at("tol").get<double>();
  } catch (const std::exception& e) {
    errors.push_back(std::string("run parameters: ") + e.what());
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  return config;
}

Ensemble build_ensemble(const ExperimentConfig& config) {
  std::vector<std::string> errors;
  std::vector<OperatorModel> ops;
  std::vector<std::string> labels;

  switch (config.ensemble_kind) {
    case ExperimentConfig::EnsembleKind::combinatorial: {
      if (config.graphs.empty())
        errors.push_back("combinatorial ensembles need at least one graph");
      for (std::size_t i = 0; i < config.graphs.size(); ++i) {
        if (config.graphs[i].n_vertices != config.graphs.front().n_vertices)
          errors.push_back("graphs must share one vertex set");
        else {
          ops.push_back(laplacian(config.graphs[i]));
          labels.push_back("graph_" + std::to_string(i));
        }
      }
      // A switching family lives on one weighted space, so the vertex
      // weights must agree across the graphs.
      for (std::size_t i = 1; i < config.graphs.size() && errors.empty(); ++i)
        if (config.graphs[i].vertex_weights != config.graphs.front().vertex_weights)
          errors.push_back("graphs must share one vertex weight vector");
      break;
    }
    case ExperimentConfig::EnsembleKind::metric: {
      if (config.metric_graphs.empty())
        errors.push_back("metric ensembles need at least one metric graph");
      else {
        try {
          const SharedMeshFamily family = discretize_family(
              config.metric_graphs,
              mesh_counts(config.metric_graphs.front(), config.h_target));
          ops = family.operators;
          for (std::size_t i = 0; i < ops.size(); ++i)
            labels.push_back("gluing_" + std::to_string(i));
        } catch (const std::exception& e) {
          errors.push_back(std::string("metric ensemble: ") + e.what());
        }
      }
      break;
    }
    case ExperimentConfig::EnsembleKind::interval: {
      if (config.interval_kinds.empty())
        errors.push_back("interval ensembles need at least one kind");
      for (IntervalKind kind : config.interval_kinds) {
        try {
          ops.push_back(interval_operator(
              kind, config.interval_n,
              kind == IntervalKind::variable_p ? config.variable_p_samples
                                               : std::vector<double>{}));
          labels.push_back(interval_kind_name(kind));
        } catch (const std::exception& e) {
          errors.push_back(std::string("interval ensemble: ") + e.what());
        }
      }
      break;
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));

  try {
    return Ensemble(std::move(ops), std::move(labels), config.kernel_tol);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("ensemble validation: ") + e.what()});
  }
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  std::vector<std::string> errors;
  const SpecReport spec_report = validate_spec(config.switching);
  for (const auto& v : spec_report.violations)
    errors.push_back("switching: " + v);
  if (!(config.horizon > 0.0)) errors.push_back("horizon must be positive");
  if (config.n_trajectories < 1)
    errors.push_back("need at least one trajectory");
  if (config.rate_window &&
      !(config.rate_window->first < config.rate_window->second))
    errors.push_back("rate window must satisfy lo < hi");
  if (!errors.empty()) throw ConfigError(std::move(errors));

  const Ensemble ensemble = build_ensemble(config);
  if (ensemble.n_states() != config.switching.n_states())
    throw ConfigError(
        {"ensemble size and switching state count must agree"});

  const std::vector<double> grid = config.times.materialize(config.horizon);
  const RateReport rate = theoretical_rate(ensemble, config.switching);
  const double fit_lo =
      config.rate_window ? config.rate_window->first : 0.1 * config.horizon;
  const double fit_hi =
      config.rate_window ? config.rate_window->second : 0.9 * config.horizon;

  // The in-bound column follows the best qualifying state's decay budget.
  const bool bound_applies = rate.assumption_holds;
  const double bound_gap =
      bound_applies ? rate.states[rate.conservative_state].gap : 0.0;
  const int bound_state = rate.conservative_state;

  ExperimentSummary summary;
  summary.rate = rate;
  summary.master_seed = config.master_seed;
  summary.theta_formula = occupation_fractions(config.switching);
  summary.trajectories.resize(config.n_trajectories);

  std::atomic<int> cursor{0};
  auto work = [&]() {
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= config.n_trajectories) return;
      TrajectoryResult& out = summary.trajectories[i];
      out.index = i;
      out.seed = derive_stream_seed(config.master_seed, i);
      const Trajectory traj =
          sample_trajectory(config.switching, config.horizon, out.seed);
      const DeviationSeries series = deviation_series(ensemble, traj, grid);

      std::vector<double> bound(grid.size(), 1.0);
      if (bound_applies) {
        const std::vector<double> renewal = traj.renewal_times();
        for (std::size_t k = 0; k < grid.size(); ++k) {
          double occ = 0.0;
          for (std::size_t s = 0; s + 1 < renewal.size() && renewal[s] < grid[k]; ++s)
            if (traj.states[s] == bound_state)
              occ += std::min(grid[k], renewal[s + 1]) - renewal[s];
          bound[k] = std::exp(bound_gap * occ);
        }
      }

      out.final_deviation = series.deviation.back();
      out.final_residual = series.residual.back();
      out.csv = deviation_series_to_csv(series, bound);
      Eigen::VectorXd occ = empirical_occupation(traj, config.horizon);
      out.occupation = Eigen::VectorXd::Zero(ensemble.n_states());
      out.occupation.head(occ.size()) = occ;

      try {
        out.alpha_empirical = estimate_rate(series, fit_lo, fit_hi);
      } catch (const std::invalid_argument&) {
        out.alpha_empirical = std::numeric_limits<double>::quiet_NaN();
      }

      out.gronwall_min_margin = std::numeric_limits<double>::quiet_NaN();
      if (bound_applies && bound_state == 0) {
        // Probe vector for the pathwise bound, derived from the trajectory
        // seed so reruns are reproducible.
        SplitMix64 gen(mix64(out.seed ^ 0x5bf03635u));
        Eigen::VectorXd f(ensemble.dim());
        for (int k = 0; k < f.size(); ++k) f[k] = 2.0 * gen.uniform01() - 1.0;
        out.gronwall_min_margin =
            gronwall_bound_check(ensemble, traj, f, grid).min_margin;
      }
    }
  };

  const int n_workers = worker_count(config.n_trajectories);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::vector<double> final_devs, alphas;
  summary.theta_empirical_mean = Eigen::VectorXd::Zero(ensemble.n_states());
  for (const auto& t : summary.trajectories) {
    final_devs.push_back(t.final_deviation);
    if (std::isfinite(t.alpha_empirical)) alphas.push_back(t.alpha_empirical);
    summary.theta_empirical_mean += t.occupation;
    summary.seeds.push_back(t.seed);
  }
  summary.theta_empirical_mean /= static_cast<double>(config.n_trajectories);
  summary.final_deviation_median = median(final_devs);
  summary.final_deviation_worst =
      *std::max_element(final_devs.begin(), final_devs.end());
  summary.alpha_empirical_median = median(std::move(alphas));

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    for (const auto& t : summary.trajectories) {
      char name[64];
      std::snprintf(name, sizeof(name), "trajectory_%04d.csv", t.index);
      write_text_file(config.out_dir + "/" + name, t.csv);
    }
    write_text_file(config.out_dir + "/summary.json",
                    summary_to_json(summary).dump(2) + "\n");
  }
  return summary;
}

json summary_to_json(const ExperimentSummary& summary) {
  json j;
  j["alpha_theoretical"] = {
      {"assumption_holds", summary.rate.assumption_holds},
      {"conservative", summary.rate.alpha_conservative},
      {"conservative_state", summary.rate.conservative_state},
      {"averaged", summary.rate.alpha_averaged},
  };
  json states = json::array();
  for (const auto& row : summary.rate.states)
    states.push_back({{"state", row.state},
                      {"kernel_matches", row.kernel_matches},
                      {"gap", row.gap},
                      {"theta", row.theta},
                      {"contribution", row.contribution}});
  j["alpha_theoretical"]["states"] = states;

  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  j["alpha_empirical_median"] = summary.alpha_empirical_median;
  j["final_deviation_median"] = summary.final_deviation_median;
  j["final_deviation_worst"] = summary.final_deviation_worst;
  j["theta_formula"] = vec(summary.theta_formula);
  j["theta_empirical_mean"] = vec(summary.theta_empirical_mean);
  j["master_seed"] = summary.master_seed;
  j["seeds"] = summary.seeds;

  json rows = json::array();
  for (const auto& t : summary.trajectories) {
    json row = {{"index", t.index},
                {"seed", t.seed},
                {"final_deviation", t.final_deviation},
                {"final_residual", t.final_residual},
                {"occupation", vec(t.occupation)}};
    if (std::isfinite(t.alpha_empirical)) row["alpha_empirical"] = t.alpha_empirical;
    if (std::isfinite(t.gronwall_min_margin))
      row["gronwall_min_margin"] = t.gronwall_min_margin;
    rows.push_back(row);
  }
  j["trajectories"] = rows;
  return j;
}

}  // namespace switchdiff
