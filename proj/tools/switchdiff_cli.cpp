// Command line front end.  Subcommands:
//
//   simulate <config.json>     run a switching experiment, print the summary
//   spectrum <graph.json>      eigenvalues/vectors of a graph generator
//   union <g1.json> <g2.json>  union of combinatorial or metric graphs
//   contraction <config.json>  covering-product contraction certificate
//   verify <suite>             run a named verification suite
//
// Exit codes: 0 success, 1 runtime error or failed verification verdict,
// 2 invalid configuration or rejected model assumptions.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "switchdiff/experiment.hpp"
#include "switchdiff/graph.hpp"
#include "switchdiff/json_io.hpp"
#include "switchdiff/metric_graph.hpp"
#include "switchdiff/propagator.hpp"
#include "switchdiff/spectral.hpp"
#include "switchdiff/verify.hpp"

namespace {

using json = nlohmann::json;
using namespace switchdiff;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> h_target;
  std::optional<double> tol;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "Master seed (overrides the config)");
  cmd->add_option("--out-dir", ov.out_dir, "Directory for CSV/summary output");
  cmd->add_option("--h-target", ov.h_target, "Metric-graph mesh size target");
  cmd->add_option("--tol", ov.tol, "Kernel detection tolerance");
}

void apply(const Overrides& ov, ExperimentConfig& config) {
  if (ov.seed) config.master_seed = *ov.seed;
  if (ov.out_dir) config.out_dir = *ov.out_dir;
  if (ov.h_target) config.h_target = *ov.h_target;
  if (ov.tol) config.kernel_tol = *ov.tol;
}

bool looks_metric(const json& j) {
  if (j.contains("glue")) return true;
  return j.contains("edges") && j.at("edges").is_array() &&
         !j.at("edges").empty() && j.at("edges").front().is_object();
}

int cmd_simulate(const std::string& path, const Overrides& ov) {
  ExperimentConfig config = config_from_json(load_json_file(path));
  apply(ov, config);
  const ExperimentSummary summary = run_experiment(config);
  std::cout << summary_to_json(summary).dump(2) << "\n";
  return 0;
}

int cmd_spectrum(const std::string& path, const Overrides& ov) {
  const json j = load_json_file(path);
  OperatorModel op;
  if (looks_metric(j)) {
    const MetricGraph g = metric_from_json(j);
    op = discretize(g, ov.h_target.value_or(0.05)).op;
  } else {
    op = laplacian(graph_from_json(j));
  }
  std::cout << spectrum_to_json(eigendecompose(op)).dump(2) << "\n";
  return 0;
}

int cmd_union(const std::vector<std::string>& paths) {
  std::vector<json> docs;
  docs.reserve(paths.size());
  for (const auto& p : paths) docs.push_back(load_json_file(p));

  const bool metric = looks_metric(docs.front());
  for (const auto& d : docs)
    if (looks_metric(d) != metric)
      throw ConfigError({"cannot mix combinatorial and metric graph files"});

  if (metric) {
    std::vector<MetricGraph> graphs;
    for (const auto& d : docs) graphs.push_back(metric_from_json(d));
    std::cout << metric_to_json(union_metric(graphs)).dump(2) << "\n";
  } else {
    std::vector<WeightedGraph> graphs;
    for (const auto& d : docs) graphs.push_back(graph_from_json(d));
    std::cout << graph_to_json(union_graphs(graphs)).dump(2) << "\n";
  }
  return 0;
}

// Config: {"ensemble": {...}, "sequence": [0,1,...], "delta": 1.0} or
// "durations" aligned with the sequence.  The sequence defaults to one
// round-robin pass, the duration of every factor to delta (default 1).
int cmd_contraction(const std::string& path, const Overrides& ov) {
  const json j = load_json_file(path);
  ExperimentConfig config = ensemble_config_from_json(j.at("ensemble"));
  apply(ov, config);
  const Ensemble ensemble = build_ensemble(config);

  std::vector<int> sequence;
  if (j.contains("sequence"))
    sequence = j.at("sequence").get<std::vector<int>>();
  else
    for (int i = 0; i < ensemble.n_states(); ++i) sequence.push_back(i);

  std::vector<double> durations;
  if (j.contains("durations"))
    durations = j.at("durations").get<std::vector<double>>();
  else
    durations.assign(sequence.size(), j.value("delta", 1.0));

  const double norm = covering_contraction_norm(ensemble, sequence, durations);
  json out = {{"sequence", sequence},
              {"durations", durations},
              {"norm", norm},
              {"margin", 1.0 - norm},
              {"contracting", norm < 1.0}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_verify(const std::string& suite) {
  const SuiteReport report = run_suite(suite);
  std::cout << suite_to_json(report).dump(2) << "\n";
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switched graph diffusion toolkit"};
  app.require_subcommand(1);

  Overrides ov;

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "Run a switching experiment");
  sim->add_option("config", sim_config, "Experiment config JSON")->required();
  add_override_flags(sim, ov);

  std::string spec_graph;
  auto* spec = app.add_subcommand("spectrum", "Spectrum of a graph generator");
  spec->add_option("graph", spec_graph, "Graph JSON (combinatorial or metric)")
      ->required();
  add_override_flags(spec, ov);

  std::vector<std::string> union_paths;
  auto* uni = app.add_subcommand("union", "Union of graphs");
  uni->add_option("graphs", union_paths, "Graph JSON files")
      ->required()
      ->expected(-1);

  std::string contraction_config;
  auto* con = app.add_subcommand("contraction",
                                 "Covering-product contraction certificate");
  con->add_option("config", contraction_config, "Ensemble config JSON")
      ->required();
  add_override_flags(con, ov);

  std::string suite;
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  std::string suites_help = "Suite name (";
  for (std::size_t i = 0; i < suite_names().size(); ++i)
    suites_help += (i ? ", " : "") + suite_names()[i];
  suites_help += ")";
  ver->add_option("suite", suite, suites_help)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_config, ov);
    if (spec->parsed()) return cmd_spectrum(spec_graph, ov);
    if (uni->parsed()) return cmd_union(union_paths);
    if (con->parsed()) return cmd_contraction(contraction_config, ov);
    if (ver->parsed()) return cmd_verify(suite);
  } catch (const ConfigError& e) {
    for (const auto& msg : e.messages()) std::cerr << "error: " << msg << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
