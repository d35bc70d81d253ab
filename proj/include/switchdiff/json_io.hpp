#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "switchdiff/graph.hpp"
#include "switchdiff/metric_graph.hpp"
#include "switchdiff/propagator.hpp"
#include "switchdiff/semi_markov.hpp"
#include "switchdiff/spectral.hpp"

namespace switchdiff {

/// Combinatorial graph format:
///   {"n": 3, "edges": [[0,1,2.5], [1,2]], "m": [1,1,1], "labels": [...]}
/// An edge entry is [v, w] or [v, w, mu]; mu and m default to 1.
WeightedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const WeightedGraph& g);

/// Switching law format:
///   {"pi": [[0,1],[1,0]],
///    "holding": [{"kind": "exponential", "rate": 1.0},
///               {"kind": "deterministic", "value": 2.0},
///               {"kind": "gamma", "shape": 2.0, "rate": 1.0}],
///    "initial": 0}
/// "initial" is a state index or a probability vector.
SemiMarkovSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const SemiMarkovSpec& spec);
HoldingDistribution holding_from_json(const nlohmann::json& j);
nlohmann::json holding_to_json(const HoldingDistribution& h);

/// Metric graph format:
///   {"edges": [{"len": 2.0}, {"len": 1.0}],
///    "glue": [[["e0", 1], ["e1", 0]]],
///    "p": [[...], [...]]}        (optional per-edge coefficient samples)
/// A glue endpoint is [edge, side] with edge "e<k>" or the number k and side
/// 0 (the x = 0 end) or 1 (the x = len end).  Unlisted endpoints are loose.
MetricGraph metric_from_json(const nlohmann::json& j);
nlohmann::json metric_to_json(const MetricGraph& g);

nlohmann::json spectrum_to_json(const Spectrum& spectrum);

/// Trajectory CSV with header n,state,holding,renewal_time; the first row
/// carries holding 0 for the initial state.  Floating point columns use 17
/// significant digits so equal inputs give byte-identical files.
std::string trajectory_to_csv(const Trajectory& trajectory);

/// Deviation CSV with header t,state,deviation,residual,bound.
std::string deviation_series_to_csv(const DeviationSeries& series,
                                    const std::vector<double>& bound);

std::string format_double(double value);  // %.16e, shared by all CSV output

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace switchdiff
