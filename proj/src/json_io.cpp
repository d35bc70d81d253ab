#include "switchdiff/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace switchdiff {

using nlohmann::json;

WeightedGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n"))
    throw std::invalid_argument("graph json needs an object with an \"n\" field");
  const int n = j.at("n").get<int>();

  std::vector<std::pair<int, int>> edges;
  std::vector<double> mu;
  if (j.contains("edges")) {
    for (const auto& entry : j.at("edges")) {
      if (!entry.is_array() || entry.size() < 2 || entry.size() > 3)
        throw std::invalid_argument(
            "graph edge entries must be [v, w] or [v, w, mu]");
      edges.emplace_back(entry.at(0).get<int>(), entry.at(1).get<int>());
      mu.push_back(entry.size() == 3 ? entry.at(2).get<double>() : 1.0);
    }
  }

  std::vector<double> m;
  if (j.contains("m")) m = j.at("m").get<std::vector<double>>();
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  return build_graph(n, edges, std::move(m), std::move(mu), std::move(labels));
}

json graph_to_json(const WeightedGraph& g) {
  json j;
  j["n"] = g.n_vertices;
  j["edges"] = json::array();
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    j["edges"].push_back({g.edges[i].first, g.edges[i].second, g.edge_weights[i]});
  j["m"] = g.vertex_weights;
  if (!g.labels.empty()) j["labels"] = g.labels;
  return j;
}

HoldingDistribution holding_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "deterministic")
    return HoldingDistribution::deterministic(j.at("value").get<double>());
  if (kind == "exponential")
    return HoldingDistribution::exponential(j.at("rate").get<double>());
  if (kind == "gamma")
    return HoldingDistribution::gamma(j.at("shape").get<double>(),
                                      j.at("rate").get<double>());
  if (kind == "uniform")
    throw std::invalid_argument(
        "holding kind \"uniform\" is not supported: holding laws must be "
        "constant or have a density bounded away from zero near 0, which a "
        "uniform law violates; use deterministic, exponential, or gamma");
  throw std::invalid_argument("unknown holding kind \"" + kind +
                              "\"; expected deterministic, exponential, or gamma");
}

json holding_to_json(const HoldingDistribution& h) {
  switch (h.kind) {
    case HoldingDistribution::Kind::deterministic:
      return {{"kind", "deterministic"}, {"value", h.a}};
    case HoldingDistribution::Kind::exponential:
      return {{"kind", "exponential"}, {"rate", h.a}};
    case HoldingDistribution::Kind::gamma:
      return {{"kind", "gamma"}, {"shape", h.a}, {"rate", h.b}};
  }
  throw std::logic_error("unreachable holding kind");
}

SemiMarkovSpec spec_from_json(const json& j) {
  SemiMarkovSpec spec;
  const auto& pi = j.at("pi");
  const int n = static_cast<int>(pi.size());
  if (n == 0) throw std::invalid_argument("\"pi\" must be a non-empty matrix");
  spec.transition.resize(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(pi.at(r).size()) != n)
      throw std::invalid_argument("\"pi\" must be square");
    for (int c = 0; c < n; ++c) spec.transition(r, c) = pi.at(r).at(c).get<double>();
  }

  for (const auto& h : j.at("holding")) spec.holding.push_back(holding_from_json(h));

  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (init.is_number_integer()) {
      spec.initial_state = init.get<int>();
    } else if (init.is_array()) {
      spec.initial_distribution.resize(init.size());
      for (std::size_t i = 0; i < init.size(); ++i)
        spec.initial_distribution[i] = init.at(i).get<double>();
    } else {
      throw std::invalid_argument(
          "\"initial\" must be a state index or a probability vector");
    }
  }
  return spec;
}

json spec_to_json(const SemiMarkovSpec& spec) {
  json j;
  j["pi"] = json::array();
  for (int r = 0; r < spec.n_states(); ++r) {
    json row = json::array();
    for (int c = 0; c < spec.n_states(); ++c) row.push_back(spec.transition(r, c));
    j["pi"].push_back(row);
  }
  j["holding"] = json::array();
  for (const auto& h : spec.holding) j["holding"].push_back(holding_to_json(h));
  if (spec.initial_distribution.size() > 0) {
    j["initial"] = std::vector<double>(
        spec.initial_distribution.data(),
        spec.initial_distribution.data() + spec.initial_distribution.size());
  } else {
    j["initial"] = spec.initial_state;
  }
  return j;
}

namespace {

EndpointRef endpoint_from_json(const json& entry) {
  if (!entry.is_array() || entry.size() != 2)
    throw std::invalid_argument("glue endpoints must be [edge, side] pairs");
  EndpointRef ref;
  const auto& e = entry.at(0);
  if (e.is_string()) {
    const std::string s = e.get<std::string>();
    if (s.size() < 2 || s[0] != 'e')
      throw std::invalid_argument("edge names look like \"e0\", \"e1\", ...");
    ref.edge = std::stoi(s.substr(1));
  } else {
    ref.edge = e.get<int>();
  }
  ref.side = entry.at(1).get<int>();
  return ref;
}

}  // namespace

MetricGraph metric_from_json(const json& j) {
  std::vector<double> lengths;
  for (const auto& e : j.at("edges")) lengths.push_back(e.at("len").get<double>());

  std::vector<std::vector<EndpointRef>> classes;
  if (j.contains("glue")) {
    for (const auto& cls : j.at("glue")) {
      std::vector<EndpointRef> refs;
      for (const auto& entry : cls) refs.push_back(endpoint_from_json(entry));
      classes.push_back(std::move(refs));
    }
  }
  return build_metric_graph(std::move(lengths), classes);
}

json metric_to_json(const MetricGraph& g) {
  json j;
  j["edges"] = json::array();
  for (double len : g.lengths) j["edges"].push_back({{"len", len}});
  j["glue"] = json::array();
  for (const auto& cls : g.gluing) {
    if (cls.size() < 2) continue;  // singletons are implicit
    json jc = json::array();
    for (const auto& ref : cls)
      jc.push_back({"e" + std::to_string(ref.edge), ref.side});
    j["glue"].push_back(jc);
  }
  return j;
}

json spectrum_to_json(const Spectrum& spectrum) {
  json j;
  j["eigenvalues"] = std::vector<double>(
      spectrum.eigenvalues.data(),
      spectrum.eigenvalues.data() + spectrum.eigenvalues.size());
  j["eigenvectors"] = json::array();  // one row per eigenvector (column k)
  for (int k = 0; k < spectrum.dim(); ++k) {
    json row = json::array();
    for (int i = 0; i < spectrum.dim(); ++i) row.push_back(spectrum.eigenvectors(i, k));
    j["eigenvectors"].push_back(row);
  }
  j["mass"] = std::vector<double>(spectrum.mass.data(),
                                  spectrum.mass.data() + spectrum.mass.size());
  return j;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", value);
  return buffer;
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
  std::string out = "n,state,holding,renewal_time\n";
  const std::vector<double> renewal = trajectory.renewal_times();
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += std::to_string(trajectory.states[k]);
    out += ',';
    out += format_double(k == 0 ? 0.0 : trajectory.holdings[k - 1]);
    out += ',';
    out += format_double(renewal[k]);
    out += '\n';
  }
  return out;
}

std::string deviation_series_to_csv(const DeviationSeries& series,
                                    const std::vector<double>& bound) {
  if (!bound.empty() && bound.size() != series.times.size())
    throw std::invalid_argument("bound column length must match the series");
  std::string out = "t,state,deviation,residual,bound\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += format_double(series.times[i]);
    out += ',';
    out += std::to_string(series.state_at_time[i]);
    out += ',';
    out += format_double(series.deviation[i]);
    out += ',';
    out += format_double(series.residual[i]);
    out += ',';
    out += format_double(bound.empty() ? 1.0 : bound[i]);
    out += '\n';
  }
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace switchdiff
