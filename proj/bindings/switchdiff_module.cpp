// Python bindings for the core operations.  JSON-backed constructors take
// and return strings so Python callers can use plain dicts with json.dumps.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "switchdiff/experiment.hpp"
#include "switchdiff/graph.hpp"
#include "switchdiff/json_io.hpp"
#include "switchdiff/metric_graph.hpp"
#include "switchdiff/propagator.hpp"
#include "switchdiff/semi_markov.hpp"
#include "switchdiff/spectral.hpp"
#include "switchdiff/verify.hpp"

namespace py = pybind11;
using namespace switchdiff;
using nlohmann::json;

PYBIND11_MODULE(_switchdiff, m) {
  m.doc() = "Switched diffusion on weighted and metric graphs";

  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<WeightedGraph>(m, "WeightedGraph")
      .def_readonly("n_vertices", &WeightedGraph::n_vertices)
      .def_readonly("edges", &WeightedGraph::edges)
      .def_readonly("edge_weights", &WeightedGraph::edge_weights)
      .def_readonly("vertex_weights", &WeightedGraph::vertex_weights)
      .def("to_json", [](const WeightedGraph& g) { return graph_to_json(g).dump(); })
      .def("__eq__", [](const WeightedGraph& a, const WeightedGraph& b) { return a == b; });

  m.def("build_graph", &build_graph, py::arg("n_vertices"), py::arg("edges"),
        py::arg("vertex_weights") = std::vector<double>{},
        py::arg("edge_weights") = std::vector<double>{},
        py::arg("labels") = std::vector<std::string>{},
        "Simple weighted graph; edges are (v, w) pairs");
  m.def("graph_from_json",
        [](const std::string& s) { return graph_from_json(json::parse(s)); });
  m.def("union_graphs", &union_graphs);
  m.def("intersection_graphs", &intersection_graphs);
  m.def("connected_components", &connected_components);
  m.def("rayleigh_quotient", &rayleigh_quotient);

  py::class_<OperatorModel>(m, "OperatorModel")
      .def_readonly("matrix", &OperatorModel::matrix)
      .def_readonly("mass", &OperatorModel::mass)
      .def("dim", &OperatorModel::dim)
      .def("validate", &OperatorModel::validate, py::arg("sym_tol") = 1e-12);

  m.def("laplacian", &laplacian);

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("eigenvalues", &Spectrum::eigenvalues)
      .def_readonly("eigenvectors", &Spectrum::eigenvectors)
      .def_readonly("mass", &Spectrum::mass);

  py::class_<Projector>(m, "Projector")
      .def_readonly("matrix", &Projector::matrix)
      .def_readonly("mass", &Projector::mass)
      .def_readonly("rank", &Projector::rank);

  m.def("eigendecompose", &eigendecompose);
  m.def("eigenvalues_only", &eigenvalues_only);
  m.def("evolve", py::overload_cast<const OperatorModel&, double>(&evolve),
        py::arg("op"), py::arg("t"));
  m.def("evolve", py::overload_cast<const Spectrum&, double>(&evolve),
        py::arg("spectrum"), py::arg("t"));
  m.def("kernel_projector",
        py::overload_cast<const OperatorModel&, double>(&kernel_projector),
        py::arg("op"), py::arg("tol") = 1e-9);
  m.def("intersection_projector", &intersection_projector, py::arg("ops"),
        py::arg("tol") = 1e-9);
  m.def("weighted_operator_norm", &weighted_operator_norm);
  m.def("spectral_gap", &spectral_gap, py::arg("op"), py::arg("tol") = 1e-9);

  py::class_<HoldingDistribution>(m, "HoldingDistribution")
      .def_static("deterministic", &HoldingDistribution::deterministic)
      .def_static("exponential", &HoldingDistribution::exponential)
      .def_static("gamma", &HoldingDistribution::gamma)
      .def("mean", &HoldingDistribution::mean)
      .def("describe", &HoldingDistribution::describe);

  py::class_<SemiMarkovSpec>(m, "SemiMarkovSpec")
      .def(py::init<>())
      .def_readwrite("transition", &SemiMarkovSpec::transition)
      .def_readwrite("holding", &SemiMarkovSpec::holding)
      .def_readwrite("initial_state", &SemiMarkovSpec::initial_state)
      .def("n_states", &SemiMarkovSpec::n_states)
      .def_static("from_json", [](const std::string& s) {
        return spec_from_json(json::parse(s));
      })
      .def("to_json", [](const SemiMarkovSpec& s) { return spec_to_json(s).dump(); });

  py::class_<SpecReport>(m, "SpecReport")
      .def_readonly("violations", &SpecReport::violations)
      .def_readonly("warnings", &SpecReport::warnings)
      .def("ok", &SpecReport::ok);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("holdings", &Trajectory::holdings)
      .def_readonly("horizon", &Trajectory::horizon)
      .def_readonly("seed", &Trajectory::seed)
      .def("n_jumps", &Trajectory::n_jumps)
      .def("renewal_times", &Trajectory::renewal_times)
      .def("state_at", &Trajectory::state_at)
      .def("to_csv", &trajectory_to_csv);

  m.def("validate_spec", &validate_spec);
  m.def("invariant_distribution", &invariant_distribution);
  m.def("occupation_fractions", &occupation_fractions);
  m.def("sample_trajectory", &sample_trajectory, py::arg("spec"),
        py::arg("horizon"), py::arg("seed"));
  m.def("empirical_occupation", &empirical_occupation);
  m.def("derive_stream_seed", &derive_stream_seed, py::arg("master_seed"),
        py::arg("index"));

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init<std::vector<OperatorModel>, std::vector<std::string>,
                    double>(),
           py::arg("operators"), py::arg("labels") = std::vector<std::string>{},
           py::arg("tol") = 1e-9)
      .def_readonly("operators", &Ensemble::operators)
      .def_readonly("labels", &Ensemble::labels)
      .def_property_readonly("p_k", [](const Ensemble& e) { return e.p_k; })
      .def("dim", &Ensemble::dim)
      .def("n_states", &Ensemble::n_states);

  py::class_<DeviationSeries>(m, "DeviationSeries")
      .def_readonly("times", &DeviationSeries::times)
      .def_readonly("deviation", &DeviationSeries::deviation)
      .def_readonly("residual", &DeviationSeries::residual)
      .def_readonly("state_at_time", &DeviationSeries::state_at_time);

  py::class_<RateReport>(m, "RateReport")
      .def_readonly("assumption_holds", &RateReport::assumption_holds)
      .def_readonly("alpha_conservative", &RateReport::alpha_conservative)
      .def_readonly("alpha_averaged", &RateReport::alpha_averaged)
      .def_readonly("conservative_state", &RateReport::conservative_state);

  m.def("propagate", &propagate, py::arg("ensemble"), py::arg("trajectory"),
        py::arg("t"));
  m.def("deviation_series", &deviation_series);
  m.def("covering_contraction_norm", &covering_contraction_norm);
  m.def("theoretical_rate", &theoretical_rate);
  m.def("estimate_rate", &estimate_rate, py::arg("series"), py::arg("t_lo"),
        py::arg("t_hi"));

  py::class_<MetricGraph>(m, "MetricGraph")
      .def_readonly("lengths", &MetricGraph::lengths)
      .def("n_edges", &MetricGraph::n_edges)
      .def("n_vertices", &MetricGraph::n_vertices)
      .def("total_length", &MetricGraph::total_length)
      .def("to_json", [](const MetricGraph& g) { return metric_to_json(g).dump(); })
      .def_static("from_json", [](const std::string& s) {
        return metric_from_json(json::parse(s));
      });

  m.def("build_metric_graph",
        [](std::vector<double> lengths,
           const std::vector<std::vector<std::pair<int, int>>>& glue) {
          std::vector<std::vector<EndpointRef>> classes;
          for (const auto& cls : glue) {
            std::vector<EndpointRef> refs;
            for (const auto& [edge, side] : cls) refs.push_back({edge, side});
            classes.push_back(std::move(refs));
          }
          return build_metric_graph(std::move(lengths), classes);
        },
        py::arg("lengths"), py::arg("glue") = std::vector<std::vector<std::pair<int, int>>>{},
        "Edge intervals plus gluing classes of (edge, side) endpoint pairs");
  m.def("union_metric", &union_metric);
  m.def("intersection_metric", &intersection_metric);
  m.def("lambda2_bounds", &lambda2_bounds);
  m.def("metric_laplacian",
        [](const MetricGraph& g, double h_target) {
          return discretize(g, h_target).op;
        },
        py::arg("graph"), py::arg("h_target") = 0.05,
        "Lumped finite element generator with natural vertex conditions");
  m.def("interval_operator",
        [](const std::string& kind, int n, const std::vector<double>& p) {
          return interval_operator(interval_kind_from_name(kind), n, p);
        },
        py::arg("kind"), py::arg("n") = 200,
        py::arg("p") = std::vector<double>{});

  m.def("run_experiment_json", [](const std::string& config) {
    const ExperimentSummary s = run_experiment(config_from_json(json::parse(config)));
    return summary_to_json(s).dump();
  },
        "Run a full switching experiment from a config JSON string; returns "
        "the summary as a JSON string");
  m.def("run_verify_suite", [](const std::string& suite) {
    return suite_to_json(run_suite(suite)).dump();
  });
  m.def("verify_suite_names", [] { return suite_names(); });
}
