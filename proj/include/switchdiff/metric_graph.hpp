#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "switchdiff/operator_model.hpp"

namespace switchdiff {

/// One endpoint of a metric edge: side 0 is the x = 0 end, side 1 the
/// x = length end.
struct EndpointRef {
  int edge = 0;
  int side = 0;

  bool operator==(const EndpointRef&) const = default;
};

/// Collection of intervals [0, length_e] glued along a partition of their
/// 2|E| endpoints.  Loops (both ends of an edge in one class) and parallel
/// edges are allowed.  The gluing is stored canonically: classes sorted by
/// their smallest endpoint, endpoints sorted within a class, so equal graphs
/// compare equal.
struct MetricGraph {
  std::vector<double> lengths;
  std::vector<std::vector<EndpointRef>> gluing;  // partition into vertices
  std::vector<int> endpoint_class;  // endpoint 2e+side -> vertex index

  int n_edges() const { return static_cast<int>(lengths.size()); }
  int n_vertices() const { return static_cast<int>(gluing.size()); }
  double total_length() const;

  bool operator==(const MetricGraph& o) const {
    return lengths == o.lengths && gluing == o.gluing;
  }
};

/// Validates lengths and the endpoint partition.  Endpoints missing from
/// `classes` become singleton vertices; listing an endpoint twice is an
/// error.
MetricGraph build_metric_graph(std::vector<double> lengths,
                               const std::vector<std::vector<EndpointRef>>& classes);

struct MetricComponents {
  int count = 0;
  std::vector<int> edge_component;
  std::vector<int> vertex_component;
};

MetricComponents metric_components(const MetricGraph& g);

/// Union: same edge family, endpoints identified by the transitive closure
/// of all the input identifications.  Intersection: endpoints identified only
/// when every input identifies them.
MetricGraph union_metric(const std::vector<MetricGraph>& graphs);
MetricGraph intersection_metric(const std::vector<MetricGraph>& graphs);

/// Strictly positive diffusion coefficient sampled on each edge's mesh nodes
/// (n_e + 1 values for edge e).
struct EllipticCoefficient {
  std::vector<std::vector<double>> samples;

  static EllipticCoefficient constant(const std::vector<int>& per_edge_nodes,
                                      double value = 1.0);
  double floor() const;
};

/// Mesh realization of the second-order operator u -> (p u')' with the
/// natural vertex conditions: piecewise-linear elements with the diagonal
/// (lumped) mass.  Continuity across a vertex is imposed by sharing the
/// degree of freedom; the flux balance then holds automatically in the weak
/// form.  The result is literally a weighted graph Laplacian on the
/// subdivision mesh, so its kernel counts components exactly at any
/// resolution.
struct Discretization {
  OperatorModel op;
  double h = 0.0;                 // largest element size
  std::vector<int> per_edge_n;    // subintervals per edge
  std::vector<int> vertex_dof;    // vertex index -> dof
  std::vector<std::pair<int, double>> dof_location;  // dof -> (edge, x)
};

Discretization discretize(const MetricGraph& g,
                          const EllipticCoefficient& p,
                          const std::vector<int>& per_edge_n);
Discretization discretize(const MetricGraph& g,
                          const std::vector<int>& per_edge_n);
/// Per-edge counts from a target element size: n_e = max(2, ceil(len/h)).
Discretization discretize(const MetricGraph& g, double h_target);
std::vector<int> mesh_counts(const MetricGraph& g, double h_target);

/// For a connected graph, the second eigenvalue lies in
/// [-pi^2 |E|^2 / L^2, -pi^2 / L^2]; the upper end is attained exactly by a
/// single interval.  |E| counts a looped edge twice (equivalent to placing a
/// midpoint vertex on it, which leaves the spectrum alone).
std::pair<double, double> lambda2_bounds(const MetricGraph& g);

/// Several gluings of one shared edge family realized on a common space:
/// every endpoint keeps its own degree of freedom and each gluing class is
/// enforced by a stiff quadratic penalty between identified endpoints.  The
/// penalty keeps each operator self-adjoint and negative semi-definite with
/// kernel exactly the component indicators of its own gluing, which is the
/// only structure the switching arguments use; all operators share one mesh
/// and one mass vector, so they can form an Ensemble.
struct SharedMeshFamily {
  std::vector<OperatorModel> operators;
  Eigen::VectorXd mass;
  double h = 0.0;
  double penalty = 0.0;
};

SharedMeshFamily discretize_family(const std::vector<MetricGraph>& graphs,
                                   const std::vector<int>& per_edge_n,
                                   double penalty = 0.0);

/// Reference operators on [0, 1] sharing one grid of n points and the
/// uniform (unit) mass, so any mix of kinds forms a valid Ensemble:
///   neumann          second-difference flow, kernel = constants
///   variable_p       same with coefficient p sampled on the n grid points
///   krein_surrogate  -D^T D for the (n-2) x n second-difference stencil;
///                    kernel = discrete affine functions (dimension 2)
///   dirichlet        interior second-difference flow, trivial kernel,
///                    gap near -pi^2
///   dirichlet_shifted  dirichlet shifted by its own first eigenvalue;
///                    kernel = the first discrete sine mode
enum class IntervalKind {
  neumann,
  krein_surrogate,
  dirichlet,
  dirichlet_shifted,
  variable_p,
};

IntervalKind interval_kind_from_name(const std::string& name);
std::string interval_kind_name(IntervalKind kind);

OperatorModel interval_operator(IntervalKind kind, int n,
                                const std::vector<double>& p_samples = {});

}  // namespace switchdiff
