#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "switchdiff/operator_model.hpp"

namespace switchdiff {

/// Finite simple graph with strictly positive edge weights mu and vertex
/// weights m.  Edges are stored canonically as (min, max), sorted, so equal
/// graphs compare equal with operator==.
struct WeightedGraph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> edge_weights;    // mu, aligned with edges
  std::vector<double> vertex_weights;  // m, one entry per vertex
  std::vector<std::string> labels;     // optional; empty or one per vertex

  bool operator==(const WeightedGraph&) const = default;
};

/// Validates and canonicalizes the inputs.  Empty weight vectors default to
/// all ones.  Rejects loops, duplicate edges, out-of-range endpoints and
/// non-positive weights with distinct messages.
WeightedGraph build_graph(int n_vertices,
                          const std::vector<std::pair<int, int>>& edges,
                          std::vector<double> vertex_weights = {},
                          std::vector<double> edge_weights = {},
                          std::vector<std::string> labels = {});

/// Union over a shared vertex set: edge set union, mu = max over the inputs
/// (absent edges count as 0), m = min over the inputs.
WeightedGraph union_graphs(const std::vector<WeightedGraph>& graphs);

/// Intersection: edges present in every input, mu = min, m = max.
WeightedGraph intersection_graphs(const std::vector<WeightedGraph>& graphs);

/// Connected components as sorted vertex lists, ordered by smallest member.
std::vector<std::vector<int>> connected_components(const WeightedGraph& g);

/// Weighted Laplacian: A[v][v] = -(1/m(v)) sum of incident mu,
/// A[v][w] = mu({v,w})/m(v) for edges.  Negative semi-definite with kernel
/// spanned by the component indicator functions.
OperatorModel laplacian(const WeightedGraph& g);

/// sum_e mu(e) |f(v)-f(w)|^2 / ||f||_m^2, the (sign-flipped) quadratic form
/// of the Laplacian.  Nonnegative; rejects the zero vector.
double rayleigh_quotient(const WeightedGraph& g, const Eigen::VectorXd& f);

}  // namespace switchdiff
