#include "switchdiff/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace switchdiff {

namespace {

std::string edge_str(int v, int w) {
  return "{" + std::to_string(v) + "," + std::to_string(w) + "}";
}

void check_common_vertex_set(const std::vector<WeightedGraph>& graphs) {
  if (graphs.empty())
    throw std::invalid_argument("graph list must be non-empty");
  for (const auto& g : graphs)
    if (g.n_vertices != graphs.front().n_vertices)
      throw std::invalid_argument("graphs must share one vertex set");
}

}  // namespace

WeightedGraph build_graph(int n_vertices,
                          const std::vector<std::pair<int, int>>& edges,
                          std::vector<double> vertex_weights,
                          std::vector<double> edge_weights,
                          std::vector<std::string> labels) {
  if (n_vertices < 1)
    throw std::invalid_argument("graph needs at least one vertex");
  if (vertex_weights.empty()) vertex_weights.assign(n_vertices, 1.0);
  if (edge_weights.empty()) edge_weights.assign(edges.size(), 1.0);
  if (vertex_weights.size() != static_cast<std::size_t>(n_vertices))
    throw std::invalid_argument("vertex weight count must equal the vertex count");
  if (edge_weights.size() != edges.size())
    throw std::invalid_argument("edge weight count must equal the edge count");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n_vertices))
    throw std::invalid_argument("label count must equal the vertex count");
  for (int v = 0; v < n_vertices; ++v)
    if (!(vertex_weights[v] > 0.0))
      throw std::invalid_argument("vertex weight of " + std::to_string(v) +
                                  " must be strictly positive");

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::pair<int, int>> canonical(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [v, w] = edges[i];
    if (v < 0 || v >= n_vertices || w < 0 || w >= n_vertices)
      throw std::invalid_argument("edge " + edge_str(v, w) +
                                  " has an endpoint outside the vertex range");
    if (v == w)
      throw std::invalid_argument("loop edge at vertex " + std::to_string(v) +
                                  " is not allowed in a simple graph");
    if (!(edge_weights[i] > 0.0))
      throw std::invalid_argument("edge weight of " + edge_str(v, w) +
                                  " must be strictly positive");
    canonical[i] = {std::min(v, w), std::max(v, w)};
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical[a] < canonical[b];
  });

  WeightedGraph g;
  g.n_vertices = n_vertices;
  g.vertex_weights = std::move(vertex_weights);
  g.labels = std::move(labels);
  g.edges.reserve(edges.size());
  g.edge_weights.reserve(edges.size());
  for (std::size_t i : order) {
    if (!g.edges.empty() && g.edges.back() == canonical[i])
      throw std::invalid_argument("duplicate edge " +
                                  edge_str(canonical[i].first, canonical[i].second));
    g.edges.push_back(canonical[i]);
    g.edge_weights.push_back(edge_weights[i]);
  }
  return g;
}

WeightedGraph union_graphs(const std::vector<WeightedGraph>& graphs) {
  check_common_vertex_set(graphs);
  const int n = graphs.front().n_vertices;

  std::map<std::pair<int, int>, double> mu;  // max over inputs, absent = 0
  for (const auto& g : graphs)
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      auto [it, inserted] = mu.try_emplace(g.edges[i], g.edge_weights[i]);
      if (!inserted) it->second = std::max(it->second, g.edge_weights[i]);
    }

  std::vector<double> m(n);
  for (int v = 0; v < n; ++v) {
    m[v] = graphs.front().vertex_weights[v];
    for (const auto& g : graphs) m[v] = std::min(m[v], g.vertex_weights[v]);
  }

  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;
  for (const auto& [e, w] : mu) {
    edges.push_back(e);
    weights.push_back(w);
  }
  return build_graph(n, edges, std::move(m), std::move(weights));
}

WeightedGraph intersection_graphs(const std::vector<WeightedGraph>& graphs) {
  check_common_vertex_set(graphs);
  const int n = graphs.front().n_vertices;

  std::map<std::pair<int, int>, std::pair<int, double>> seen;  // count, min mu
  for (const auto& g : graphs)
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      auto [it, inserted] =
          seen.try_emplace(g.edges[i], 1, g.edge_weights[i]);
      if (!inserted) {
        it->second.first += 1;
        it->second.second = std::min(it->second.second, g.edge_weights[i]);
      }
    }

  std::vector<double> m(n);
  for (int v = 0; v < n; ++v) {
    m[v] = graphs.front().vertex_weights[v];
    for (const auto& g : graphs) m[v] = std::max(m[v], g.vertex_weights[v]);
  }

  const int total = static_cast<int>(graphs.size());
  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;
  for (const auto& [e, cw] : seen)
    if (cw.first == total) {
      edges.push_back(e);
      weights.push_back(cw.second);
    }
  return build_graph(n, edges, std::move(m), std::move(weights));
}

std::vector<std::vector<int>> connected_components(const WeightedGraph& g) {
  std::vector<int> parent(g.n_vertices);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (auto [v, w] : g.edges) {
    int a = find(v), b = find(w);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  std::map<int, std::vector<int>> by_root;  // keyed by smallest member
  for (int v = 0; v < g.n_vertices; ++v) by_root[find(v)].push_back(v);

  std::vector<std::vector<int>> components;
  components.reserve(by_root.size());
  for (auto& [root, members] : by_root) components.push_back(std::move(members));
  return components;
}

OperatorModel laplacian(const WeightedGraph& g) {
  const int n = g.n_vertices;
  OperatorModel op;
  op.matrix = Eigen::MatrixXd::Zero(n, n);
  op.mass = Eigen::Map<const Eigen::VectorXd>(g.vertex_weights.data(), n);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    auto [v, w] = g.edges[i];
    const double mu = g.edge_weights[i];
    op.matrix(v, w) += mu / op.mass[v];
    op.matrix(w, v) += mu / op.mass[w];
    op.matrix(v, v) -= mu / op.mass[v];
    op.matrix(w, w) -= mu / op.mass[w];
  }
  return op;
}

double rayleigh_quotient(const WeightedGraph& g, const Eigen::VectorXd& f) {
  if (f.size() != g.n_vertices)
    throw std::invalid_argument("vector length must equal the vertex count");
  double denom = 0.0;
  for (int v = 0; v < g.n_vertices; ++v)
    denom += g.vertex_weights[v] * f[v] * f[v];
  if (denom == 0.0)
    throw std::invalid_argument("rayleigh quotient of the zero vector is undefined");
  double num = 0.0;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    auto [v, w] = g.edges[i];
    const double d = f[v] - f[w];
    num += g.edge_weights[i] * d * d;
  }
  return num / denom;
}

}  // namespace switchdiff
