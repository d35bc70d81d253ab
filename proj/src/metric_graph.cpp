#include "switchdiff/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace switchdiff {

namespace {

int endpoint_index(const EndpointRef& ref) { return 2 * ref.edge + ref.side; }

EndpointRef endpoint_from_index(int idx) { return {idx / 2, idx % 2}; }

// Canonical partition from an endpoint -> class-id map: classes ordered by
// smallest endpoint, endpoints ascending within a class.
std::vector<std::vector<EndpointRef>> canonical_partition(
    const std::vector<int>& assignment) {
  std::map<int, std::vector<int>> classes;
  for (int idx = 0; idx < static_cast<int>(assignment.size()); ++idx)
    classes[assignment[idx]].push_back(idx);
  std::vector<std::vector<int>> ordered;
  ordered.reserve(classes.size());
  for (auto& [key, members] : classes) ordered.push_back(std::move(members));
  std::sort(ordered.begin(), ordered.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<std::vector<EndpointRef>> result;
  result.reserve(ordered.size());
  for (const auto& members : ordered) {
    std::vector<EndpointRef> cls;
    cls.reserve(members.size());
    for (int idx : members) cls.push_back(endpoint_from_index(idx));
    result.push_back(std::move(cls));
  }
  return result;
}

void check_same_edge_family(const std::vector<MetricGraph>& graphs) {
  if (graphs.empty())
    throw std::invalid_argument("metric graph list must be non-empty");
  for (const auto& g : graphs)
    if (g.lengths != graphs.front().lengths)
      throw std::invalid_argument(
          "metric graphs must share one edge family (same lengths in order)");
}

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

double MetricGraph::total_length() const {
  return std::accumulate(lengths.begin(), lengths.end(), 0.0);
}

MetricGraph build_metric_graph(
    std::vector<double> lengths,
    const std::vector<std::vector<EndpointRef>>& classes) {
  const int n_edges = static_cast<int>(lengths.size());
  if (n_edges < 1)
    throw std::invalid_argument("metric graph needs at least one edge");
  for (int e = 0; e < n_edges; ++e)
    if (!(lengths[e] > 0.0) || !std::isfinite(lengths[e]))
      throw std::invalid_argument("edge length of edge " + std::to_string(e) +
                                  " must be positive and finite");

  std::vector<int> assignment(2 * n_edges, -1);
  int next_class = 0;
  for (const auto& cls : classes) {
    if (cls.empty())
      throw std::invalid_argument("gluing classes must be non-empty");
    for (const auto& ref : cls) {
      if (ref.edge < 0 || ref.edge >= n_edges || (ref.side != 0 && ref.side != 1))
        throw std::invalid_argument("gluing refers to a nonexistent endpoint");
      const int idx = endpoint_index(ref);
      if (assignment[idx] != -1)
        throw std::invalid_argument(
            "endpoint listed twice; the gluing must be a partition");
      assignment[idx] = next_class;
    }
    ++next_class;
  }
  for (int idx = 0; idx < 2 * n_edges; ++idx)
    if (assignment[idx] == -1) assignment[idx] = next_class++;

  MetricGraph g;
  g.lengths = std::move(lengths);
  g.gluing = canonical_partition(assignment);
  g.endpoint_class.assign(2 * n_edges, -1);
  for (int v = 0; v < static_cast<int>(g.gluing.size()); ++v)
    for (const auto& ref : g.gluing[v]) g.endpoint_class[endpoint_index(ref)] = v;
  return g;
}

MetricComponents metric_components(const MetricGraph& g) {
  UnionFind uf(g.n_vertices());
  for (int e = 0; e < g.n_edges(); ++e)
    uf.unite(g.endpoint_class[2 * e], g.endpoint_class[2 * e + 1]);

  MetricComponents result;
  std::map<int, int> relabel;
  result.vertex_component.resize(g.n_vertices());
  for (int v = 0; v < g.n_vertices(); ++v) {
    const int root = uf.find(v);
    auto [it, inserted] = relabel.try_emplace(root, result.count);
    if (inserted) ++result.count;
    result.vertex_component[v] = it->second;
  }
  result.edge_component.resize(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e)
    result.edge_component[e] = result.vertex_component[g.endpoint_class[2 * e]];
  return result;
}

MetricGraph union_metric(const std::vector<MetricGraph>& graphs) {
  check_same_edge_family(graphs);
  const int n_endpoints = 2 * graphs.front().n_edges();
  UnionFind uf(n_endpoints);
  for (const auto& g : graphs)
    for (const auto& cls : g.gluing)
      for (std::size_t i = 1; i < cls.size(); ++i)
        uf.unite(endpoint_index(cls[0]), endpoint_index(cls[i]));

  std::vector<int> assignment(n_endpoints);
  for (int idx = 0; idx < n_endpoints; ++idx) assignment[idx] = uf.find(idx);
  return build_metric_graph(graphs.front().lengths,
                            canonical_partition(assignment));
}

MetricGraph intersection_metric(const std::vector<MetricGraph>& graphs) {
  check_same_edge_family(graphs);
  const int n_endpoints = 2 * graphs.front().n_edges();

  // Two endpoints stay identified only when every input identifies them:
  // group by the tuple of per-graph class ids.
  std::map<std::vector<int>, int> groups;
  std::vector<int> assignment(n_endpoints);
  for (int idx = 0; idx < n_endpoints; ++idx) {
    std::vector<int> key;
    key.reserve(graphs.size());
    for (const auto& g : graphs) key.push_back(g.endpoint_class[idx]);
    auto [it, inserted] = groups.try_emplace(key, static_cast<int>(groups.size()));
    assignment[idx] = it->second;
  }
  return build_metric_graph(graphs.front().lengths,
                            canonical_partition(assignment));
}

EllipticCoefficient EllipticCoefficient::constant(
    const std::vector<int>& per_edge_nodes, double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("coefficient must be strictly positive");
  EllipticCoefficient p;
  p.samples.reserve(per_edge_nodes.size());
  for (int n : per_edge_nodes)
    p.samples.emplace_back(static_cast<std::size_t>(n) + 1, value);
  return p;
}

double EllipticCoefficient::floor() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& edge : samples)
    for (double v : edge) lo = std::min(lo, v);
  return lo;
}

std::vector<int> mesh_counts(const MetricGraph& g, double h_target) {
  if (!(h_target > 0.0))
    throw std::invalid_argument("target element size must be positive");
  std::vector<int> counts(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e)
    counts[e] = std::max(2, static_cast<int>(std::ceil(g.lengths[e] / h_target)));
  return counts;
}

Discretization discretize(const MetricGraph& g,
                          const EllipticCoefficient& p,
                          const std::vector<int>& per_edge_n) {
  if (per_edge_n.size() != static_cast<std::size_t>(g.n_edges()))
    throw std::invalid_argument("need one subdivision count per edge");
  for (int n : per_edge_n)
    if (n < 2)
      throw std::invalid_argument(
          "each edge needs at least two elements (loops degenerate otherwise)");
  if (p.samples.size() != static_cast<std::size_t>(g.n_edges()))
    throw std::invalid_argument("coefficient needs one sample row per edge");
  for (int e = 0; e < g.n_edges(); ++e) {
    if (p.samples[e].size() != static_cast<std::size_t>(per_edge_n[e]) + 1)
      throw std::invalid_argument(
          "coefficient row length must be the node count of its edge");
    for (double v : p.samples[e])
      if (!(v > 0.0))
        throw std::invalid_argument("coefficient must be strictly positive");
  }

  Discretization d;
  d.per_edge_n = per_edge_n;
  d.vertex_dof.assign(g.n_vertices(), -1);

  // Degrees of freedom are numbered walking the edges in order (a vertex at
  // first touch, then the interior nodes).  Chains of edges then produce a
  // narrow band, which the eigenvalue path exploits.
  int n_dof = 0;
  std::vector<std::vector<int>> edge_dofs(g.n_edges());
  for (int e = 0; e < g.n_edges(); ++e) {
    const int n_e = per_edge_n[e];
    edge_dofs[e].resize(n_e + 1);
    const int v0 = g.endpoint_class[2 * e];
    if (d.vertex_dof[v0] == -1) {
      d.vertex_dof[v0] = n_dof++;
      d.dof_location.emplace_back(e, 0.0);
    }
    edge_dofs[e][0] = d.vertex_dof[v0];
    const double h_e = g.lengths[e] / n_e;
    for (int i = 1; i < n_e; ++i) {
      edge_dofs[e][i] = n_dof++;
      d.dof_location.emplace_back(e, i * h_e);
    }
    const int v1 = g.endpoint_class[2 * e + 1];
    if (d.vertex_dof[v1] == -1) {
      d.vertex_dof[v1] = n_dof++;
      d.dof_location.emplace_back(e, g.lengths[e]);
    }
    edge_dofs[e][n_e] = d.vertex_dof[v1];
  }

  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(n_dof, n_dof);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n_dof);
  d.h = 0.0;
  for (int e = 0; e < g.n_edges(); ++e) {
    const int n_e = per_edge_n[e];
    const double h_e = g.lengths[e] / n_e;
    d.h = std::max(d.h, h_e);
    for (int i = 0; i < n_e; ++i) {
      const int a = edge_dofs[e][i];
      const int b = edge_dofs[e][i + 1];
      const double p_el = 0.5 * (p.samples[e][i] + p.samples[e][i + 1]);
      const double w = p_el / h_e;
      stiffness(a, a) += w;
      stiffness(b, b) += w;
      stiffness(a, b) -= w;
      stiffness(b, a) -= w;
      mass[a] += 0.5 * h_e;
      mass[b] += 0.5 * h_e;
    }
  }

  d.op.mass = mass;
  d.op.matrix = -(stiffness.array().colwise() / mass.array()).matrix();
  return d;
}

Discretization discretize(const MetricGraph& g,
                          const std::vector<int>& per_edge_n) {
  return discretize(g, EllipticCoefficient::constant(per_edge_n), per_edge_n);
}

Discretization discretize(const MetricGraph& g, double h_target) {
  return discretize(g, mesh_counts(g, h_target));
}

std::pair<double, double> lambda2_bounds(const MetricGraph& g) {
  if (metric_components(g).count != 1)
    throw std::invalid_argument("second-eigenvalue bounds require a connected graph");
  const double length = g.total_length();
  // A looped edge counts twice.  The lower bound is attained by equilateral
  // flowers and pumpkins, and its derivation assumes every edge has two
  // distinct endpoints; inserting a midpoint vertex on a loop changes nothing
  // spectrally but restores that form.  A circle (one looped edge) has second
  // eigenvalue -4 pi^2 / L^2, which sits exactly on the two-edge bound.
  int effective_edges = g.n_edges();
  for (int e = 0; e < g.n_edges(); ++e)
    if (g.endpoint_class[2 * e] == g.endpoint_class[2 * e + 1])
      ++effective_edges;
  const double n_edges = static_cast<double>(effective_edges);
  const double pi2 = M_PI * M_PI;
  return {-pi2 * n_edges * n_edges / (length * length), -pi2 / (length * length)};
}

SharedMeshFamily discretize_family(const std::vector<MetricGraph>& graphs,
                                   const std::vector<int>& per_edge_n,
                                   double penalty) {
  check_same_edge_family(graphs);
  const MetricGraph& base = graphs.front();
  if (per_edge_n.size() != static_cast<std::size_t>(base.n_edges()))
    throw std::invalid_argument("need one subdivision count per edge");
  for (int n : per_edge_n)
    if (n < 2)
      throw std::invalid_argument("each edge needs at least two elements");

  // Disjoint mesh: every endpoint keeps its own degree of freedom, so the
  // space and the lumped mass are shared by every gluing.
  int n_dof = 0;
  std::vector<std::vector<int>> edge_dofs(base.n_edges());
  std::vector<double> h_edge(base.n_edges());
  for (int e = 0; e < base.n_edges(); ++e) {
    const int n_e = per_edge_n[e];
    edge_dofs[e].resize(n_e + 1);
    for (int i = 0; i <= n_e; ++i) edge_dofs[e][i] = n_dof++;
    h_edge[e] = base.lengths[e] / n_e;
  }

  SharedMeshFamily family;
  family.h = *std::max_element(h_edge.begin(), h_edge.end());
  family.penalty = penalty > 0.0 ? penalty : 10.0 / family.h;

  Eigen::VectorXd mass = Eigen::VectorXd::Zero(n_dof);
  Eigen::MatrixXd broken = Eigen::MatrixXd::Zero(n_dof, n_dof);
  for (int e = 0; e < base.n_edges(); ++e) {
    const double w = 1.0 / (h_edge[e] * h_edge[e]);  // p == 1, unit elements
    for (int i = 0; i < per_edge_n[e]; ++i) {
      const int a = edge_dofs[e][i];
      const int b = edge_dofs[e][i + 1];
      broken(a, a) += w * h_edge[e];
      broken(b, b) += w * h_edge[e];
      broken(a, b) -= w * h_edge[e];
      broken(b, a) -= w * h_edge[e];
      mass[a] += 0.5 * h_edge[e];
      mass[b] += 0.5 * h_edge[e];
    }
  }
  family.mass = mass;

  auto endpoint_dof = [&](int endpoint_idx) {
    const int e = endpoint_idx / 2;
    return endpoint_idx % 2 == 0 ? edge_dofs[e].front() : edge_dofs[e].back();
  };

  family.operators.reserve(graphs.size());
  for (const auto& g : graphs) {
    // Broken stiffness plus a stiff spring along a spanning chain of every
    // gluing class; the kernel is then exactly the per-component constants
    // of this gluing, independent of mesh and spring strength.
    Eigen::MatrixXd stiffness = broken;
    for (const auto& cls : g.gluing) {
      for (std::size_t i = 1; i < cls.size(); ++i) {
        const int a = endpoint_dof(2 * cls[i - 1].edge + cls[i - 1].side);
        const int b = endpoint_dof(2 * cls[i].edge + cls[i].side);
        stiffness(a, a) += family.penalty;
        stiffness(b, b) += family.penalty;
        stiffness(a, b) -= family.penalty;
        stiffness(b, a) -= family.penalty;
      }
    }
    OperatorModel op;
    op.mass = mass;
    op.matrix = -(stiffness.array().colwise() / mass.array()).matrix();
    family.operators.push_back(std::move(op));
  }
  return family;
}

IntervalKind interval_kind_from_name(const std::string& name) {
  if (name == "neumann") return IntervalKind::neumann;
  if (name == "krein_surrogate") return IntervalKind::krein_surrogate;
  if (name == "dirichlet") return IntervalKind::dirichlet;
  if (name == "dirichlet_shifted") return IntervalKind::dirichlet_shifted;
  if (name == "variable_p") return IntervalKind::variable_p;
  throw std::invalid_argument("unknown interval operator kind: " + name);
}

std::string interval_kind_name(IntervalKind kind) {
  switch (kind) {
    case IntervalKind::neumann: return "neumann";
    case IntervalKind::krein_surrogate: return "krein_surrogate";
    case IntervalKind::dirichlet: return "dirichlet";
    case IntervalKind::dirichlet_shifted: return "dirichlet_shifted";
    case IntervalKind::variable_p: return "variable_p";
  }
  return "unknown";
}

OperatorModel interval_operator(IntervalKind kind, int n,
                                const std::vector<double>& p_samples) {
  if (n < 4)
    throw std::invalid_argument("interval operators need at least 4 grid points");
  if (kind != IntervalKind::variable_p && !p_samples.empty())
    throw std::invalid_argument("only variable_p takes a coefficient sample");

  OperatorModel op;
  op.mass = Eigen::VectorXd::Ones(n);
  op.matrix = Eigen::MatrixXd::Zero(n, n);

  switch (kind) {
    case IntervalKind::neumann:
    case IntervalKind::variable_p: {
      // Flow of (p u')' on n grid points over [0, 1]; kernel = constants.
      std::vector<double> p(n, 1.0);
      if (kind == IntervalKind::variable_p) {
        if (p_samples.size() != static_cast<std::size_t>(n))
          throw std::invalid_argument(
              "variable_p needs one coefficient sample per grid point");
        for (double v : p_samples)
          if (!(v > 0.0))
            throw std::invalid_argument("coefficient must be strictly positive");
        p = p_samples;
      }
      const double h = 1.0 / (n - 1);
      for (int i = 0; i + 1 < n; ++i) {
        const double w = 0.5 * (p[i] + p[i + 1]) / (h * h);
        op.matrix(i, i) -= w;
        op.matrix(i + 1, i + 1) -= w;
        op.matrix(i, i + 1) += w;
        op.matrix(i + 1, i) += w;
      }
      break;
    }
    case IntervalKind::krein_surrogate: {
      // -D^T D with the (n-2) x n stencil (1, -2, 1): self-adjoint, negative
      // semi-definite, kernel exactly the affine sequences.  Stands in for an
      // operator whose kernel is two-dimensional; no further spectral claims.
      Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n - 2, n);
      for (int i = 0; i < n - 2; ++i) {
        d(i, i) = 1.0;
        d(i, i + 1) = -2.0;
        d(i, i + 2) = 1.0;
      }
      op.matrix = -(d.transpose() * d);
      break;
    }
    case IntervalKind::dirichlet:
    case IntervalKind::dirichlet_shifted: {
      // Interior nodes of an (n+2)-point grid with the boundary values
      // eliminated; trivial kernel and gap near -pi^2.
      const double h = 1.0 / (n + 1);
      const double w = 1.0 / (h * h);
      for (int i = 0; i < n; ++i) {
        op.matrix(i, i) = -2.0 * w;
        if (i > 0) op.matrix(i, i - 1) = w;
        if (i + 1 < n) op.matrix(i, i + 1) = w;
      }
      if (kind == IntervalKind::dirichlet_shifted) {
        // Shift by the exact first eigenvalue -4 sin^2(pi h / 2) / h^2 so the
        // first discrete sine mode becomes the kernel.
        const double s = std::sin(0.5 * M_PI * h);
        const double lambda1 = -4.0 * w * s * s;
        op.matrix.diagonal().array() -= lambda1;
      }
      break;
    }
  }
  return op;
}

}  // namespace switchdiff
