#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "switchdiff/graph.hpp"
#include "switchdiff/spectral.hpp"

using namespace switchdiff;

namespace {

WeightedGraph path3() { return build_graph(3, {{0, 1}, {1, 2}}); }

WeightedGraph random_graph(std::mt19937& gen, int n) {
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  std::bernoulli_distribution flip(0.4);
  std::vector<std::pair<int, int>> edges;
  std::vector<double> mu;
  for (int v = 0; v < n; ++v)
    for (int w = v + 1; w < n; ++w)
      if (flip(gen)) {
        edges.push_back({v, w});
        mu.push_back(weight(gen));
      }
  std::vector<double> m(n);
  for (auto& x : m) x = weight(gen);
  return build_graph(n, edges, m, mu);
}

std::vector<double> indicator(const std::vector<int>& verts, int n) {
  std::vector<double> f(n, 0.0);
  for (int v : verts) f[v] = 1.0;
  return f;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("construction validates its inputs") {
  CHECK_THROWS_AS(build_graph(3, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(2, {{0, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(2, {{0, 1}}, {}, {0.0}), std::invalid_argument);

  const WeightedGraph g = build_graph(2, {{1, 0}});
  CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(g.vertex_weights == std::vector<double>{1.0, 1.0});
}

TEST_CASE("union merges edge sets and takes extremal weights") {
  const auto a = build_graph(3, {{0, 1}}, {}, {1.0});
  const auto b = build_graph(3, {{1, 2}}, {}, {2.0});
  const auto u = union_graphs({a, b});
  CHECK(u.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
  CHECK(u.edge_weights == std::vector<double>{1.0, 2.0});

  // Shared edge keeps the larger mu, vertices the smaller m.
  const auto c = build_graph(2, {{0, 1}}, {2.0, 5.0}, {3.0});
  const auto d = build_graph(2, {{0, 1}}, {4.0, 1.0}, {7.0});
  const auto cd = union_graphs({c, d});
  CHECK(cd.edge_weights == std::vector<double>{7.0});
  CHECK(cd.vertex_weights == std::vector<double>{2.0, 1.0});

  const auto i = intersection_graphs({c, d});
  CHECK(i.edge_weights == std::vector<double>{3.0});
  CHECK(i.vertex_weights == std::vector<double>{4.0, 5.0});

  // Disjoint edge sets intersect to the edgeless graph.
  const auto empty = intersection_graphs({a, b});
  CHECK(empty.edges.empty());
}

TEST_CASE("union and intersection form a lattice") {
  std::mt19937 gen(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 7)(gen);
    const auto a = random_graph(gen, n);
    const auto b = random_graph(gen, n);
    const auto c = random_graph(gen, n);

    CHECK(union_graphs({a, b}) == union_graphs({b, a}));
    CHECK(intersection_graphs({a, b}) == intersection_graphs({b, a}));
    CHECK(union_graphs({union_graphs({a, b}), c}) ==
          union_graphs({a, union_graphs({b, c})}));
    CHECK(intersection_graphs({intersection_graphs({a, b}), c}) ==
          intersection_graphs({a, intersection_graphs({b, c})}));
    CHECK(union_graphs({a, a}) == a);
    CHECK(intersection_graphs({a, a}) == a);
  }
}

TEST_CASE("union components coarsen the components of each input") {
  std::mt19937 gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 8)(gen);
    const auto a = random_graph(gen, n);
    const auto b = random_graph(gen, n);
    const auto u = union_graphs({a, b});

    // Two vertices joined in an input stay joined in the union.
    std::vector<int> comp_of(n);
    const auto union_comps = connected_components(u);
    for (std::size_t c = 0; c < union_comps.size(); ++c)
      for (int v : union_comps[c]) comp_of[v] = static_cast<int>(c);
    for (const auto* g : {&a, &b})
      for (const auto& comp : connected_components(*g))
        for (int v : comp) CHECK(comp_of[v] == comp_of[comp.front()]);
  }
}

TEST_CASE("path laplacian matches the hand computation") {
  const OperatorModel op = laplacian(path3());
  Eigen::MatrixXd expected(3, 3);
  expected << -1, 1, 0, 1, -2, 1, 0, 1, -1;
  CHECK((op.matrix - expected).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::VectorXd eigs = eigenvalues_only(op);
  CHECK(eigs(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eigs(1) == doctest::Approx(-1.0));
  CHECK(eigs(2) == doctest::Approx(-3.0));
}

TEST_CASE("triangle laplacian spectrum is 0, -3, -3") {
  const auto k3 = build_graph(3, {{0, 1}, {1, 2}, {0, 2}});
  const OperatorModel op = laplacian(k3);
  CHECK(op.matrix.diagonal().isApproxToConstant(-2.0));
  const Eigen::VectorXd eigs = eigenvalues_only(op);
  CHECK(eigs(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eigs(1) == doctest::Approx(-3.0));
  CHECK(eigs(2) == doctest::Approx(-3.0));
}

TEST_CASE("edgeless graph has the zero generator") {
  const auto g = build_graph(4, {});
  CHECK(laplacian(g).matrix.isZero(0.0));
  CHECK(connected_components(g).size() == 4);
}

TEST_CASE("laplacian annihilates component indicators") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 9)(gen);
    const auto g = random_graph(gen, n);
    const OperatorModel op = laplacian(g);
    const double scale = op.matrix.cwiseAbs().maxCoeff();
    for (const auto& comp : connected_components(g)) {
      const auto f = indicator(comp, n);
      const Eigen::VectorXd lf =
          op.matrix * Eigen::Map<const Eigen::VectorXd>(f.data(), n);
      CHECK(lf.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, scale));
    }
    // Kernel dimension equals the number of components.
    CHECK(kernel_projector(op).rank ==
          static_cast<int>(connected_components(g).size()));
  }
}

TEST_CASE("kernel rank ignores the choice of weights") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> weight(0.1, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 8)(gen);
    const auto g = random_graph(gen, n);
    std::vector<double> m(n), mu(g.edges.size());
    for (auto& x : m) x = weight(gen);
    for (auto& x : mu) x = weight(gen);
    const auto reweighted = build_graph(n, g.edges, m, mu);
    CHECK(kernel_projector(laplacian(g)).rank ==
          kernel_projector(laplacian(reweighted)).rank);
  }
}

TEST_CASE("rayleigh quotient matches hand values") {
  Eigen::VectorXd f(3);
  f << 1, 0, -1;
  CHECK(rayleigh_quotient(path3(), f) == doctest::Approx(1.0));

  const auto edge = build_graph(2, {{0, 1}}, {}, {5.0});
  Eigen::VectorXd g(2);
  g << 1, -1;
  CHECK(rayleigh_quotient(edge, g) == doctest::Approx(10.0));

  CHECK(rayleigh_quotient(path3(), Eigen::VectorXd::Ones(3)) ==
        doctest::Approx(0.0));
}

}  // TEST_SUITE
