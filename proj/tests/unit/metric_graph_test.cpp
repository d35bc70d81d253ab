#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "switchdiff/metric_graph.hpp"
#include "switchdiff/spectral.hpp"

using namespace switchdiff;

namespace {

constexpr double pi = std::numbers::pi;

MetricGraph segment2() { return build_metric_graph({2.0}, {}); }

MetricGraph glued_path() {
  // Two unit intervals joined end to start.
  return build_metric_graph({1.0, 1.0}, {{{0, 1}, {1, 0}}});
}

MetricGraph loose_pair() { return build_metric_graph({1.0, 1.0}, {}); }

}  // namespace

TEST_SUITE("metric") {

TEST_CASE("gluing determines the vertex set") {
  const MetricGraph seg = segment2();
  CHECK(seg.n_edges() == 1);
  CHECK(seg.n_vertices() == 2);
  CHECK(seg.total_length() == 2.0);

  const MetricGraph path = glued_path();
  CHECK(path.n_vertices() == 3);
  CHECK(metric_components(path).count == 1);

  const MetricGraph loose = loose_pair();
  CHECK(loose.n_vertices() == 4);
  CHECK(metric_components(loose).count == 2);

  // A loop uses both ends of one edge.
  const MetricGraph loop = build_metric_graph({1.0}, {{{0, 0}, {0, 1}}});
  CHECK(loop.n_vertices() == 1);
  CHECK(metric_components(loop).count == 1);

  CHECK_THROWS_AS(build_metric_graph({0.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_metric_graph({1.0}, {{{0, 0}}, {{0, 0}, {0, 1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_metric_graph({1.0}, {{{0, 2}}}), std::invalid_argument);
}

TEST_CASE("union closes the identifications, intersection refines them") {
  const MetricGraph path = glued_path();
  const MetricGraph loose = loose_pair();

  CHECK(union_metric({path, loose}) == path);
  CHECK(intersection_metric({path, loose}) == loose);
  CHECK(union_metric({path, path}) == path);
  CHECK(intersection_metric({path, path}) == path);

  // Closure across different gluings: join 0-1 and 1-2 in one input and
  // 2-0 in the other; the union welds all three edges into one circle.
  const MetricGraph chain =
      build_metric_graph({1.0, 1.0, 1.0}, {{{0, 1}, {1, 0}}, {{1, 1}, {2, 0}}});
  const MetricGraph back =
      build_metric_graph({1.0, 1.0, 1.0}, {{{2, 1}, {0, 0}}});
  const MetricGraph circle = union_metric({chain, back});
  CHECK(circle.n_vertices() == 3);
  CHECK(metric_components(circle).count == 1);

  CHECK_THROWS_AS(union_metric({path, build_metric_graph({2.0}, {})}),
                  std::invalid_argument);
}

TEST_CASE("second eigenvalue bounds for reference shapes") {
  const auto single = lambda2_bounds(segment2());
  CHECK(single.first == doctest::Approx(-pi * pi / 4.0));
  CHECK(single.second == doctest::Approx(-pi * pi / 4.0));

  const auto two_edge = lambda2_bounds(glued_path());
  CHECK(two_edge.first == doctest::Approx(-pi * pi));
  CHECK(two_edge.second == doctest::Approx(-pi * pi / 4.0));

  const MetricGraph star = build_metric_graph(
      {1.0, 1.0, 1.0}, {{{0, 1}, {1, 1}, {2, 1}}});
  const auto star_bounds = lambda2_bounds(star);
  CHECK(star_bounds.first == doctest::Approx(-pi * pi));
  CHECK(star_bounds.second == doctest::Approx(-pi * pi / 9.0));

  // A circle realized as one looped edge.  The loop counts as two edges, and
  // the circle's second eigenvalue -4 pi^2 / L^2 lands exactly on the lower
  // bound; with a single-edge count the circle would sit outside its own band.
  const MetricGraph circle = build_metric_graph({2.0}, {{{0, 0}, {0, 1}}});
  const auto loop_bounds = lambda2_bounds(circle);
  CHECK(loop_bounds.first == doctest::Approx(-pi * pi));
  CHECK(loop_bounds.second == doctest::Approx(-pi * pi / 4.0));
  const double gap = spectral_gap(discretize(circle, std::vector<int>{100}).op);
  CHECK(gap >= loop_bounds.first - 1e-9);  // discrete magnitudes shrink
  CHECK(gap <= loop_bounds.second + 1e-9);
}

TEST_CASE("discretization kernel counts components at any resolution") {
  for (const MetricGraph& g : {segment2(), glued_path(), loose_pair()}) {
    for (int n : {2, 5, 17}) {
      const Discretization disc =
          discretize(g, std::vector<int>(g.n_edges(), n));
      disc.op.validate();
      CHECK(kernel_projector(disc.op).rank == metric_components(g).count);
    }
  }
}

TEST_CASE("interval spectrum converges with the mesh") {
  // Brace-init {200} would pick the h_target overload (int converts to double
  // before the vector's init-list constructor is considered), so spell it out.
  const Discretization disc = discretize(segment2(), std::vector<int>{200});
  const Eigen::VectorXd eigs = eigenvalues_only(disc.op);
  for (int k = 1; k <= 4; ++k) {
    const double exact = -k * k * pi * pi / 4.0;
    CHECK(std::abs(eigs(k) - exact) <= 1e-3 * std::abs(exact));
  }
}

TEST_CASE("mesh counts respect the target size") {
  CHECK(mesh_counts(segment2(), 0.5) == std::vector<int>{4});
  CHECK(mesh_counts(glued_path(), 0.3) == std::vector<int>{4, 4});
  CHECK(mesh_counts(segment2(), 10.0) == std::vector<int>{2});
  const Discretization disc = discretize(glued_path(), 0.25);
  CHECK(disc.h <= 0.25 + 1e-12);
}

TEST_CASE("elliptic coefficients must stay positive") {
  const auto flat = EllipticCoefficient::constant({4}, 2.0);
  CHECK(flat.floor() == 2.0);
  const Discretization disc = discretize(segment2(), flat, {4});
  disc.op.validate();
  CHECK(kernel_projector(disc.op).rank == 1);

  EllipticCoefficient bad = EllipticCoefficient::constant({4}, 1.0);
  bad.samples[0][2] = 0.0;
  CHECK_THROWS_AS(discretize(segment2(), bad, {4}), std::invalid_argument);
}

TEST_CASE("a stiffer coefficient speeds the flow up") {
  const auto slow = discretize(segment2(), EllipticCoefficient::constant({64}, 1.0), {64});
  const auto fast = discretize(segment2(), EllipticCoefficient::constant({64}, 4.0), {64});
  CHECK(spectral_gap(fast.op) == doctest::Approx(4.0 * spectral_gap(slow.op)));
}

TEST_CASE("shared-mesh families align mass and kernels across gluings") {
  const std::vector<MetricGraph> family{glued_path(), loose_pair()};
  const SharedMeshFamily shared = discretize_family(family, {12, 12});
  REQUIRE(shared.operators.size() == 2);
  for (const auto& op : shared.operators) {
    op.validate();
    CHECK((op.mass - shared.mass).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(kernel_projector(shared.operators[0]).rank == 1);
  CHECK(kernel_projector(shared.operators[1]).rank == 2);

  // The intersection across the family keeps only the global constants.
  CHECK(intersection_projector(shared.operators).rank == 1);
}

TEST_CASE("interval reference operators") {
  const OperatorModel neumann = interval_operator(IntervalKind::neumann, 64);
  neumann.validate();
  CHECK(kernel_projector(neumann).rank == 1);

  const OperatorModel krein =
      interval_operator(IntervalKind::krein_surrogate, 64);
  krein.validate();
  const Projector affine = kernel_projector(krein);
  CHECK(affine.rank == 2);
  // The affine kernel holds constants and the linear ramp.
  Eigen::VectorXd ramp(64);
  for (int i = 0; i < 64; ++i) ramp(i) = static_cast<double>(i);
  CHECK((affine.matrix * ramp - ramp).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((affine.matrix * Eigen::VectorXd::Ones(64) - Eigen::VectorXd::Ones(64))
            .cwiseAbs()
            .maxCoeff() <= 1e-8);

  CHECK(intersection_projector({neumann, krein}).rank == 1);

  const OperatorModel dirichlet =
      interval_operator(IntervalKind::dirichlet, 2000);
  CHECK(kernel_projector(dirichlet).rank == 0);
  const Eigen::VectorXd top = eigenvalues_only(dirichlet);
  CHECK(std::abs(top(0) + pi * pi) <= 1e-3 * pi * pi);

  const OperatorModel shifted =
      interval_operator(IntervalKind::dirichlet_shifted, 500);
  shifted.validate();
  CHECK(kernel_projector(shifted).rank == 1);

  std::vector<double> samples(32, 1.0);
  samples[10] = 3.0;
  const OperatorModel varp =
      interval_operator(IntervalKind::variable_p, 32, samples);
  varp.validate();
  CHECK(kernel_projector(varp).rank == 1);

  CHECK(interval_kind_from_name("neumann") == IntervalKind::neumann);
  CHECK_THROWS_AS(interval_kind_from_name("robin"), std::invalid_argument);
  CHECK(interval_kind_name(IntervalKind::krein_surrogate) == "krein_surrogate");
}

}  // TEST_SUITE
