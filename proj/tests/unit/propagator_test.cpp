#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "switchdiff/graph.hpp"
#include "switchdiff/propagator.hpp"
#include "switchdiff/rng.hpp"
#include "switchdiff/semi_markov.hpp"
#include "switchdiff/spectral.hpp"

using namespace switchdiff;

namespace {

WeightedGraph path3() { return build_graph(3, {{0, 1}, {1, 2}}); }
WeightedGraph triangle() { return build_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

SemiMarkovSpec single_state(HoldingDistribution law) {
  SemiMarkovSpec spec;
  spec.transition = Eigen::MatrixXd::Ones(1, 1);
  spec.holding = {law};
  return spec;
}

SemiMarkovSpec flip_spec(HoldingDistribution h0, HoldingDistribution h1) {
  SemiMarkovSpec spec;
  spec.transition.resize(2, 2);
  spec.transition << 0, 1, 1, 0;
  spec.holding = {h0, h1};
  return spec;
}

OperatorModel zero_op(int n) {
  OperatorModel op;
  op.matrix = Eigen::MatrixXd::Zero(n, n);
  op.mass = Eigen::VectorXd::Ones(n);
  return op;
}

double mnorm(const Eigen::MatrixXd& b, const Eigen::VectorXd& m) {
  return weighted_operator_norm(b, m);
}

}  // namespace

TEST_SUITE("propagator") {

TEST_CASE("ensembles validate dimension and mass agreement") {
  CHECK_THROWS_AS(Ensemble({}), std::invalid_argument);
  CHECK_THROWS_AS(
      Ensemble({laplacian(path3()), laplacian(build_graph(2, {{0, 1}}))}),
      std::invalid_argument);
  const auto weighted =
      build_graph(3, {{0, 1}, {1, 2}}, {2.0, 1.0, 1.0});
  CHECK_THROWS_AS(Ensemble({laplacian(path3()), laplacian(weighted)}),
                  std::invalid_argument);
}

TEST_CASE("propagator at time zero is the identity") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const Trajectory traj = sample_trajectory(
      flip_spec(HoldingDistribution::exponential(1.0),
                HoldingDistribution::exponential(1.0)),
      5.0, 3);
  CHECK(propagate(ens, traj, 0.0).isIdentity(0.0));
  CHECK_THROWS_AS(propagate(ens, traj, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(propagate(ens, traj, 1e9), std::invalid_argument);

  const Ensemble single(std::vector<OperatorModel>{laplacian(path3())});
  CHECK_THROWS_AS(propagate(single, traj, 1.0), std::invalid_argument);
}

TEST_CASE("single-state propagation is the semigroup") {
  const Ensemble ens(std::vector<OperatorModel>{laplacian(path3())});
  const Trajectory traj =
      sample_trajectory(single_state(HoldingDistribution::exponential(1.0)),
                        5.0, 17);
  const Eigen::MatrixXd direct = evolve(ens.operators[0], 2.5);
  CHECK(mnorm(propagate(ens, traj, 2.5) - direct, ens.mass()) <= 1e-12);
}

TEST_CASE("factors accumulate newest on the left") {
  const auto a = laplacian(build_graph(3, {{0, 1}}));
  const auto b = laplacian(build_graph(3, {{1, 2}}));
  REQUIRE_FALSE((a.matrix * b.matrix).isApprox(b.matrix * a.matrix));

  const Ensemble ens({a, b});
  const Trajectory traj =
      sample_trajectory(flip_spec(HoldingDistribution::deterministic(1.0),
                                  HoldingDistribution::deterministic(1.0)),
                        2.0, 5);
  const Eigen::MatrixXd expected =
      evolve(b, 1.0) * evolve(a, 1.0);  // state 0 first, then state 1
  const Eigen::MatrixXd wrong_order = evolve(a, 1.0) * evolve(b, 1.0);
  CHECK(mnorm(propagate(ens, traj, 2.0) - expected, ens.mass()) <= 1e-12);
  CHECK(mnorm(propagate(ens, traj, 2.0) - wrong_order, ens.mass()) > 1e-3);
}

TEST_CASE("propagator is a contraction satisfying the cocycle rule") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const auto spec = flip_spec(HoldingDistribution::exponential(1.0),
                              HoldingDistribution::gamma(2.0, 2.0));
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Trajectory traj = sample_trajectory(spec, 8.0, seed);
    const auto renewals = traj.renewal_times();
    for (std::size_t k = 1; k + 1 < renewals.size() && renewals[k] < 8.0; ++k) {
      const double tn = renewals[k];
      const double t = std::min(8.0, tn + 0.4 * traj.holdings[k]);
      const Eigen::MatrixXd full = propagate(ens, traj, t);
      const Eigen::MatrixXd stitched =
          evolve(ens.operators[traj.states[k]], t - tn) *
          propagate(ens, traj, tn);
      CHECK(mnorm(full - stitched, ens.mass()) <= 1e-9);
      CHECK(mnorm(full, ens.mass()) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("the limit projector absorbs the propagator") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const Trajectory traj = sample_trajectory(
      flip_spec(HoldingDistribution::exponential(1.0),
                HoldingDistribution::exponential(1.0)),
      6.0, 21);
  const Eigen::MatrixXd pk = ens.p_k.matrix;
  for (double t : {0.7, 2.0, 5.5}) {
    const Eigen::MatrixXd s = propagate(ens, traj, t);
    CHECK(mnorm(pk * s - pk, ens.mass()) <= 1e-9);
    CHECK(mnorm(s * pk - pk, ens.mass()) <= 1e-9);
  }
}

TEST_CASE("deviation series endpoints and monotonicity") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const Trajectory traj = sample_trajectory(
      flip_spec(HoldingDistribution::exponential(1.0),
                HoldingDistribution::exponential(1.0)),
      12.0, 33);
  std::vector<double> times;
  for (int i = 0; i <= 24; ++i) times.push_back(0.5 * i);
  const DeviationSeries series = deviation_series(ens, traj, times);

  CHECK(series.deviation.front() == doctest::Approx(1.0));  // K is proper
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(std::abs(series.deviation[i] - series.residual[i]) <= 1e-9);
  for (std::size_t i = 1; i < times.size(); ++i)
    CHECK(series.residual[i] <= series.residual[i - 1] + 1e-9);
  CHECK(series.deviation.back() < 1e-3);
}

TEST_CASE("deviation of a single connected generator tracks its gap") {
  const Ensemble ens(std::vector<OperatorModel>{laplacian(path3())});
  const Trajectory traj =
      sample_trajectory(single_state(HoldingDistribution::exponential(1.0)),
                        6.0, 5);
  const std::vector<double> times{0.0, 1.0, 2.0, 4.0};
  const DeviationSeries series = deviation_series(ens, traj, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(std::abs(series.deviation[i] - std::exp(-times[i])) <= 1e-9);
}

TEST_CASE("all-zero generators never deviate") {
  const Ensemble ens({zero_op(3), zero_op(3)});
  CHECK(ens.p_k.rank == 3);
  const Trajectory traj = sample_trajectory(
      flip_spec(HoldingDistribution::exponential(1.0),
                HoldingDistribution::exponential(1.0)),
      4.0, 9);
  const DeviationSeries series =
      deviation_series(ens, traj, {0.0, 1.0, 3.0});
  for (double d : series.deviation) CHECK(d <= 1e-12);
}

TEST_CASE("covering contraction certificates") {
  const Ensemble pair({laplacian(path3()), zero_op(3)});
  CHECK(covering_contraction_norm(pair, {0, 1}, {1.0, 1.0}) ==
        doctest::Approx(std::exp(-1.0)));

  const Ensemble single(std::vector<OperatorModel>{laplacian(triangle())});
  for (double delta : {0.1, 0.5, 2.0})
    CHECK(covering_contraction_norm(single, {0}, {delta}) ==
          doctest::Approx(std::exp(-3.0 * delta)));

  // The sequence must visit every state.
  CHECK_THROWS_AS(covering_contraction_norm(pair, {0, 0}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(covering_contraction_norm(pair, {0}, {1.0, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("theoretical rate for a single generator is its gap") {
  const Ensemble ens(std::vector<OperatorModel>{laplacian(path3())});
  const RateReport rate =
      theoretical_rate(ens, single_state(HoldingDistribution::exponential(1.0)));
  CHECK(rate.assumption_holds);
  CHECK(rate.alpha_conservative == doctest::Approx(1.0));
  CHECK(rate.alpha_averaged == doctest::Approx(1.0));
}

TEST_CASE("averaged rate weighs gaps by occupation") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const RateReport rate = theoretical_rate(
      ens, flip_spec(HoldingDistribution::exponential(1.0),
                     HoldingDistribution::exponential(1.0)));
  CHECK(rate.assumption_holds);
  // gaps -1 and -3 at occupation one half each
  CHECK(rate.alpha_averaged == doctest::Approx(2.0));
  CHECK(rate.alpha_conservative == doctest::Approx(1.5));
  CHECK(rate.conservative_state == 1);
}

TEST_CASE("only states whose kernel matches the intersection qualify") {
  // State 0: two loose edges, kernel rank two. State 1: complete graph on
  // four vertices, gap -4, kernel the constants (= the intersection).
  const auto split = build_graph(4, {{0, 1}, {2, 3}});
  const auto k4 = build_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const Ensemble ens({laplacian(split), laplacian(k4)});
  const RateReport rate = theoretical_rate(
      ens, flip_spec(HoldingDistribution::deterministic(3.0),
                     HoldingDistribution::deterministic(1.0)));
  CHECK(rate.assumption_holds);
  CHECK_FALSE(rate.states[0].kernel_matches);
  CHECK(rate.states[1].kernel_matches);
  CHECK(rate.states[1].theta == doctest::Approx(0.25));
  CHECK(rate.alpha_conservative == doctest::Approx(1.0));
  CHECK(rate.alpha_averaged == doctest::Approx(1.0));
}

TEST_CASE("rate estimation recovers exact slopes") {
  DeviationSeries series;
  for (int i = 0; i <= 40; ++i) {
    const double t = 0.25 * i;
    series.times.push_back(t);
    series.deviation.push_back(std::exp(-2.0 * t));
    series.residual.push_back(std::exp(-2.0 * t));
    series.clamped.push_back(false);
  }
  CHECK(std::abs(estimate_rate(series, 0.0, 10.0) - 2.0) <= 1e-9);

  DeviationSeries flat;
  for (int i = 0; i <= 10; ++i) {
    flat.times.push_back(static_cast<double>(i));
    flat.deviation.push_back(0.5);
    flat.residual.push_back(0.5);
    flat.clamped.push_back(false);
  }
  CHECK(std::abs(estimate_rate(flat, 0.0, 10.0)) <= 1e-12);

  DeviationSeries short_series;
  short_series.times = {0.0, 1.0};
  short_series.deviation = {1.0, 0.5};
  short_series.residual = {1.0, 0.5};
  short_series.clamped = {false, false};
  CHECK_THROWS_AS(estimate_rate(short_series, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("empirical rate of a single generator hits the gap") {
  const Ensemble ens(std::vector<OperatorModel>{laplacian(path3())});
  const Trajectory traj =
      sample_trajectory(single_state(HoldingDistribution::exponential(1.0)),
                        30.0, 8);
  std::vector<double> times;
  for (int i = 0; i <= 60; ++i) times.push_back(0.5 * i);
  const DeviationSeries series = deviation_series(ens, traj, times);
  CHECK(std::abs(estimate_rate(series, 1.0, 25.0) - 1.0) <= 1e-6);
}

TEST_CASE("pathwise decay bound") {
  const Ensemble ens({laplacian(path3()), laplacian(triangle())});
  const auto spec = flip_spec(HoldingDistribution::exponential(1.0),
                              HoldingDistribution::exponential(1.0));
  const Trajectory traj = sample_trajectory(spec, 10.0, 13);
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(0.5 * i);

  // Vectors already in the limit space never leave it.
  const GronwallReport trivial =
      gronwall_bound_check(ens, traj, Eigen::VectorXd::Ones(3), times);
  CHECK(trivial.holds);
  for (double lhs : trivial.lhs) CHECK(lhs <= 1e-18);

  // For a single generator and its gap eigenvector the bound is an identity.
  const Ensemble single(std::vector<OperatorModel>{laplacian(path3())});
  const Trajectory straj =
      sample_trajectory(single_state(HoldingDistribution::exponential(1.0)),
                        10.0, 2);
  Eigen::VectorXd x(3);
  x << 1, 0, -1;
  const GronwallReport tight = gronwall_bound_check(single, straj, x, times);
  CHECK(tight.holds);
  for (std::size_t i = 0; i < tight.lhs.size(); ++i)
    CHECK(std::abs(tight.lhs[i] - tight.rhs[i]) <= 1e-9);

  // Random starting vectors stay below the bound.
  SplitMix64 gen(99);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd f(3);
    for (int i = 0; i < 3; ++i) f(i) = 2.0 * gen.uniform01() - 1.0;
    const GronwallReport report = gronwall_bound_check(ens, traj, f, times);
    CHECK(report.min_margin >= -1e-9);
    CHECK(report.holds);
  }
}

TEST_CASE("unit-clock decay bound for a single generator is exact") {
  const Ensemble ens(std::vector<OperatorModel>{laplacian(path3())});
  const Trajectory traj =
      sample_trajectory(single_state(HoldingDistribution::deterministic(1.0)),
                        6.0, 1);
  const UnitClockReport report = unit_clock_decay_check(ens, traj);
  CHECK(report.delta == doctest::Approx(std::exp(-1.0)));
  CHECK(report.bounds[0] == doctest::Approx(1.0));
  CHECK(report.bounds[1] == doctest::Approx(1.0));
  for (std::size_t k = 0; k < report.norms.size(); ++k)
    CHECK(report.norms[k] ==
          doctest::Approx(std::exp(-static_cast<double>(k))));
  CHECK(report.holds);
}

}  // TEST_SUITE
