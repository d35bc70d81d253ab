"""End-to-end checks of the python bindings against known closed forms."""

import json
import math

import numpy as np
import pytest

import switchdiff as sd


def test_graph_spectrum_matches_hand_values():
    g = sd.build_graph(3, [(0, 1), (1, 2)])
    spectrum = sd.eigendecompose(sd.laplacian(g))
    assert np.allclose(spectrum.eigenvalues, [0.0, -1.0, -3.0], atol=1e-9)
    assert spectrum.eigenvalues[0] >= spectrum.eigenvalues[-1]


def test_union_and_kernel_structure():
    a = sd.build_graph(3, [(0, 1)])
    b = sd.build_graph(3, [(1, 2)])
    union = sd.union_graphs([a, b])
    assert sd.kernel_projector(sd.laplacian(union)).rank == 1
    assert len(sd.connected_components(a)) == 2

    both = sd.intersection_projector([sd.laplacian(a), sd.laplacian(b)])
    direct = sd.kernel_projector(sd.laplacian(union))
    assert both.rank == direct.rank == 1
    assert np.allclose(both.matrix, direct.matrix, atol=1e-8)


def test_switching_occupation_oracle():
    spec = sd.SemiMarkovSpec.from_json(json.dumps({
        "pi": [[0, 1], [1, 0]],
        "holding": [{"kind": "deterministic", "value": 1.0},
                    {"kind": "deterministic", "value": 3.0}],
        "initial": 0,
    }))
    assert np.allclose(sd.occupation_fractions(spec), [0.25, 0.75])

    one = sd.sample_trajectory(spec, 50.0, 7)
    two = sd.sample_trajectory(spec, 50.0, 7)
    assert one.states == two.states
    assert one.holdings == two.holdings


def test_propagator_converges_to_projector():
    graphs = [sd.build_graph(3, [(0, 1), (1, 2)]),
              sd.build_graph(3, [(0, 1), (1, 2), (0, 2)])]
    ens = sd.Ensemble([sd.laplacian(g) for g in graphs])
    spec = sd.SemiMarkovSpec.from_json(json.dumps({
        "pi": [[0, 1], [1, 0]],
        "holding": [{"kind": "exponential", "rate": 1.0},
                    {"kind": "exponential", "rate": 1.0}],
        "initial": 0,
    }))
    traj = sd.sample_trajectory(spec, 40.0, 11)
    assert np.allclose(sd.propagate(ens, traj, 0.0), np.eye(3))
    late = sd.propagate(ens, traj, 40.0)
    mass = ens.operators[0].mass
    assert sd.weighted_operator_norm(late - ens.p_k.matrix, mass) < 1e-6


def test_metric_graph_bounds():
    segment = sd.build_metric_graph([2.0])
    lo, hi = sd.lambda2_bounds(segment)
    assert lo == pytest.approx(-math.pi ** 2 / 4)
    assert hi == pytest.approx(-math.pi ** 2 / 4)

    op = sd.metric_laplacian(segment, 0.01)
    eigs = sd.eigenvalues_only(op)
    assert eigs[1] == pytest.approx(-math.pi ** 2 / 4, rel=1e-3)

    loose = sd.build_metric_graph([1.0, 1.0])
    assert sd.kernel_projector(sd.metric_laplacian(loose, 0.1)).rank == 2


def test_experiment_round_trip_and_config_errors():
    config = {
        "ensemble": {"kind": "combinatorial",
                     "graphs": [{"n": 3, "edges": [[0, 1], [1, 2]]}]},
        "switching": {"pi": [[1.0]],
                      "holding": [{"kind": "exponential", "rate": 1.0}],
                      "initial": 0},
        "horizon": 30.0,
        "times": {"kind": "linear", "count": 31},
        "master_seed": 3,
        "n_trajectories": 2,
        "rate_window": [2.0, 28.0],
    }
    summary = json.loads(sd.run_experiment_json(json.dumps(config)))
    assert summary["alpha_empirical_median"] == pytest.approx(1.0, rel=1e-6)
    assert summary["alpha_theoretical"]["conservative"] == pytest.approx(1.0)

    bad = dict(config)
    bad["horizon"] = -1.0
    with pytest.raises(sd.ConfigError):
        sd.run_experiment_json(json.dumps(bad))


def test_verify_suites_are_enumerable():
    assert set(sd.verify_suite_names()) == {
        "kernels", "contraction", "rates", "metric", "toy"}
