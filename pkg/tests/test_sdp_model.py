import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ugx.errors import InputError
from ugx.instances import evaluate
from ugx.sdp_model import (
    SdpSolution,
    assignment_mixture,
    integral_solution,
    mix_solutions,
    planted_mixture,
    sdp_objective,
    solution_from_json,
    solution_to_json,
    verify_feasibility,
)

from conftest import planted


def test_integral_plant_has_zero_objective():
    inst, plant = planted(30, 4, 4, 0.0, 1)
    assert sdp_objective(inst, integral_solution(inst, plant)).epsilon == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_integral_objective_is_violation_fraction(seed):
    inst, _ = planted(24, 3, 4, 0.1, seed)
    a = np.random.default_rng(seed).integers(4, size=24)
    rep = sdp_objective(inst, integral_solution(inst, a))
    assert rep.epsilon == pytest.approx(1 - evaluate(inst, a), abs=1e-15)
    assert set(np.round(rep.edge_costs, 12)) <= {0.0, 1.0}


def test_integral_solution_is_exactly_feasible():
    inst, plant = planted(12, 3, 3, 0.2, 0)
    rep = verify_feasibility(integral_solution(inst, plant), tol=1e-12)
    assert rep.max_violation == 0.0 and rep.passed


def test_identity_mixture():
    inst, plant = planted(16, 3, 3, 0.0, 0)
    s = integral_solution(inst, plant)
    m = mix_solutions([(s, 1.0)])
    assert np.allclose(m.gram(), s.gram(), atol=0)
    assert sdp_objective(inst, m).epsilon == sdp_objective(inst, s).epsilon


def test_half_half_mixture_objective_is_average():
    inst, _ = planted(20, 4, 3, 0.1, 2)
    rng = np.random.default_rng(0)
    a, b = rng.integers(3, size=20), rng.integers(3, size=20)
    m = assignment_mixture(inst, [a, b], [0.5, 0.5])
    expected = 0.5 * (1 - evaluate(inst, a)) + 0.5 * (1 - evaluate(inst, b))
    assert sdp_objective(inst, m).epsilon == pytest.approx(expected, abs=1e-12)


def test_plant_random_mixture_objective_and_feasibility():
    inst, plant = planted(40, 4, 4, 0.0, 3)
    s, other = planted_mixture(inst, plant, 0.9, 7)
    assert sdp_objective(inst, s).epsilon == pytest.approx(0.1 * (1 - evaluate(inst, other)), abs=1e-12)
    rep = verify_feasibility(s, tol=1e-12, edges=inst.graph.edges)
    assert rep.passed


def test_mixture_weights_validated():
    inst, plant = planted(8, 3, 2, 0.0, 0)
    s = integral_solution(inst, plant)
    with pytest.raises(InputError):
        mix_solutions([(s, 0.5), (s, 0.4)])
    with pytest.raises(InputError):
        mix_solutions([(s, 1.2), (s, -0.2)])


def test_equal_vectors_at_one_vertex_flag_orthogonality():
    inst, plant = planted(8, 3, 3, 0.0, 0)
    vec = integral_solution(inst, plant).vectors.copy()
    x = np.array([0.6])
    vec[0, 0] = x
    vec[0, 1] = x
    vec[0, 2] = 0.0
    rep = verify_feasibility(SdpSolution(vec))
    assert rep.orthogonality == pytest.approx(float(x @ x))


def test_triangle_sampled_mode_above_threshold():
    inst, plant = planted(30, 4, 3, 0.0, 0)
    s, _ = planted_mixture(inst, plant, 0.8, 1)
    rep = verify_feasibility(s, triple_budget=5000, edges=inst.graph.edges)
    assert not rep.triangle_exhaustive
    assert rep.triples_checked == 5000 + inst.graph.m * 6**3


def test_triangle_violation_detected():
    # three collinear points 0, 1, 2 on a line: |0-2|^2 = 4 > 1 + 1
    vec = np.zeros((3, 1, 1))
    vec[:, 0, 0] = [0.0, 1.0, 2.0]
    rep = verify_feasibility(SdpSolution(vec))
    assert rep.triangle == pytest.approx(2.0)
    assert not rep.passed


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), parts=st.integers(1, 4), k=st.integers(2, 5))
def test_mixtures_feasible_and_linear(seed, parts, k):
    rng = np.random.default_rng(seed)
    inst, _ = planted(10, 3, k, 0.3, seed % 1000)
    assignments = [rng.integers(k, size=10) for _ in range(parts)]
    weights = rng.dirichlet(np.ones(parts))
    weights /= weights.sum()
    m = assignment_mixture(inst, assignments, weights)
    assert verify_feasibility(m, tol=1e-9).passed
    expected = sum(w * (1 - evaluate(inst, a)) for a, w in zip(assignments, weights))
    rep = sdp_objective(inst, m)
    assert rep.epsilon == pytest.approx(expected, abs=1e-12)
    assert rep.epsilon == pytest.approx(rep.edge_costs.mean(), abs=1e-15)
    assert (rep.edge_costs >= -1e-12).all() and (rep.edge_costs <= 1 + 1e-12).all()


def test_solution_json_round_trip():
    inst, plant = planted(10, 3, 3, 0.0, 0)
    s, _ = planted_mixture(inst, plant, 0.7, 1)
    text = solution_to_json(s)
    obj = json.loads(text)
    assert (obj["n"], obj["k"], obj["dim"]) == (10, 3, 2)
    assert np.array_equal(solution_from_json(text).vectors, s.vectors)
    assert "0.83666002653407556" in text  # sqrt(0.7) at 17 significant digits


def test_solution_json_shape_mismatch():
    with pytest.raises(InputError):
        solution_from_json('{"n": 1, "k": 2, "dim": 1, "vectors": [[[1.0]]]}')
