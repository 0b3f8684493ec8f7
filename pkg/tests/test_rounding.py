import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ugx.errors import InputError, InvariantError, SizeError
from ugx.experiment import theorem_bound
from ugx.instances import evaluate
from ugx.normalize import NormalizedSolution, normalize
from ugx.rounding import (
    Rounder,
    RoundingParams,
    lemma_monitors,
    round_best_of,
    round_derandomized,
    round_once,
    sigma,
    trial_seed,
)
from ugx.sdp_model import SdpSolution, integral_solution, planted_mixture, random_mixture

from conftest import mixture_input, planted


@pytest.fixture(scope="module")
def clean():
    inst, plant = planted(40, 4, 4, 0.0, 11)
    s = integral_solution(inst, plant)
    return inst, plant, s, normalize(s)


def test_params_validate_R():
    with pytest.raises(InputError):
        RoundingParams(R=0.3)
    with pytest.raises(InputError):
        RoundingParams(R=0.0)
    with pytest.raises(InputError):
        RoundingParams(trials=0)


def test_sigma_integral_satisfied_edge(clean):
    inst, plant, s, ns = clean
    u, v = inst.graph.edges[0]
    m = sigma(ns, u, v, 0.2)
    assert m == {int(plant[u]): int(plant[v])}


def test_sigma_orthogonal_embeddings_empty():
    vec = np.zeros((2, 2, 2))
    vec[0, 0, 0] = 1.0
    vec[1, 1, 1] = 1.0
    assert sigma(normalize(SdpSolution(vec)), 0, 1, 0.2) == {}


def test_sigma_mixture_keeps_plant_on_satisfied_edge():
    inst, plant, s = mixture_input(30, 4, 4, 0.0, 0.9, seed=2)
    ns = normalize(s)
    for u, v in inst.graph.edges[:10]:
        pu, pv = int(plant[u]), int(plant[v])
        a, b = s.vectors[u, pu], s.vectors[v, pv]
        # distance law: 2 - 2 <a, b> / max(|a|^2, |b|^2)
        d = 2 - 2 * (a @ b) / max(a @ a, b @ b)
        assert d <= 4 * 0.2
        assert sigma(ns, u, v, 0.2)[pu] == pv


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), R=st.floats(0.01, 0.249))
def test_sigma_is_symmetric_partial_matching(seed, R):
    inst, plant = planted(10, 3, 4, 0.2, seed)
    ns = normalize(random_mixture(inst, 3, seed, plant))
    for v, w in inst.graph.edges:
        fwd, back = sigma(ns, v, w, R), sigma(ns, w, v, R)
        assert len(set(fwd.values())) == len(fwd)
        assert {q: p for p, q in fwd.items()} == back


def test_round_once_recovers_plant(clean):
    inst, plant, s, ns = clean
    for seed in range(5):
        out = round_once(inst, s, ns, RoundingParams(), trial_seed(seed, 0))
        assert (out.s_sizes == 1).all()
        assert (out.assignment == plant).all()
        assert out.satisfied == 1.0 and out.cut_edges == 0 and out.x_size == 40
        assert not out.failed


def test_k1_everything_decided():
    inst, plant = planted(12, 3, 1, 0.0, 0)
    s = integral_solution(inst, plant)
    out = round_once(inst, s, normalize(s), RoundingParams(), [1, 2])
    assert (out.s_sizes == 1).all() and out.satisfied == 1.0


def test_best_of_one_trial_equals_round_once():
    inst, plant, s = mixture_input(30, 4, 3, 0.05, 0.9, seed=3)
    ns = normalize(s)
    p = RoundingParams(seed=17, trials=1)
    a = round_best_of(inst, s, ns, p)
    b = round_once(inst, s, ns, p, trial_seed(17, 0))
    assert (a.assignment == b.assignment).all()
    assert (a.initial_vertex, a.initial_state, a.t, a.r) == (b.initial_vertex, b.initial_state, b.t, b.r)


def test_determinism():
    inst, plant, s = mixture_input(30, 4, 3, 0.05, 0.8, seed=4)
    ns = normalize(s)
    p = RoundingParams(seed=5, trials=8)
    a, b = round_best_of(inst, s, ns, p), round_best_of(inst, s, ns, p)
    assert np.array_equal(a.assignment, b.assignment) and a.satisfied == b.satisfied


def test_derandomized_noise_zero_and_k1(clean):
    inst, plant, s, ns = clean
    assert round_derandomized(inst, s, ns, RoundingParams()).satisfied == 1.0
    inst1, plant1 = planted(10, 3, 1, 0.0, 0)
    s1 = integral_solution(inst1, plant1)
    assert round_derandomized(inst1, s1, normalize(s1), RoundingParams()).satisfied == 1.0


def test_derandomized_budget():
    inst, plant = planted(300, 4, 7, 0.0, 0)
    s = integral_solution(inst, plant)
    with pytest.raises(SizeError):
        round_derandomized(inst, s, normalize(s), RoundingParams())


def test_derandomized_dominates_fixed_fallback_trials():
    inst, plant, s = mixture_input(16, 3, 3, 0.2, 0.6, seed=6)
    ns = normalize(s)
    rd = Rounder(inst, s, ns)
    p = RoundingParams(seed=1, fallback="fixed")
    best = rd.derandomized(p).satisfied
    for j in range(300):
        assert rd.round_once(p, trial_seed(1, j)).satisfied <= best


def test_fail_gate():
    inst, plant, s = mixture_input(12, 3, 3, 0.0, 0.9, seed=7)
    rd = Rounder(inst, s, normalize(s))
    R = 0.2
    gate = (1 - 100 * rd.eps / (rd.h * R)) * inst.n
    assert rd.gate(R) == pytest.approx(gate)
    out = rd.round_once(RoundingParams(R=R), [0, 0])
    assert out.failed == (out.x_size < gate)


def test_small_eps_bound_is_informative_and_met():
    # tiny weight on a random assignment keeps eps far below h R / 1000
    inst, plant, s = mixture_input(200, 8, 5, 0.0, 0.9995, seed=8)
    rd = Rounder(inst, s, normalize(s))
    bound = theorem_bound(rd.eps, rd.h, 0.2)
    assert 0 < bound < 1
    out = rd.best_of(RoundingParams(R=0.2, seed=3, trials=16))
    assert out.satisfied >= bound
    assert not out.failed


def test_broken_normalization_trips_invariant(clean):
    inst, plant, s, ns = clean
    mix, _ = planted_mixture(inst, plant, 0.7, 1)
    good = normalize(mix)
    vec = good.vectors.copy()
    # make every label of vertex 0 coincide with its plant label's vector
    rows = good.row_of[0:4]
    rows = rows[rows >= 0]
    vec[rows] = vec[good.row_of[int(plant[0])]]
    bad = NormalizedSolution(good.n, good.k, vec, good.labels, good.row_of)
    rd = Rounder(inst, mix, bad)
    with pytest.raises(InvariantError):
        for j in range(200):
            rd.round_once(RoundingParams(), [0, j])


def test_degenerate_initial_vertex():
    inst, plant = planted(6, 3, 2, 0.0, 0)
    vec = integral_solution(inst, plant).vectors.copy()
    vec[:, :, :] *= np.sqrt(0.5)
    s = SdpSolution(vec)
    with pytest.raises(InputError):
        Rounder(inst, s, normalize(s)).round_once(RoundingParams(), [0, 0])


def test_monitors_noise_zero(clean):
    inst, plant, s, ns = clean
    rep = lemma_monitors(inst, s, ns, RoundingParams(seed=2), trials=200)
    assert rep.passed
    assert rep.row("quart_expected_x").estimate == 1.0
    assert rep.row("expcut_cut_fraction").estimate == 0.0
    assert np.array_equal(rep.membership_fixed, np.ones_like(rep.mass))


def test_outcome_json_fields(clean):
    inst, plant, s, ns = clean
    d = round_once(inst, s, ns, RoundingParams(), [0, 0]).to_dict()
    assert set(d) == {"assignment", "satisfied", "x_size", "cut_edges", "failed", "sampled"}
    assert set(d["sampled"]) == {"u", "i", "t", "r"}
    assert evaluate(inst, d["assignment"]) == d["satisfied"]
