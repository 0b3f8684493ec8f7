import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ugx.errors import InputError, SizeError
from ugx.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    edge_expansion_exact,
    gen_random_regular,
    graph_from_json,
    graph_to_json,
    laplacian_dense,
    laplacian_lambda2,
    spectral_report,
)


def expansion_by_combinations(g):
    """Independent oracle: every proper subset via itertools."""
    best = math.inf
    for size in range(1, g.n):
        for xs in itertools.combinations(range(g.n), size):
            inside = set(xs)
            cut = sum((u in inside) != (v in inside) for u, v in g.edges)
            best = min(best, (cut / g.m) / (min(size, g.n - size) / g.n))
    return best


def test_k4_is_unique_cubic_graph_on_four_vertices():
    for seed in range(5):
        assert gen_random_regular(4, 3, seed) == complete_graph(4)


def test_parity_rejected():
    with pytest.raises(InputError):
        gen_random_regular(5, 3, 0)


def test_too_few_vertices_rejected():
    with pytest.raises(InputError):
        gen_random_regular(4, 4, 0)


def test_degree_audit_n100_d4():
    g = gen_random_regular(100, 4, 7)
    assert g.m == 200
    deg = np.bincount(g.edge_array.ravel(), minlength=100)
    assert (deg == 4).all()
    assert len(set(g.edges)) == 200
    assert all(u < v for u, v in g.edges)


def test_generation_is_deterministic():
    assert gen_random_regular(60, 6, 3) == gen_random_regular(60, 6, 3)
    assert gen_random_regular(60, 6, 3) != gen_random_regular(60, 6, 4)


@pytest.mark.parametrize("edges", [((0, 1), (0, 1)), ((0, 0),)])
def test_graph_rejects_bad_edges(edges):
    with pytest.raises(InputError):
        Graph(2, 1, edges)


def test_graph_rejects_irregular():
    with pytest.raises(InputError):
        Graph(4, 1, ((0, 1), (1, 2)))


def test_lambda2_k4_closed_form():
    # spectrum of I - A/(n-1) on K_n: 0 once, n/(n-1) with multiplicity n-1
    assert laplacian_lambda2(complete_graph(4)) == pytest.approx(4 / 3, abs=1e-12)


@pytest.mark.parametrize("n", [4, 5, 9, 16])
def test_lambda2_cycle_closed_form(n):
    expected = min(1 - math.cos(2 * math.pi * j / n) for j in range(1, n))
    assert laplacian_lambda2(cycle_graph(n)) == pytest.approx(expected, abs=1e-12)
    assert laplacian_lambda2(cycle_graph(n), method="lanczos") == pytest.approx(expected, abs=1e-10)


def test_lambda2_disconnected_is_zero():
    g = disjoint_union(complete_graph(3), complete_graph(3))
    assert abs(laplacian_lambda2(g)) < 1e-10
    assert abs(laplacian_lambda2(g, method="lanczos")) < 1e-10


def test_lambda2_connected_positive():
    assert laplacian_lambda2(gen_random_regular(30, 3, 1)) > 1e-6


def test_lanczos_path_used_above_512():
    g = gen_random_regular(600, 4, 2)
    lam = laplacian_lambda2(g)
    dense = np.linalg.eigvalsh(laplacian_dense(g))[1]
    assert lam == pytest.approx(dense, abs=1e-10)


def test_expansion_examples():
    assert edge_expansion_exact(cycle_graph(4)) == pytest.approx(1.0)
    assert edge_expansion_exact(complete_graph(4)) == pytest.approx(4 / 3)
    assert edge_expansion_exact(disjoint_union(cycle_graph(4), cycle_graph(4))) == 0.0


@pytest.mark.parametrize("n,d,seed", [(6, 3, 0), (8, 3, 1), (9, 4, 2), (10, 3, 3), (12, 4, 4)])
def test_expansion_matches_combination_oracle(n, d, seed):
    g = gen_random_regular(n, d, seed)
    assert edge_expansion_exact(g) == pytest.approx(expansion_by_combinations(g), abs=1e-12)


def test_expansion_size_error_reports_interval():
    with pytest.raises(SizeError, match="Cheeger"):
        edge_expansion_exact(gen_random_regular(30, 4, 0))


def test_spectral_report_examples():
    rep = spectral_report(complete_graph(4))
    assert rep.lambda2 == pytest.approx(4 / 3) and rep.h == pytest.approx(4 / 3)
    assert rep.cheeger_holds
    rep = spectral_report(cycle_graph(4))
    assert rep.lambda2 == pytest.approx(1.0) and rep.h == pytest.approx(1.0)


def test_spectral_report_large_graph_interval():
    rep = spectral_report(gen_random_regular(40, 4, 1))
    assert not rep.h_is_exact and rep.h is None
    assert rep.h_certified == rep.lambda2
    assert rep.h_upper == pytest.approx(math.sqrt(8 * rep.lambda2))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(4, 14), d=st.integers(2, 5), seed=st.integers(0, 2**32 - 1))
def test_cheeger_and_regularity(n, d, seed):
    if n * d % 2 or d >= n:
        return
    g = gen_random_regular(n, d, seed)
    assert (np.bincount(g.edge_array.ravel(), minlength=n) == d).all()
    rep = spectral_report(g)
    assert rep.h**2 / 8 - 1e-9 <= rep.lambda2 <= rep.h + 1e-9


def test_graph_json_round_trip():
    g = gen_random_regular(20, 3, 5)
    text = graph_to_json(g)
    assert graph_from_json(text) == g
    assert '"edges"' in text


def test_graph_json_malformed():
    with pytest.raises(InputError):
        graph_from_json("{not json")
    with pytest.raises(InputError):
        graph_from_json('{"n": 3}')
