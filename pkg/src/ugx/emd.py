"""Earthmover distance between the label-vector sets of two vertices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InputError
from .sdp_model import SdpSolution

EXACT_MAX_N = 300


@dataclass(frozen=True)
class EmdReport:
    value: float
    matching: tuple[int, ...]


def pair_costs(s: SdpSolution, u: int, v: int) -> np.ndarray:
    """c[i][j] = ||u_i - v_j||^2."""
    a, b = s.vectors[u], s.vectors[v]
    return ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)


def emd_pair(s: SdpSolution, u: int, v: int) -> EmdReport:
    for x in (u, v):
        if not 0 <= x < s.n:
            raise InputError(f"vertex {x} out of range")
    cost = pair_costs(s, u, v)
    rows, cols = linear_sum_assignment(cost)
    return EmdReport(float(cost[rows, cols].sum()), tuple(int(c) for c in cols))


@dataclass(frozen=True)
class AvgEmd:
    mean: float
    stderr: float
    pairs: int
    exact: bool


def _all_costs(s: SdpSolution) -> np.ndarray:
    f = s.flat()
    sq = np.einsum("ij,ij->i", f, f)
    d = sq[:, None] + sq[None, :] - 2.0 * f @ f.T
    return np.maximum(d, 0.0).reshape(s.n, s.k, s.n, s.k)


def avg_emd(s: SdpSolution, mode: str = "exact", pair_budget: int = 10_000, seed: int = 0) -> AvgEmd:
    """Mean of Delta(u, v) over ordered pairs of uniform vertices (u == v allowed).

    ``exact`` averages all n^2 ordered pairs; ``sampled`` draws ``pair_budget``
    uniform pairs and reports the standard error of the mean.
    """
    n = s.n
    if mode == "exact":
        if n > EXACT_MAX_N:
            raise InputError(f"exact average limited to n <= {EXACT_MAX_N}; use sampled mode")
        costs = _all_costs(s)
        total = 0.0
        for u in range(n):
            for v in range(u + 1, n):
                c = costs[u, :, v, :]
                r, col = linear_sum_assignment(c)
                total += 2.0 * c[r, col].sum()
        return AvgEmd(total / (n * n), 0.0, n * n, True)
    if mode != "sampled":
        raise InputError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    us = rng.integers(n, size=pair_budget)
    vs = rng.integers(n, size=pair_budget)
    vals = np.array([emd_pair(s, int(u), int(v)).value for u, v in zip(us, vs)])
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return AvgEmd(float(vals.mean()), se, int(vals.size), False)


def emd_rows(s: SdpSolution, pairs) -> list[tuple[int, int, float]]:
    return [(u, v, emd_pair(s, u, v).value) for u, v in pairs]
