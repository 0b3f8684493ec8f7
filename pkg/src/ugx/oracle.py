"""Brute-force references used to check the fast paths."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeError
from .instances import UGInstance, evaluate
from .sdp_model import SdpSolution


@dataclass(frozen=True)
class OracleResult:
    best: np.ndarray
    value: float
    enumerated: int


def brute_force_opt(inst: UGInstance, budget: int = 10**7, chunk: int = 1 << 16) -> OracleResult:
    """Best assignment over all k^n, first in lexicographic order on ties."""
    n, k = inst.n, inst.k
    total = k**n
    if total > budget:
        raise SizeError(f"k^n = {total} exceeds budget {budget}")
    e = inst.graph.edge_array
    rows = np.arange(inst.graph.m)
    place = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_val, best_code = -1, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        labels = (codes[:, None] // place) % k
        sat = (inst.perms[rows, labels[:, e[:, 0]]] == labels[:, e[:, 1]]).sum(axis=1)
        j = int(np.argmax(sat))
        if sat[j] > best_val:
            best_val, best_code = int(sat[j]), int(codes[j])
    best = (best_code // place) % k
    return OracleResult(best, evaluate(inst, best), total)


def emd_brute(s: SdpSolution, u: int, v: int, k_max: int = 6) -> float:
    """Min over all k! label permutations of sum_i ||u_i - v_sigma(i)||^2."""
    if s.k > k_max:
        raise SizeError(f"k = {s.k} exceeds k_max = {k_max} ({math.factorial(s.k)} permutations)")
    a, b = s.vectors[u], s.vectors[v]
    best = math.inf
    for perm in itertools.permutations(range(s.k)):
        total = 0.0
        for i, j in enumerate(perm):
            diff = a[i] - b[j]
            total += float(diff @ diff)
        best = min(best, total)
    return best
