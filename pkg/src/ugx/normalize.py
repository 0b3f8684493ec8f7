"""Normalization of SDP vectors to unit length.

The normalized vectors are built by factoring the matrix of inner products
<u_i, v_j> / max(|u_i|^2, |v_j|^2) over all labels with nonzero mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .sdp_model import (
    DEFAULT_TRIPLE_BUDGET,
    SdpSolution,
    edge_groups,
    sq_dist_from_gram,
    triangle_violation,
    vectors_json,
)


@dataclass(frozen=True, eq=False)
class NormalizedSolution:
    """Unit vectors for every (vertex, label) with nonzero mass.

    ``vectors[row]`` belongs to the flat label index ``labels[row]``
    (``v*k + i``). ``row_of[v*k + i]`` is that row, or -1 for a zero label.
    """

    n: int
    k: int
    vectors: np.ndarray
    labels: np.ndarray
    row_of: np.ndarray
    min_eigenvalue: float = 0.0

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def zero_labels(self) -> list[tuple[int, int]]:
        return [(int(f // self.k), int(f % self.k)) for f in np.flatnonzero(self.row_of < 0)]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T

    def sq_dists(self) -> np.ndarray:
        return sq_dist_from_gram(self.gram())

    def full_vectors(self) -> np.ndarray:
        """``(n, k, dim)`` array with zero rows at zero labels."""
        out = np.zeros((self.n * self.k, self.dim))
        out[self.labels] = self.vectors
        return out.reshape(self.n, self.k, self.dim)

    def to_json(self) -> str:
        header = {"dim": self.dim, "k": self.k, "n": self.n, "zero_labels": [list(z) for z in self.zero_labels]}
        return vectors_json(self.full_vectors(), header)


def normalized_target(s: SdpSolution, zero_tol: float = 1e-12):
    """The target Gram matrix over nonzero labels, plus the label index."""
    norms = s.sq_norms()
    nonzero = norms > zero_tol
    dead = np.flatnonzero(~nonzero.any(axis=1))
    if dead.size:
        raise InputError(f"vertex {int(dead[0])} has no label with nonzero mass")
    labels = np.flatnonzero(nonzero.reshape(-1))
    f = s.flat()[labels]
    sq = norms.reshape(-1)[labels]
    target = (f @ f.T) / np.maximum(sq[:, None], sq[None, :])
    return 0.5 * (target + target.T), labels


def normalize(s: SdpSolution, zero_tol: float = 1e-12, psd_tol: float = 1e-8) -> NormalizedSolution:
    target, labels = normalized_target(s, zero_tol)
    w, q = np.linalg.eigh(target)
    lo = float(w.min())
    if lo < -psd_tol:
        raise NumericalError(f"normalized Gram matrix is not PSD (min eigenvalue {lo:.3g})", estimate=lo)
    keep = w > 0
    vec = q[:, keep] * np.sqrt(w[keep])
    vec /= np.linalg.norm(vec, axis=1, keepdims=True)
    row_of = np.full(s.n * s.k, -1, dtype=np.int64)
    row_of[labels] = np.arange(labels.size)
    return NormalizedSolution(s.n, s.k, vec, labels, row_of, lo)


@dataclass
class NormalizationReport:
    triangle: float
    inner_product: float
    unit_norm: float
    orthogonality: float
    distance_bound: float
    triples_checked: int
    triangle_exhaustive: bool
    tol: float = 1e-8

    @property
    def max_violation(self) -> float:
        return max(self.triangle, self.inner_product, self.unit_norm, self.orthogonality, self.distance_bound)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "triangle": self.triangle,
            "inner_product": self.inner_product,
            "unit_norm": self.unit_norm,
            "orthogonality": self.orthogonality,
            "distance_bound": self.distance_bound,
            "triples_checked": self.triples_checked,
            "triangle_exhaustive": self.triangle_exhaustive,
            "max_violation": self.max_violation,
            "passed": self.passed,
        }


def verify_normalization(
    s: SdpSolution,
    ns: NormalizedSolution,
    tol: float = 1e-8,
    triple_budget: int = DEFAULT_TRIPLE_BUDGET,
    edges=None,
    seed: int = 0,
) -> NormalizationReport:
    """Check the five normalization properties and report max violations.

    ``distance_bound`` is the excess of ||u~ - v~||^2 over
    2 ||u - v||^2 / max(|u|^2, |v|^2).
    """
    labels = ns.labels
    f = s.flat()[labels]
    raw = f @ f.T
    sq = np.diag(raw)
    big = np.maximum(sq[:, None], sq[None, :])

    g = ns.gram()
    unit = float(np.abs(np.diag(g) - 1.0).max())
    inner = float(np.abs(g - raw / big).max())

    vert = labels // s.k
    same = (vert[:, None] == vert[None, :]) & ~np.eye(labels.size, dtype=bool)
    ortho = float(np.abs(g[same]).max()) if same.any() else 0.0

    dist = sq_dist_from_gram(g)
    raw_dist = sq_dist_from_gram(raw)
    bound = float((dist - 2.0 * raw_dist / big).max())

    groups = edge_groups(edges, s.k, ns.row_of) if edges is not None else ()
    tri, count, exhaustive = triangle_violation(dist, groups, triple_budget, seed)
    return NormalizationReport(tri, inner, unit, ortho, max(0.0, bound), count, exhaustive, tol)
