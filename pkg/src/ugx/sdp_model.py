"""Vector solutions of the Unique Games SDP relaxation.

A solution stores one vector per (vertex, label) as an ``(n, k, dim)`` array.
Feasible points come from integral embeddings of assignments and their
direct-sum mixtures; there is no general solver here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .instances import UGInstance, check_assignment

EXHAUSTIVE_TRIPLES_MAX = 60
DEFAULT_TRIPLE_BUDGET = 100_000


@dataclass(frozen=True, eq=False)
class SdpSolution:
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 3:
            raise InputError(f"vectors must be (n, k, dim), got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def k(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[2]

    def flat(self) -> np.ndarray:
        """Vectors as an ``(n*k, dim)`` matrix; row ``v*k + i`` is v_i."""
        return self.vectors.reshape(self.n * self.k, self.dim)

    def gram(self) -> np.ndarray:
        f = self.flat()
        return f @ f.T

    def sq_norms(self) -> np.ndarray:
        return np.einsum("vid,vid->vi", self.vectors, self.vectors)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "k": self.k, "n": self.n, "vectors": self.vectors.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> SdpSolution:
        try:
            n, k, dim = int(obj["n"]), int(obj["k"]), int(obj["dim"])
            vec = np.array(obj["vectors"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed SDP solution: {exc}") from exc
        if vec.shape != (n, k, dim):
            raise InputError(f"vectors shape {vec.shape} != ({n}, {k}, {dim})")
        return cls(vec)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def vectors_json(vectors: np.ndarray, header: dict) -> str:
    """JSON with 17-significant-digit floats for a ``(n, k, dim)`` array."""
    body = "[" + ",".join(
        "[" + ",".join("[" + ",".join(_fmt(x) for x in vec) + "]" for vec in row) + "]" for row in vectors
    ) + "]"
    head = json.dumps(header)[:-1]
    sep = ", " if header else ""
    return head + sep + '"vectors": ' + body + "}"


def solution_to_json(s: SdpSolution) -> str:
    return vectors_json(s.vectors, {"dim": s.dim, "k": s.k, "n": s.n})


def solution_from_json(text: str) -> SdpSolution:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed SDP JSON: {exc}") from exc
    return SdpSolution.from_dict(obj)


def integral_solution(inst: UGInstance, labels) -> SdpSolution:
    """Embed an assignment: v_i is a fixed unit vector when a[v] == i, else zero.

    All vertices share the same unit vector, so a satisfied edge costs 0 and a
    violated one costs 1.
    """
    a = check_assignment(inst, labels)
    vec = np.zeros((inst.n, inst.k, 1))
    vec[np.arange(inst.n), a, 0] = 1.0
    return SdpSolution(vec)


def mix_solutions(parts, tol: float = 1e-9) -> SdpSolution:
    """Direct sum of ``sqrt(w_j) * part_j`` over ``[(solution, weight), ...]``."""
    parts = list(parts)
    if not parts:
        raise InputError("empty mixture")
    weights = np.array([w for _, w in parts], dtype=float)
    if (weights <= 0).any():
        raise InputError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > tol:
        raise InputError(f"mixture weights sum to {weights.sum()}, not 1")
    shapes = {(s.n, s.k) for s, _ in parts}
    if len(shapes) != 1:
        raise InputError(f"parts disagree on (n, k): {sorted(shapes)}")
    return SdpSolution(np.concatenate([np.sqrt(w) * s.vectors for s, w in parts], axis=2))


def assignment_mixture(inst: UGInstance, assignments, weights) -> SdpSolution:
    return mix_solutions([(integral_solution(inst, a), w) for a, w in zip(assignments, weights)])


def planted_mixture(inst: UGInstance, plant, plant_weight: float, seed: int) -> tuple[SdpSolution, np.ndarray]:
    """Mix the plant's embedding with that of a uniformly random assignment."""
    rng = np.random.default_rng(seed)
    other = rng.integers(inst.k, size=inst.n)
    if plant_weight >= 1.0:
        return integral_solution(inst, plant), other
    return assignment_mixture(inst, [plant, other], [plant_weight, 1.0 - plant_weight]), other


def random_mixture(inst: UGInstance, parts: int, seed: int, plant=None) -> SdpSolution:
    """Dirichlet-weighted mixture of random assignments (plus ``plant`` if given)."""
    rng = np.random.default_rng(seed)
    assignments = [rng.integers(inst.k, size=inst.n) for _ in range(parts)]
    if plant is not None:
        assignments[0] = np.asarray(plant)
    weights = rng.dirichlet(np.ones(parts))
    weights /= weights.sum()
    return assignment_mixture(inst, assignments, weights)


def sq_dist_from_gram(gram: np.ndarray) -> np.ndarray:
    diag = np.diag(gram)
    return diag[:, None] + diag[None, :] - 2.0 * gram


def triangle_violation(dist: np.ndarray, groups, budget: int, seed: int = 0) -> tuple[float, int, bool]:
    """Max of dist[a,c] - dist[a,b] - dist[b,c] over checked triples.

    Exhaustive when ``len(dist) <= 60``; otherwise ``budget`` uniform triples
    plus every triple inside each index group in ``groups``.
    Returns ``(max_violation, triples_checked, exhaustive)``.
    """
    m = dist.shape[0]
    if m == 0:
        return 0.0, 0, True
    if m <= EXHAUSTIVE_TRIPLES_MAX:
        viol = dist[:, None, :] - dist[:, :, None] - dist[None, :, :]
        return max(0.0, float(viol.max())), m**3, True
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(m, size=(3, budget))
    worst = float((dist[a, c] - dist[a, b] - dist[b, c]).max()) if budget else 0.0
    count = budget
    for idx in groups:
        idx = np.asarray(idx)
        if idx.size == 0:
            continue
        sub = dist[np.ix_(idx, idx)]
        worst = max(worst, float((sub[:, None, :] - sub[:, :, None] - sub[None, :, :]).max()))
        count += idx.size**3
    return max(0.0, worst), count, False


def edge_groups(edges, k: int, keep=None):
    """Row indices of both endpoints' label vectors, one group per edge."""
    for u, v in edges:
        idx = np.r_[u * k : (u + 1) * k, v * k : (v + 1) * k]
        yield idx if keep is None else keep[idx][keep[idx] >= 0]


@dataclass
class FeasibilityReport:
    orthogonality: float
    unit_mass: float
    triangle: float
    triangle_zero: float
    triangle_norm: float
    triples_checked: int
    triangle_exhaustive: bool
    tol: float = field(default=1e-9)

    @property
    def max_violation(self) -> float:
        return max(self.orthogonality, self.unit_mass, self.triangle, self.triangle_zero, self.triangle_norm)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self) -> dict:
        return {
            "orthogonality": self.orthogonality,
            "unit_mass": self.unit_mass,
            "triangle": self.triangle,
            "triangle_zero": self.triangle_zero,
            "triangle_norm": self.triangle_norm,
            "triples_checked": self.triples_checked,
            "triangle_exhaustive": self.triangle_exhaustive,
            "max_violation": self.max_violation,
            "passed": self.passed,
        }


def verify_feasibility(
    s: SdpSolution, tol: float = 1e-9, triple_budget: int = DEFAULT_TRIPLE_BUDGET, edges=None, seed: int = 0
) -> FeasibilityReport:
    """Max violation of each SDP constraint family.

    ``triangle_zero`` is ||u_i - v_j||^2 <= ||u_i||^2 + ||v_j||^2 and
    ``triangle_norm`` is ||u_i||^2 <= ||u_i - v_j||^2 + ||v_j||^2, both over
    all ordered pairs.
    """
    n, k = s.n, s.k
    local = np.einsum("vid,vjd->vij", s.vectors, s.vectors)
    off = local.copy()
    off[:, np.arange(k), np.arange(k)] = 0.0
    ortho = float(np.abs(off).max()) if off.size else 0.0
    norms = np.diagonal(local, axis1=1, axis2=2)
    mass = float(np.abs(norms.sum(axis=1) - 1.0).max())

    gram = s.gram()
    sq = np.diag(gram)
    dist = sq_dist_from_gram(gram)
    t0 = float((dist - sq[:, None] - sq[None, :]).max())
    t1 = float((sq[:, None] - dist - sq[None, :]).max())
    groups = edge_groups(edges, k) if edges is not None else ()
    tri, count, exhaustive = triangle_violation(dist, groups, triple_budget, seed)
    return FeasibilityReport(ortho, mass, tri, max(0.0, t0), max(0.0, t1), count, exhaustive, tol)


@dataclass
class SdpObjectiveReport:
    epsilon: float
    edge_costs: np.ndarray


def sdp_objective(inst: UGInstance, s: SdpSolution) -> SdpObjectiveReport:
    """Per-edge cost 1/2 * sum_i ||v_i - w_{pi(i)}||^2 and their mean."""
    if (s.n, s.k) != (inst.n, inst.k):
        raise InputError(f"solution is ({s.n}, {s.k}), instance is ({inst.n}, {inst.k})")
    e = inst.graph.edge_array
    left = s.vectors[e[:, 0]]
    right = s.vectors[e[:, 1][:, None], inst.perms]
    costs = 0.5 * ((left - right) ** 2).sum(axis=(1, 2))
    eps = float(costs.mean()) if costs.size else 0.0
    return SdpObjectiveReport(eps, costs)
