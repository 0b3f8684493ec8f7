"""Unique Games instances over regular graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InputError
from .graphs import Graph


@dataclass(frozen=True, eq=False)
class UGInstance:
    """Graph plus one permutation per stored edge.

    ``perms[e][i]`` is pi_uv(i) for ``graph.edges[e] == (u, v)``. The reverse
    direction uses the inverse permutation and is never stored.
    """

    graph: Graph
    k: int
    perms: np.ndarray

    def __post_init__(self):
        perms = np.asarray(self.perms, dtype=np.int64)
        if self.k < 1:
            raise InputError("alphabet size must be >= 1")
        if perms.shape != (self.graph.m, self.k):
            raise InputError(f"perms shape {perms.shape} != ({self.graph.m}, {self.k})")
        if perms.size and not (np.sort(perms, axis=1) == np.arange(self.k)).all():
            bad = int(np.flatnonzero((np.sort(perms, axis=1) != np.arange(self.k)).any(axis=1))[0])
            raise InputError(f"edge {self.graph.edges[bad]} carries a non-permutation {perms[bad].tolist()}")
        perms.setflags(write=False)
        object.__setattr__(self, "perms", perms)

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def inverse_perms(self) -> np.ndarray:
        inv = np.empty_like(self.perms)
        rows = np.arange(self.graph.m)[:, None]
        inv[rows, self.perms] = np.arange(self.k)
        return inv

    def __eq__(self, other):
        if not isinstance(other, UGInstance):
            return NotImplemented
        return self.graph == other.graph and self.k == other.k and np.array_equal(self.perms, other.perms)

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "d": self.graph.d,
            "k": self.k,
            "edges": [
                {"u": u, "v": v, "perm": p.tolist()} for (u, v), p in zip(self.graph.edges, self.perms)
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> UGInstance:
        try:
            n, d, k = int(obj["n"]), int(obj["d"]), int(obj["k"])
            rows = [(int(e["u"]), int(e["v"]), list(e["perm"])) for e in obj["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed instance: {exc}") from exc
        for u, v, _ in rows:
            if u >= v:
                raise InputError(f"edge ({u}, {v}) must have u < v")
        rows.sort(key=lambda r: (r[0], r[1]))
        g = Graph(n, d, tuple((u, v) for u, v, _ in rows))
        for u, v, p in rows:
            if len(p) != k:
                raise InputError(f"perm on ({u}, {v}) has length {len(p)}, expected {k}")
        perms = np.array([p for _, _, p in rows], dtype=np.int64).reshape(len(rows), k)
        return cls(g, k, perms)


def serialize_instance(inst: UGInstance) -> str:
    return json.dumps(inst.to_dict())


def parse_instance(text: str) -> UGInstance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed instance JSON: {exc}") from exc
    return UGInstance.from_dict(obj)


def assignment_to_json(labels) -> str:
    return json.dumps({"labels": [int(x) for x in labels]})


def assignment_from_json(text: str) -> np.ndarray:
    try:
        return np.array(json.loads(text)["labels"], dtype=np.int64)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed assignment JSON: {exc}") from exc


def check_assignment(inst: UGInstance, labels) -> np.ndarray:
    a = np.asarray(labels, dtype=np.int64)
    if a.shape != (inst.n,):
        raise InputError(f"assignment length {a.size} != n={inst.n}")
    if a.size and (a.min() < 0 or a.max() >= inst.k):
        raise InputError(f"label out of range [0, {inst.k})")
    return a


def satisfied_mask(inst: UGInstance, labels) -> np.ndarray:
    a = check_assignment(inst, labels)
    e = inst.graph.edge_array
    return inst.perms[np.arange(inst.graph.m), a[e[:, 0]]] == a[e[:, 1]]


def evaluate(inst: UGInstance, labels) -> float:
    """Fraction of edges (u, v) with pi_uv(a[u]) == a[v]."""
    if inst.graph.m == 0:
        return 1.0
    return float(satisfied_mask(inst, labels).mean())


def _perm_with(rng, k: int, src: int, dst: int) -> np.ndarray:
    """Uniform permutation of range(k) conditioned on p[src] == dst."""
    rest = [x for x in range(k) if x != dst]
    rest = [rest[j] for j in rng.permutation(k - 1)]
    rest.insert(src, dst)
    return np.array(rest, dtype=np.int64)


def gen_planted(g: Graph, k: int, noise: float, seed: int) -> tuple[UGInstance, np.ndarray]:
    """Planted instance whose plant violates exactly floor(noise*|E|) edges."""
    if not 0.0 <= noise <= 1.0:
        raise InputError(f"noise must be in [0, 1], got {noise}")
    if k < 1:
        raise InputError("alphabet size must be >= 1")
    n_bad = int(np.floor(noise * g.m + 1e-9))
    if noise > 0 and k < 2:
        raise InputError("cannot corrupt edges with k = 1: every permutation is the identity")
    rng = np.random.default_rng(seed)
    plant = rng.integers(k, size=g.n)
    perms = np.empty((g.m, k), dtype=np.int64)
    for e, (u, v) in enumerate(g.edges):
        perms[e] = _perm_with(rng, k, int(plant[u]), int(plant[v]))
    for e in rng.choice(g.m, size=n_bad, replace=False):
        u, v = g.edges[e]
        wrong = int(rng.integers(k - 1))
        if wrong >= plant[v]:
            wrong += 1
        perms[e] = _perm_with(rng, k, int(plant[u]), wrong)
    return UGInstance(g, k, perms), plant
