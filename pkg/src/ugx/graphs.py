"""Regular graphs: generation, Laplacian spectral gap, exact edge expansion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import GenerationError, InputError, NumericalError, SizeError

DENSE_MAX_N = 512
EXACT_H_MAX_N = 24


@dataclass(frozen=True)
class Graph:
    """Simple d-regular graph on vertices 0..n-1.

    ``edges`` holds unordered pairs ``(u, v)`` with ``u < v``, sorted.
    """

    n: int
    d: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted((int(min(e)), int(max(e))) for e in self.edges))
        object.__setattr__(self, "edges", edges)
        if self.n < 1 or self.d < 0:
            raise InputError(f"bad graph size n={self.n}, d={self.d}")
        if (self.n * self.d) % 2:
            raise InputError(f"n*d must be even (n={self.n}, d={self.d})")
        if len(set(edges)) != len(edges):
            raise InputError("duplicate edge")
        deg = [0] * self.n
        for u, v in edges:
            if u == v:
                raise InputError(f"self-loop at {u}")
            if not 0 <= u < self.n or not 0 <= v < self.n:
                raise InputError(f"edge ({u}, {v}) out of range")
            deg[u] += 1
            deg[v] += 1
        bad = [v for v in range(self.n) if deg[v] != self.d]
        if bad:
            raise InputError(f"vertex {bad[0]} has degree {deg[bad[0]]}, expected {self.d}")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        e = self.edge_array
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
        return a

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, obj: dict) -> Graph:
        try:
            return cls(int(obj["n"]), int(obj["d"]), tuple(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed graph: {exc}") from exc


def graph_to_json(g: Graph) -> str:
    return json.dumps(g.to_dict())


def graph_from_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed graph JSON: {exc}") from exc
    return Graph.from_dict(obj)


def complete_graph(n: int) -> Graph:
    return Graph(n, n - 1, tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, 2, tuple((i, (i + 1) % n) for i in range(n)))


def disjoint_union(*graphs: Graph) -> Graph:
    if len({g.d for g in graphs}) != 1:
        raise InputError("union of graphs with different degrees is not regular")
    edges, off = [], 0
    for g in graphs:
        edges.extend((u + off, v + off) for u, v in g.edges)
        off += g.n
    return Graph(off, graphs[0].d, tuple(edges))


def _has_free_pair(edges: set, stubs: list[int]) -> bool:
    nodes = sorted(set(stubs))
    for a in range(len(nodes)):
        for b in range(a + 1, len(nodes)):
            if (nodes[a], nodes[b]) not in edges:
                return True
    return False


def gen_random_regular(n: int, d: int, seed: int, max_restarts: int | None = None) -> Graph:
    """Sample a simple d-regular graph by stub pairing.

    Stubs that would form a loop or a repeated edge are re-shuffled and
    re-paired; the whole attempt restarts only when the leftover stubs
    cannot be completed. At most ``10*n*d`` restarts.
    """
    if (n * d) % 2:
        raise InputError(f"n*d must be even (n={n}, d={d})")
    if d < 0 or n < d + 1:
        raise InputError(f"need n >= d+1 (n={n}, d={d})")
    rng = np.random.default_rng(seed)
    if max_restarts is None:
        max_restarts = max(1, 10 * n * d)
    for _ in range(max_restarts):
        edges: set[tuple[int, int]] = set()
        stubs = [v for v in range(n) for _ in range(d)]
        while stubs:
            order = rng.permutation(len(stubs))
            shuffled = [stubs[j] for j in order]
            leftover = []
            for a, b in zip(shuffled[::2], shuffled[1::2]):
                a, b = min(a, b), max(a, b)
                if a != b and (a, b) not in edges:
                    edges.add((a, b))
                else:
                    leftover.extend((a, b))
            if leftover and not _has_free_pair(edges, leftover):
                break
            stubs = leftover
        else:
            return Graph(n, d, tuple(edges))
    raise GenerationError(f"no simple {d}-regular graph on {n} vertices after {max_restarts} restarts")


def laplacian_dense(g: Graph) -> np.ndarray:
    if g.d == 0:
        raise InputError("Laplacian undefined for d = 0")
    return np.eye(g.n) - g.adjacency() / g.d


def laplacian_sparse(g: Graph) -> sp.csr_matrix:
    if g.d == 0:
        raise InputError("Laplacian undefined for d = 0")
    e = g.edge_array
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    a = sp.csr_matrix((np.full(rows.size, 1.0 / g.d), (rows, cols)), shape=(g.n, g.n))
    return (sp.identity(g.n, format="csr") - a).tocsr()


def laplacian_lambda2(g: Graph, tol: float = 1e-10, method: str = "auto", maxiter: int | None = None) -> float:
    """Second-smallest eigenvalue of L_G = I - A/d.

    ``method`` is ``"dense"``, ``"lanczos"`` or ``"auto"`` (dense for n <= 512).
    The Lanczos path works on L + 2*11^T/n, which lifts the known zero
    eigenvalue above the rest of the spectrum (all eigenvalues of L are <= 2).
    """
    if g.n < 2:
        raise InputError("lambda2 needs at least two vertices")
    if method == "auto":
        method = "dense" if g.n <= DENSE_MAX_N else "lanczos"
    if method == "dense":
        return float(np.linalg.eigvalsh(laplacian_dense(g))[1])
    if method != "lanczos":
        raise InputError(f"unknown eigensolver method {method!r}")

    lap = laplacian_sparse(g)
    n = g.n

    def matvec(x):
        x = np.asarray(x).reshape(-1)
        return lap @ x + 2.0 * x.mean()

    op = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
    ncv = min(n, 64)
    if maxiter is None:
        maxiter = 100 * n
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        vals, vecs = spla.eigsh(op, k=1, which="SA", tol=tol * 1e-2, ncv=ncv, maxiter=maxiter, v0=v0)
    except spla.ArpackNoConvergence as exc:
        est = float(exc.eigenvalues[0]) if len(exc.eigenvalues) else None
        res = None
        if est is not None:
            x = exc.eigenvectors[:, 0]
            res = float(np.linalg.norm(matvec(x) - est * x))
        raise NumericalError("Lanczos did not converge", estimate=est, residual=res) from exc
    lam = float(vals[0])
    x = vecs[:, 0]
    res = float(np.linalg.norm(matvec(x) - lam * x))
    if res > math.sqrt(tol):
        raise NumericalError(f"Lanczos residual {res:.3g} too large", estimate=lam, residual=res)
    return lam


def _subset_cuts(g: Graph, masks: np.ndarray) -> np.ndarray:
    bits = ((masks[None, :] >> np.arange(g.n, dtype=np.uint32)[:, None]) & 1).astype(np.uint8)
    cut = np.zeros(masks.size, dtype=np.int32)
    for u, v in g.edges:
        cut += bits[u] ^ bits[v]
    return cut


def edge_expansion_exact(g: Graph, max_n: int = EXACT_H_MAX_N, chunk: int = 1 << 17) -> float:
    """Exact h_G by enumerating every vertex set that contains vertex 0.

    Complements give the same ratio, so fixing vertex 0 inside X loses nothing.
    """
    if g.n > max_n:
        lam = laplacian_lambda2(g)
        raise SizeError(
            f"exact expansion limited to n <= {max_n} (n={g.n}); "
            f"Cheeger only certifies h in [{lam:.6g}, {math.sqrt(8 * lam):.6g}]"
        )
    if g.n < 2:
        raise InputError("edge expansion needs at least two vertices")
    if g.m == 0:
        return 0.0
    n = g.n
    total = 1 << (n - 1)
    best = math.inf
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.uint32)
        masks = (idx << np.uint32(1)) | np.uint32(1)
        size = np.bitwise_count(masks).astype(np.int64)
        keep = size < n
        masks, size = masks[keep], size[keep]
        if masks.size == 0:
            continue
        cut = _subset_cuts(g, masks)
        smaller = np.minimum(size, n - size)
        ratio = (cut / g.m) / (smaller / n)
        best = min(best, float(ratio.min()))
    return best


@dataclass(frozen=True)
class SpectralReport:
    lambda2: float
    h: float | None
    h_is_exact: bool
    h_lower: float
    h_upper: float
    cheeger_lower: float | None
    cheeger_upper: float | None
    cheeger_holds: bool | None

    @property
    def h_certified(self) -> float:
        """Exact h when known, else the Cheeger lower bound lambda2 <= h."""
        return self.h if self.h_is_exact else self.h_lower

    def to_dict(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "h": self.h,
            "h_is_exact": self.h_is_exact,
            "h_interval": [self.h_lower, self.h_upper],
            "cheeger_lower": self.cheeger_lower,
            "cheeger_upper": self.cheeger_upper,
            "cheeger_holds": self.cheeger_holds,
        }


def spectral_report(g: Graph, tol: float = 1e-9, max_n: int = EXACT_H_MAX_N) -> SpectralReport:
    lam = laplacian_lambda2(g)
    if g.n <= max_n:
        h = edge_expansion_exact(g, max_n=max_n)
        lo, hi = h * h / 8.0, h
        holds = lo - tol <= lam <= hi + tol
        return SpectralReport(lam, h, True, h, h, lo, hi, holds)
    lam_c = max(lam, 0.0)
    return SpectralReport(lam, None, False, lam_c, math.sqrt(8.0 * lam_c), None, None, None)
