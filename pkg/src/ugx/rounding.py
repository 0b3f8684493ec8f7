"""Propagation rounding of normalized SDP vectors.

One trial picks an initial vertex u, a state i with probability |u_i|^2, a
threshold t in [0, |u_i|^2] and a radius r in [R, 2R]. Every vertex v then
collects S_v = {p : |v_p|^2 >= t and |v~_p - u~_i|^2 <= r}; a singleton
decides v, anything else falls back to an arbitrary label.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvariantError, SizeError
from .graphs import spectral_report
from .instances import UGInstance, satisfied_mask
from .normalize import NormalizedSolution
from .sdp_model import SdpSolution, sdp_objective

# slack on the 4R comparisons; distances come from a floating-point factorization
DIST_SLACK = 1e-9
DERAND_MAX_NK = 2000


@dataclass(frozen=True)
class RoundingParams:
    R: float = 0.2
    seed: int = 0
    trials: int = 64
    fallback: str = "random"

    def __post_init__(self):
        if not 0.0 < self.R < 0.25:
            raise InputError(f"R must lie in (0, 1/4), got {self.R}")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.fallback not in ("random", "fixed"):
            raise InputError(f"fallback must be 'random' or 'fixed', got {self.fallback!r}")


@dataclass
class RoundingOutcome:
    initial_vertex: int
    initial_state: int
    t: float
    r: float
    s_sizes: np.ndarray
    in_x: np.ndarray
    assignment: np.ndarray
    satisfied: float
    cut_edges: int
    failed: bool
    trial: int = 0

    @property
    def x_size(self) -> int:
        return int(self.in_x.sum())

    def to_dict(self) -> dict:
        return {
            "assignment": self.assignment.tolist(),
            "satisfied": self.satisfied,
            "x_size": self.x_size,
            "cut_edges": self.cut_edges,
            "failed": self.failed,
            "sampled": {"u": self.initial_vertex, "i": self.initial_state, "t": self.t, "r": self.r},
        }


def sigma(ns: NormalizedSolution, v: int, w: int, R: float) -> dict[int, int]:
    """Partial matching p -> q of labels with |v~_p - w~_q|^2 <= 4R."""
    if not 0.0 < R < 0.25:
        raise InputError(f"R must lie in (0, 1/4), got {R}")
    k = ns.k
    rv, rw = ns.row_of[v * k : (v + 1) * k], ns.row_of[w * k : (w + 1) * k]
    pv, qw = np.flatnonzero(rv >= 0), np.flatnonzero(rw >= 0)
    a, b = ns.vectors[rv[pv]], ns.vectors[rw[qw]]
    dist = 2.0 - 2.0 * (a @ b.T)
    close = dist <= 4.0 * R + DIST_SLACK
    if (close.sum(axis=1) > 1).any() or (close.sum(axis=0) > 1).any():
        raise InvariantError(f"sigma between {v} and {w} is not a partial matching")
    return {int(pv[x]): int(qw[y]) for x, y in zip(*np.nonzero(close))}


def trial_seed(seed: int, trial: int) -> list[int]:
    return [int(seed), int(trial)]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("UGX_THREADS", "1")))
    except ValueError:
        return 1


class Rounder:
    """Shared precomputation for repeated rounding trials on one input.

    ``h`` defaults to the exact edge expansion for n <= 24 and to the certified
    lower bound lambda_G otherwise, which keeps the failure gate conservative.
    """

    def __init__(
        self,
        inst: UGInstance,
        s: SdpSolution,
        ns: NormalizedSolution,
        h: float | None = None,
        mass_tol: float = 1e-9,
        check: bool = True,
    ):
        if (s.n, s.k) != (inst.n, inst.k) or (ns.n, ns.k) != (inst.n, inst.k):
            raise InputError("instance, SDP solution and normalized solution disagree on (n, k)")
        self.inst, self.s, self.ns = inst, s, ns
        self.n, self.k = inst.n, inst.k
        self.norms = s.sq_norms()
        self.row_norm = self.norms.reshape(-1)[ns.labels]
        self.row_vertex = ns.labels // self.k
        self.row_label = ns.labels % self.k
        self.dist = ns.sq_dists()
        obj = sdp_objective(inst, s)
        self.eps, self.edge_costs = obj.epsilon, obj.edge_costs
        self.h = spectral_report(inst.graph).h_certified if h is None else float(h)
        self.mass_tol = mass_tol
        self.check = check
        self.edges = inst.graph.edge_array
        self.invariant_checks = 0

    def gate(self, R: float) -> float:
        """Minimum |X| for a non-failed outcome."""
        if self.eps == 0.0:
            return float(self.n)
        if self.h <= 0.0:
            return math.inf
        return (1.0 - 100.0 * self.eps / (self.h * R)) * self.n

    def select(self, u: int, i: int, t: float, r: float) -> np.ndarray:
        """Rows (v, p) of the normalized solution that land in S_v."""
        row = self.ns.row_of[u * self.k + i]
        if row < 0:
            return np.zeros(0, dtype=np.int64)
        return np.flatnonzero((self.row_norm >= t) & (self.dist[row] <= r))

    def _check(self, sel: np.ndarray, sizes: np.ndarray, R: float):
        self.invariant_checks += 1
        if sizes.size and sizes.max() > 1:
            v = int(np.argmax(sizes))
            raise InvariantError(f"|S_v| = {int(sizes[v])} > 1 at vertex {v}")
        if self.check and sel.size > 1:
            sub = self.dist[np.ix_(sel, sel)]
            if (sub > 4.0 * R + DIST_SLACK).any():
                a, b = np.argwhere(sub > 4.0 * R + DIST_SLACK)[0]
                raise InvariantError(
                    f"labels {self.row_label[sel[a]]} at {self.row_vertex[sel[a]]} and "
                    f"{self.row_label[sel[b]]} at {self.row_vertex[sel[b]]} selected together but not sigma-matched"
                )

    def outcome(self, u: int, i: int, t: float, r: float, fallback: np.ndarray, R: float, trial: int = 0):
        sel = self.select(u, i, t, r)
        sizes = np.bincount(self.row_vertex[sel], minlength=self.n)
        self._check(sel, sizes, R)
        labels = np.array(fallback, dtype=np.int64)
        labels[self.row_vertex[sel]] = self.row_label[sel]
        in_x = sizes == 1
        sat = satisfied_mask(self.inst, labels)
        cut = int((in_x[self.edges[:, 0]] != in_x[self.edges[:, 1]]).sum())
        satisfied = float(sat.mean()) if sat.size else 1.0
        failed = bool(in_x.sum() < self.gate(R) - 1e-9)
        return RoundingOutcome(u, i, float(t), float(r), sizes, in_x, labels, satisfied, cut, failed, trial), sel, sat

    def sample(self, rng: np.random.Generator, R: float, initial_vertex: int | None = None):
        u = int(rng.integers(self.n)) if initial_vertex is None else int(initial_vertex)
        mass = np.where(self.ns.row_of[u * self.k : (u + 1) * self.k] >= 0, self.norms[u], 0.0)
        total = mass.sum()
        if total <= self.mass_tol or abs(self.norms[u].sum() - 1.0) > max(self.mass_tol, 1e-6):
            raise InputError(f"initial vertex {u} has label mass {self.norms[u].sum()}, expected 1")
        i = int(rng.choice(self.k, p=mass / total))
        t = float(rng.uniform(0.0, self.norms[u, i]))
        r = float(rng.uniform(R, 2.0 * R))
        return u, i, t, r

    def once(self, p: RoundingParams, seed, initial_vertex: int | None = None, trial: int = 0):
        rng = np.random.default_rng(seed)
        u, i, t, r = self.sample(rng, p.R, initial_vertex)
        if p.fallback == "random":
            fb = rng.integers(self.k, size=self.n)
        else:
            fb = np.zeros(self.n, dtype=np.int64)
        return self.outcome(u, i, t, r, fb, p.R, trial)

    def round_once(self, p: RoundingParams, seed) -> RoundingOutcome:
        return self.once(p, seed)[0]

    def _trials(self, p: RoundingParams, trials: int, initial_vertex=None, salt: int = 0):
        seeds = [trial_seed(p.seed, j) if salt == 0 else [int(p.seed), salt, j] for j in range(trials)]

        def run(j):
            return self.once(p, seeds[j], initial_vertex, j)

        workers = _threads()
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                yield from pool.map(run, range(trials))
        else:
            for j in range(trials):
                yield run(j)

    def best_of(self, p: RoundingParams) -> RoundingOutcome:
        """Best non-failed outcome over ``p.trials``; best overall if all fail."""
        best = None
        for out, _, _ in self._trials(p, p.trials):
            key = (not out.failed, out.satisfied)
            if best is None or key > (not best.failed, best.satisfied):
                best = out
        return best

    def derandomized(self, p: RoundingParams) -> RoundingOutcome:
        """Exhaustive search over every outcome-distinct (u, i, t, r).

        Membership is piecewise constant in t and r, changing only where t
        crosses some |v_p|^2 or r crosses some |v~_p - u~_i|^2, so evaluating
        at those values (plus R and 2R) visits every distinct outcome.
        """
        if self.n * self.k > DERAND_MAX_NK:
            raise SizeError(f"n*k = {self.n * self.k} exceeds {DERAND_MAX_NK}; use round_best_of")
        R = p.R
        fb = np.zeros(self.n, dtype=np.int64)
        best = None
        trial = 0
        for row in range(self.ns.labels.size):
            u, i = int(self.row_vertex[row]), int(self.row_label[row])
            top = self.norms[u, i]
            ts = np.unique(np.r_[0.0, self.row_norm[self.row_norm <= top]])
            d = self.dist[row]
            rs = np.unique(np.r_[R, 2.0 * R, d[(d >= R) & (d <= 2.0 * R)]])
            for t in ts:
                for r in rs:
                    out = self.outcome(u, i, t, r, fb, R, trial)[0]
                    trial += 1
                    if best is None or out.satisfied > best.satisfied:
                        best = out
        return best

    def monitors(self, p: RoundingParams, trials: int, initial_vertex: int = 0) -> MonitorReport:
        return lemma_monitors_for(self, p, trials, initial_vertex)


@dataclass
class MonitorRow:
    name: str
    estimate: float
    stderr: float
    bound: float
    passed: bool
    kind: str = "upper"

    def to_row(self) -> list:
        return [self.name, self.estimate, self.stderr, self.bound, self.passed]


@dataclass
class MonitorReport:
    rows: list[MonitorRow]
    trials: int
    epsilon: float
    h: float
    R: float
    membership_fixed: np.ndarray = field(repr=False)
    membership_avg: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    edge_bad_freq: np.ndarray = field(repr=False)
    edge_costs: np.ndarray = field(repr=False)
    x_sizes: np.ndarray = field(repr=False)
    cut_fracs: np.ndarray = field(repr=False)
    invariant_checks: int = 0

    def row(self, name: str) -> MonitorRow:
        return next(r for r in self.rows if r.name == name)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _bern_se(freq, trials):
    return np.sqrt(np.clip(freq * (1.0 - freq), 0.0, None) / trials)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _worst_upper(name, freq, bound, trials) -> MonitorRow:
    se = _bern_se(freq, trials)
    slack = freq - bound - 3.0 * se
    j = int(np.argmax(slack))
    return MonitorRow(name, float(freq[j]), float(se[j]), float(bound[j]), bool((slack <= 1e-12).all()))


def lemma_monitors_for(rd: Rounder, p: RoundingParams, trials: int, initial_vertex: int = 0) -> MonitorReport:
    n, m, R = rd.n, rd.inst.graph.m, p.R
    rows_total = rd.ns.labels.size

    fixed = np.zeros(rows_total)
    for _, sel, _ in rd._trials(p, trials, initial_vertex=initial_vertex, salt=1):
        fixed[sel] += 1

    avg = np.zeros(rows_total)
    bad = np.zeros(m)
    x_sizes = np.zeros(trials)
    cuts = np.zeros(trials)
    inner_bad = np.zeros(trials)
    ok = np.zeros(trials, dtype=bool)
    for out, sel, sat in rd._trials(p, trials, salt=2):
        j = out.trial
        avg[sel] += 1
        both = out.in_x[rd.edges[:, 0]] & out.in_x[rd.edges[:, 1]]
        viol = both & ~sat
        bad += viol
        x_sizes[j] = out.x_size
        cuts[j] = out.cut_edges / m if m else 0.0
        inner_bad[j] = viol.sum() / m if m else 0.0
        ok[j] = not out.failed

    fixed /= trials
    avg /= trials
    bad /= trials
    mass = rd.row_norm
    rows = [
        _worst_upper("probui_fixed_u", fixed, mass, trials),
        _worst_upper("probui_avg_u", avg, mass, trials),
    ]
    ex, ex_se = _mean_se(x_sizes / n)
    rows.append(MonitorRow("quart_expected_x", ex, ex_se, 0.25, ex >= 0.25 - 3 * ex_se, "lower"))
    big = x_sizes > n / 8.0
    pb = float(big.mean())
    pb_se = float(_bern_se(pb, trials))
    rows.append(MonitorRow("quart_prob_x_gt_n8", pb, pb_se, 1 / 8, pb > 1 / 8 - 3 * pb_se, "lower"))
    cf, cf_se = _mean_se(cuts)
    cut_bound = 6.0 * rd.eps / R
    rows.append(MonitorRow("expcut_cut_fraction", cf, cf_se, cut_bound, cf <= cut_bound + 3 * cf_se))
    gate = rd.gate(R)
    large = x_sizes >= gate - 1e-9
    pl = float(large.mean())
    pl_se = float(_bern_se(pl, trials))
    rows.append(MonitorRow("largex_prob", pl, pl_se, 1 / 16, pl >= 1 / 16 - 3 * pl_se, "lower"))
    rows.append(_worst_upper("epsuv_edge", bad, 4.0 * rd.edge_costs, trials))
    ib, ib_se = _mean_se(inner_bad)
    rows.append(MonitorRow("theorem_inner_violations", ib, ib_se, 4.0 * rd.eps, ib <= 4.0 * rd.eps + 3 * ib_se))
    if ok.any():
        cb, cb_se = _mean_se(inner_bad[ok])
        rows.append(MonitorRow("theorem_inner_violations_given_success", cb, cb_se, 64.0 * rd.eps,
                               cb <= 64.0 * rd.eps + 3 * cb_se))
    return MonitorReport(rows, trials, rd.eps, rd.h, R, fixed, avg, mass, bad, rd.edge_costs,
                         x_sizes, cuts, rd.invariant_checks)


def round_once(inst, s, ns, p: RoundingParams, trial_seed, h=None) -> RoundingOutcome:
    return Rounder(inst, s, ns, h).round_once(p, trial_seed)


def round_best_of(inst, s, ns, p: RoundingParams, h=None) -> RoundingOutcome:
    return Rounder(inst, s, ns, h).best_of(p)


def round_derandomized(inst, s, ns, p: RoundingParams, h=None) -> RoundingOutcome:
    return Rounder(inst, s, ns, h).derandomized(p)


def lemma_monitors(inst, s, ns, p: RoundingParams, trials: int, initial_vertex: int = 0, h=None) -> MonitorReport:
    return Rounder(inst, s, ns, h).monitors(p, trials, initial_vertex)
