"""Planted-instance sweep comparing rounding quality with the explicit bound."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .emd import avg_emd
from .errors import InputError
from .graphs import gen_random_regular, spectral_report
from .instances import gen_planted
from .normalize import normalize
from .rounding import Rounder, RoundingParams
from .sdp_model import planted_mixture

COLUMNS = [
    "n", "d", "k", "noise", "eps_sdp", "lambda2", "h", "avg_emd", "R",
    "satisfied_best", "bound_theorem", "pass", "seed", "emd_gate",
]


@dataclass
class ExperimentConfig:
    n: int = 200
    d: int = 8
    k: int = 5
    noise_grid: list[float] = field(default_factory=lambda: [0.0])
    R: float = 0.2
    plant_weight: float = 0.95
    trials: int = 64
    seed: int = 0
    instances: int = 1
    out_dir: str = "."

    def __post_init__(self):
        if not 0.0 < self.R < 0.25:
            raise InputError(f"R must lie in (0, 1/4), got {self.R}")
        if any(not 0.0 <= x <= 1.0 for x in self.noise_grid):
            raise InputError("noise grid entries must lie in [0, 1]")
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if not 0.0 < self.plant_weight <= 1.0:
            raise InputError("plant weight must lie in (0, 1]")


def theorem_bound(eps: float, h: float, R: float) -> float:
    """1 - (100/(h R) + 64) eps; the explicit constants from the analysis."""
    if eps == 0.0:
        return 1.0
    return 1.0 - (100.0 / (h * R) + 64.0) * eps


def run_instance(n, d, k, noise, R, plant_weight, trials, seed) -> dict:
    g = gen_random_regular(n, d, seed)
    inst, plant = gen_planted(g, k, noise, seed + 1)
    s, _ = planted_mixture(inst, plant, plant_weight, seed + 2)
    ns = normalize(s)
    rep = spectral_report(g)
    rd = Rounder(inst, s, ns, h=rep.h_certified)
    emd = avg_emd(s, "exact" if n <= 300 else "sampled", seed=seed).mean
    best = rd.best_of(RoundingParams(R=R, seed=seed, trials=trials))
    bound = theorem_bound(rd.eps, rd.h, R)
    return {
        "n": n, "d": d, "k": k, "noise": noise, "eps_sdp": rd.eps,
        "lambda2": rep.lambda2, "h": rd.h, "avg_emd": emd, "R": R,
        "satisfied_best": best.satisfied, "bound_theorem": bound,
        "pass": bool(best.satisfied >= bound), "seed": seed, "emd_gate": bool(emd <= R / 4),
    }


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for noise in cfg.noise_grid:
        for j in range(cfg.instances):
            seed = cfg.seed + 1000 * j
            rows.append(run_instance(cfg.n, cfg.d, cfg.k, noise, cfg.R, cfg.plant_weight, cfg.trials, seed))
    return rows


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def rows_to_csv(rows, columns=COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()
