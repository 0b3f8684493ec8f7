"""Propagation rounding for Unique Games on regular expanders."""

from .errors import GenerationError, InputError, InvariantError, NumericalError, SizeError, UGXError
from .graphs import Graph, edge_expansion_exact, gen_random_regular, laplacian_lambda2, spectral_report
from .instances import UGInstance, evaluate, gen_planted, parse_instance, serialize_instance
from .sdp_model import SdpSolution, integral_solution, mix_solutions, sdp_objective, verify_feasibility
from .normalize import NormalizedSolution, normalize, verify_normalization
from .emd import avg_emd, emd_pair
from .rounding import (
    Rounder,
    RoundingOutcome,
    RoundingParams,
    lemma_monitors,
    round_best_of,
    round_derandomized,
    round_once,
    sigma,
)
from .oracle import brute_force_opt, emd_brute

__all__ = [
    "GenerationError", "InputError", "InvariantError", "NumericalError", "SizeError", "UGXError",
    "Graph", "edge_expansion_exact", "gen_random_regular", "laplacian_lambda2", "spectral_report",
    "UGInstance", "evaluate", "gen_planted", "parse_instance", "serialize_instance",
    "SdpSolution", "integral_solution", "mix_solutions", "sdp_objective", "verify_feasibility",
    "NormalizedSolution", "normalize", "verify_normalization",
    "avg_emd", "emd_pair",
    "Rounder", "RoundingOutcome", "RoundingParams", "lemma_monitors", "round_best_of",
    "round_derandomized", "round_once", "sigma",
    "brute_force_opt", "emd_brute",
]
