import numpy as np
import pytest

from ugx.graphs import gen_random_regular
from ugx.instances import gen_planted
from ugx.sdp_model import assignment_mixture, integral_solution, planted_mixture

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def planted(n, d, k, noise=0.0, seed=0):
    g = gen_random_regular(n, d, seed)
    inst, plant = gen_planted(g, k, noise, seed + 1)
    return inst, plant


def mixture_input(n, d, k, noise=0.0, plant_weight=0.95, seed=0):
    inst, plant = planted(n, d, k, noise, seed)
    s, _ = planted_mixture(inst, plant, plant_weight, seed + 2)
    return inst, plant, s


def three_part_input(n, d, k, noise=0.0, seed=0, weights=(0.9, 0.06, 0.04)):
    inst, plant = planted(n, d, k, noise, seed)
    rng = np.random.default_rng(seed + 3)
    others = [rng.integers(k, size=n) for _ in weights[1:]]
    return inst, plant, assignment_mixture(inst, [plant, *others], list(weights))


@pytest.fixture
def k4_instance():
    inst, plant = planted(4, 3, 2, 0.0, seed=1)
    return inst, plant, integral_solution(inst, plant)
