"""Shared test helpers: fixture paths and randomized model generation."""

import random
from pathlib import Path

import pytest

from mcmlike.arith import PoleData
from mcmlike.model import from_abstract

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def random_pole_model(rng: random.Random):
    """Random abstract model plus pole data.

    Periods are drawn from 1..6, domain degrees from 1..5 (at least one
    degree >= 2 per cycle), pole orders from 1..5; the ambient polynomial
    degree is the exact Riemann-Hurwitz fit.  Returns (model, pole_data).
    """
    n_cycles = rng.randint(1, 3)
    cycles = []
    for _ in range(n_cycles):
        period = rng.randint(1, 6)
        degs = [rng.randint(1, 5) for _ in range(period)]
        degs[rng.randrange(period)] = rng.randint(2, 5)
        cycles.append((period, tuple(degs)))
    degree = 1 + sum(d - 1 for _, ds in cycles for d in ds)
    model = from_abstract(degree, cycles)
    entries = {}
    for i, (period, _) in enumerate(cycles, start=1):
        for j in range(period):
            if rng.random() < 0.4:
                entries[(i, j)] = rng.randint(1, 5)
    if not entries:
        entries[(1, 0)] = rng.randint(1, 5)
    return model, PoleData.from_dict(entries)
