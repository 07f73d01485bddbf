"""Shared generators for randomized property tests.

Everything takes an explicit numpy Generator so any test can pin its own
seed; the fixtures just hand the factory functions through.
"""

from __future__ import annotations

import numpy as np
import pytest

from urbandensity.metrics import Parcel, ParcelTable


def random_table(
    rng: np.random.Generator,
    max_parcels: int = 50,
    zero_pop_fraction: float = 0.2,
    region_id: str = "random",
) -> ParcelTable:
    """A table with mixed parcel sizes and some zero-population parcels.

    Always holds at least one resident so PWD is defined.
    """
    n = int(rng.integers(1, max_parcels + 1))
    parcels = []
    for i in range(n):
        area = float(rng.uniform(0.05, 500.0))
        if rng.uniform() < zero_pop_fraction:
            population = 0.0
        else:
            population = float(rng.uniform(0.1, 5000.0))
        parcels.append(Parcel(f"p{i + 1}", population, area))
    if all(p.population == 0 for p in parcels):
        parcels[-1] = Parcel(parcels[-1].id, float(rng.uniform(0.1, 5000.0)), parcels[-1].area)
    return ParcelTable(tuple(parcels), region_id=region_id)


def random_equal_population_table(rng: np.random.Generator, max_parcels: int = 40) -> ParcelTable:
    """Equal positive population per parcel, spread-out areas."""
    n = int(rng.integers(2, max_parcels + 1))
    population = float(rng.uniform(0.5, 100.0))
    return ParcelTable(
        tuple(
            Parcel(f"p{i + 1}", population, float(rng.uniform(0.01, 50.0)))
            for i in range(n)
        ),
        region_id="equal-pop",
    )


@pytest.fixture
def make_table():
    return random_table


@pytest.fixture
def make_equal_population_table():
    return random_equal_population_table
