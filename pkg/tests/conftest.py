import numpy as np
import pytest

from kcut import distributions


@pytest.fixture(scope="session")
def table1():
    return distributions.table1_records()


@pytest.fixture(scope="session")
def table1_pmf():
    return distributions.table1_pmf()


def random_pmf(rng: np.random.Generator, n: int, full_support: bool = False) -> np.ndarray:
    """Random probability vector; optionally bounded away from zero."""
    raw = rng.random(n)
    if full_support:
        raw += 0.05
    else:
        # knock out a random subset, keeping at least one positive entry
        mask = rng.random(n) < 0.3
        if mask.all():
            mask[rng.integers(n)] = False
        raw[mask] = 0.0
    return raw / raw.sum()
