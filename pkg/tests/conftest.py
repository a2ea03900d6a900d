"""Shared fixtures: seeded random chains and small exactly solvable ones."""

from fractions import Fraction

import numpy as np
import pytest

from bdhit import ProcessSpec


def random_chain(seed, n=10, lo=0.5, hi=3.0):
    """Float chain with rates drawn uniformly from [lo, hi], top birth rate 0."""
    rng = np.random.default_rng(seed)
    lam = list(rng.uniform(lo, hi, n))
    mu = list(rng.uniform(lo, hi, n))
    lam[-1] = 0.0
    return ProcessSpec(tuple(lam), tuple(mu))


@pytest.fixture
def chain_factory():
    return random_chain


@pytest.fixture
def two_state_chain():
    """lam = (1, 0), mu = (1, 1): atoms (3 -+ sqrt(5))/2, weights (5 -+ sqrt(5))/10."""
    return ProcessSpec((1, 0), (1, 1))


@pytest.fixture
def rational_chain():
    """Small chain with Fraction rates for exact-arithmetic paths."""
    return ProcessSpec(
        (Fraction(3, 2), Fraction(2), Fraction(1), 0),
        (Fraction(1), Fraction(1, 2), Fraction(2), Fraction(5, 4)),
    )
