"""Shared pytest fixtures for the SAS-MDP test suite."""

import logging
import os
import sys

import numpy as np
import pytest

# Add the src directory to the Python path to allow importing the package
src_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "src")
sys.path.insert(0, src_path)

logging.basicConfig(
    level=logging.WARNING,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)

from sas_mdp.core import random_instance, two_state_instance  # noqa: E402


@pytest.fixture
def two_state():
    """The two-state example at p = 0.2, γ = 0.9."""
    return two_state_instance(p=0.2, gamma=0.9)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_pda_instances():
    """Seeded random PDA instances with n, m ≤ 4."""
    rng = np.random.default_rng(2024)
    return [
        random_instance(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)), kind="pda")
        for _ in range(8)
    ]


@pytest.fixture
def small_explicit_instances():
    """Seeded random explicit instances with n, m ≤ 4."""
    rng = np.random.default_rng(7)
    return [
        random_instance(rng, int(rng.integers(1, 5)), int(rng.integers(2, 5)), kind="explicit")
        for _ in range(6)
    ]


@pytest.fixture
def tiny_pda_instances():
    """PDA instances with n, m ≤ 3, small enough for exhaustive enumeration."""
    rng = np.random.default_rng(99)
    return [
        random_instance(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), kind="pda")
        for _ in range(6)
    ]
