"""
Shared fixtures for the OPDAD test suite
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from opdad_system.models import ExperimentConfig, ScenarioConfig  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_scenario():
    """Desk-sized uplink: 2 users, 2 jammers, 8 antennas, 60 blocks"""
    return ScenarioConfig(K=2, N=2, M=8, L=60, window=(10, 40), n_r=10)


@pytest.fixture
def small_experiment(small_scenario):
    return ExperimentConfig(scenario=small_scenario, trials=2, seed=7, n_train=30, burn_in=10,
                            methods=['opdad', 'dmf', 'ed', 'sd'])


def random_orthogonal(rng, dimension):
    q, r = np.linalg.qr(rng.standard_normal((dimension, dimension)))
    return q * np.sign(np.diag(r))[None, :]
