"""Shared fixtures.

The acceptance experiments are expensive, and the determinism criterion needs
each of them run at two worker counts; session-scoped fixtures compute every
(experiment, workers) pair exactly once.
"""

import math

import pytest

from corrlab import experiments as xp

ACCEPTANCE_SEED = 2024


def _trend_config():
    return xp.ExperimentConfig(n_grid=(2 ** 8, 2 ** 11, 2 ** 14), r=2, samples=200,
                               master_seed=ACCEPTANCE_SEED)


def _uniform_config():
    return xp.ExperimentConfig(n_grid=(512,), r_max=3, samples=200,
                               master_seed=ACCEPTANCE_SEED, epsilon=0.5)


def _concentration_config():
    n, r = 4096, 2
    thetas = tuple(c * math.sqrt(2 * r * r * n) for c in (1.5, 2.0, 2.5))
    return xp.ExperimentConfig(n_grid=(n,), r=r, samples=500,
                               master_seed=ACCEPTANCE_SEED, theta_grid=thetas,
                               slack=0.02)


def _range_tail_config():
    n = 4096
    lams = tuple(c * math.sqrt(n) for c in (2.1, 2.5, 3.0))
    return xp.ExperimentConfig(n_grid=(n,), samples=10 ** 4,
                               master_seed=ACCEPTANCE_SEED, delta=1.0,
                               lambda_grid=lams, slack=0.01)


@pytest.fixture(scope="session")
def trend_reports():
    cfg = _trend_config()
    return (xp.estimate_expected_ratio(cfg, workers=1),
            xp.estimate_expected_ratio(cfg, workers=8))


@pytest.fixture(scope="session")
def uniform_reports():
    cfg = _uniform_config()
    return (xp.check_uniform_upper(cfg, workers=1),
            xp.check_uniform_upper(cfg, workers=8))


@pytest.fixture(scope="session")
def concentration_reports():
    cfg = _concentration_config()
    return (xp.check_concentration(cfg, workers=1),
            xp.check_concentration(cfg, workers=8))


@pytest.fixture(scope="session")
def range_tail_reports():
    cfg = _range_tail_config()
    return (xp.check_range_tail(cfg, workers=1),
            xp.check_range_tail(cfg, workers=8))
