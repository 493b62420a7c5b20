"""Shared fixtures: the scenario registry and deterministic sample points."""

import numpy as np
import pytest

from unitfield.scenarios import builtin_scenarios, sample_points


@pytest.fixture(scope="session")
def scenarios():
    return builtin_scenarios()


@pytest.fixture(scope="session")
def sphere(scenarios):
    return scenarios["sphere2"]


@pytest.fixture(scope="session")
def classified(scenarios):
    return scenarios["classified"]


@pytest.fixture(scope="session")
def flat2(scenarios):
    return scenarios["flat2-parallel"]


def points_of(scenario, count):
    return sample_points(scenario.region, count)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
