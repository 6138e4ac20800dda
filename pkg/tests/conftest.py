import numpy as np
import pytest

from seasonlv import IntegratorConfig, bundled_scenario
from seasonlv.model import BUNDLED

# central differences need map evaluations far below the step h = 1e-6
FINE = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-13, max_steps=1_000_000)


@pytest.fixture(scope="session")
def scenarios():
    return {name: bundled_scenario(name) for name in BUNDLED}


@pytest.fixture(scope="session")
def fine_config():
    return FINE


def class27_perturbed():
    """Class-27 example with a_21 raised to 0.15 (theta < 0)."""
    return bundled_scenario("class27").params.with_entry("a", (1, 0), 0.15)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
