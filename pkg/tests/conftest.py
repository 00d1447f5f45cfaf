import numpy as np
import pytest

from lzspec.propagator import StepperConfig
from lzspec.qubit import QubitSpectrum
from lzspec.sweep import GridSpec, run_sweep


@pytest.fixture(scope="session")
def two_level_spectrum():
    return QubitSpectrum.two_level(2.0, 2.0)


@pytest.fixture(scope="session")
def medium_map(two_level_spectrum):
    """Reduced-resolution two-level interference map shared across tests."""
    grid = GridSpec((-2.0, 10.0, 100), (0.01, 4.0, 200), -5.0)
    return run_sweep(grid, two_level_spectrum, StepperConfig())


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
