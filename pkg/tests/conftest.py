import pytest

from crawlsim import plant as plantmod
from crawlsim.plant import PlantParams


@pytest.fixture(scope="session")
def fig_params() -> PlantParams:
    """The reference parameter set used across the trajectory tests."""
    return PlantParams()


@pytest.fixture(scope="session")
def phase_trajectories(fig_params):
    """20 s trajectories for all four phase-shift indices (analytic drive)."""
    return {
        n: plantmod.simulate(fig_params.with_shift_index(n), duration=20.0)
        for n in range(4)
    }
