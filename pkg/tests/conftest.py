import numpy as np
import pytest

from nahmschmid import flow


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def elliptic_traj():
    """Reference solution (kappa=0.8, a=1, b=0) sampled from the closed form."""
    return flow.su2_closed_form_trajectory(1.0, 0.0, 0.8, (0.0, 1.0), 2000)


@pytest.fixture(scope="session")
def elliptic_traj_b():
    """Solution with a nonzero phase, used where b=0 symmetries would hide bugs."""
    return flow.su2_closed_form_trajectory(1.0, 0.3, 0.8, (0.0, 1.0), 2000)
