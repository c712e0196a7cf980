import numpy as np
import pytest

from csflab import exact, flow


@pytest.fixture(scope="session")
def circle_curve():
    return exact.sample(exact.circle(), -0.5, 256)


@pytest.fixture(scope="session")
def clip_curve():
    return exact.sample(exact.paper_clip(), -5.0, 1024)


@pytest.fixture(scope="session")
def clip_rescaled_traj():
    """Closed-form rescaled oval, tau in [-7, -5] (shared, do not mutate)."""
    return flow.exact_trajectory(exact.paper_clip(),
                                 np.linspace(-7.0, -5.0, 6), 1024,
                                 rescaled=True)


@pytest.fixture(scope="session")
def circle_traj():
    return flow.exact_trajectory(exact.circle(),
                                 np.linspace(-1.0, -0.05, 40), 512)
