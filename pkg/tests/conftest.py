import pytest

from ringbubble import ProblemParams, compute_constants


@pytest.fixture(scope="session")
def desk_params():
    """Reference parameter set used across the suite."""
    return ProblemParams(N=5, m=2, n=2, c0=-1.0, d0=1.0)


@pytest.fixture(scope="session")
def flat_params():
    """Constant-curvature profiles: the single bubble solves exactly."""
    return ProblemParams(N=5, m=2, n=2, c0=0.0, d0=0.0)


@pytest.fixture(scope="session")
def desk_constants(desk_params):
    return compute_constants(desk_params)
