import pytest
from hypothesis import HealthCheck, settings

from distavoid import FSpec, NormSpec, build

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def worked_1d():
    """d=1, l2, f(R)=1/R, two stages."""
    return build(1, NormSpec.l2(1), FSpec.parse("inv_poly:1"), 2)


@pytest.fixture(scope="session")
def euclid_2d():
    """d=2, l2, f(R)=1/R, three stages."""
    return build(2, NormSpec.l2(2), FSpec.parse("inv_poly:1"), 3)


@pytest.fixture(scope="session")
def single_stage():
    return build(1, NormSpec.l2(1), FSpec.parse("inv_poly:1"), 1)
