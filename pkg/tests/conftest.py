import numpy as np
import pytest

from memfun import TimeDomain, Trajectory


@pytest.fixture
def unit_domain():
    return TimeDomain.uniform(1.0, 257)


@pytest.fixture
def fine_domain():
    return TimeDomain.uniform(1.0, 513)


@pytest.fixture
def sine_reference(unit_domain):
    return Trajectory.from_callable(
        unit_domain, lambda ts: np.sin(2.0 * np.pi * np.asarray(ts, dtype=float))
    )
