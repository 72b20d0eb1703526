import math

import pytest
from hypothesis import HealthCheck, settings

from covertgeo.interference import InterferenceField
from covertgeo.model import NetworkConfig

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Standard evaluation point: alpha = 4, lambda_J = 0.1, P_J = 1 W.
A_REF = math.pi ** 2 * 0.1 / 4.0


@pytest.fixture
def cfg():
    return NetworkConfig()


@pytest.fixture
def field4():
    return InterferenceField.make(0.1, 1.0, 4.0)
