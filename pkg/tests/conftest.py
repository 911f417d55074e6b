import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

STANDARD = [0, 24, -50, 35, -10, 1]   # y^2 = x (x-1) (x-2) (x-3) (x-4)


@pytest.fixture(autouse=True)
def _quiet():
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


@pytest.fixture(scope="session")
def model2():
    from hypreg.curve import HyperellipticModel
    return HyperellipticModel(STANDARD)


@pytest.fixture(scope="session")
def pd2(model2):
    from hypreg.curve import period_data
    with np.errstate(all="ignore"):
        return period_data(model2)


@pytest.fixture(scope="session")
def setup2(model2, pd2):
    from hypreg.regulator import setup_regulator
    with np.errstate(all="ignore"):
        return setup_regulator(model2, pd2, 0, 1, P_x=0.5)


@pytest.fixture(scope="session")
def model1():
    from hypreg.curve import HyperellipticModel
    return HyperellipticModel([0, -1, 0, 1])
