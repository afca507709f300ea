"""Shared fixtures: the reference splitter geometry and calibrated model.

The reference device: 2L = 1.5 cm, s = 22 um center-to-center, alpha =
0.03 deg, width 6 um, facet coupling ratio 0.15, operating coupling
kappa_ref = 0.7175 /mm at 1550 nm. Expensive artifacts are session-scoped.
"""

import math

import pytest

from sapsim import (PropagationOptions, build_folded5, build_fsap3, build_sap3,
                    calibrated_model, nominal_input, propagate)

HALF_LENGTH = 7500.0
SEPARATION = 22.0
ANGLE = 0.03
WIDTH = 6.0
TARGET_RATIO = 0.15
KAPPA_REF = 0.7175
LAM0 = 1550.0
BAND = (1500.0, 1630.0, 27)

TAN_ALPHA = math.tan(math.radians(ANGLE))
LATERAL_TRAVEL = 2 * HALF_LENGTH * TAN_ALPHA          # 7.854 um
D_NEAR = SEPARATION / 2 - HALF_LENGTH * TAN_ALPHA     # 7.073 um
D_FAR = SEPARATION / 2 + HALF_LENGTH * TAN_ALPHA      # 14.927 um
DELTA0 = LATERAL_TRAVEL / math.log(1.0 / TARGET_RATIO)  # 4.13995 um


@pytest.fixture(scope="session")
def sap3_ref():
    return build_sap3(HALF_LENGTH, SEPARATION, ANGLE, WIDTH)


@pytest.fixture(scope="session")
def fsap3_ref():
    return build_fsap3(HALF_LENGTH, SEPARATION, ANGLE, WIDTH, 1.0)


@pytest.fixture(scope="session")
def folded5_ref():
    return build_folded5(HALF_LENGTH, SEPARATION, ANGLE, WIDTH)


@pytest.fixture(scope="session")
def model_ref(folded5_ref):
    return calibrated_model(folded5_ref, TARGET_RATIO, KAPPA_REF, LAM0)


@pytest.fixture(scope="session")
def model_sap3(sap3_ref):
    return calibrated_model(sap3_ref, TARGET_RATIO, KAPPA_REF, LAM0)


@pytest.fixture(scope="session")
def final_ref(folded5_ref, model_ref):
    """Reference device output at 1550 nm."""
    traj = propagate(folded5_ref, model_ref, LAM0,
                     nominal_input(folded5_ref, LAM0))
    return traj.final


@pytest.fixture(scope="session")
def fast_opts():
    return PropagationOptions(rtol=1e-8, atol=1e-10, n_samples=16)
