import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def theorem_curve():
    """Reconstruction of the explicit nonconstant triharmonic directrix."""
    from trikurve.frenet import reconstruct_r3
    from trikurve.profiles import TheoremExistence

    profile = TheoremExistence()
    curve, apparatus = reconstruct_r3(profile, 1.0, 2.0, 1e-4)
    return profile, curve, apparatus
