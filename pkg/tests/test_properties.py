"""Hypothesis property tests for the algebraic invariants."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from trikurve.classifier import p4_coefficients, p4_roots
from trikurve.geometry import BCV, SpaceForm3, riemann_apply
from trikurve.surface_ode import (
    degree5_recombined,
    degree5_witness,
    degree10_discrepancy,
)

finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.5, 1.5, **finite), st.floats(-2.0, 2.0, **finite),
       st.floats(-0.4, 0.4, **finite), st.floats(-0.4, 0.4, **finite),
       st.floats(-0.4, 0.4, **finite), st.integers(0, 2**32 - 1))
def test_riemann_antisymmetry_and_multilinearity(a, b, x, y, z, seed):
    m = BCV(a, b)
    p = np.array([x, y, z])
    rng = np.random.default_rng(seed)
    X, Y, Z = rng.standard_normal((3, 3))
    lam = rng.uniform(-2.0, 2.0)
    assert np.allclose(riemann_apply(m, p, X, X, Z), 0.0, atol=1e-12)
    left = riemann_apply(m, p, X, Y, Z) + riemann_apply(m, p, Y, X, Z)
    assert np.allclose(left, 0.0, atol=1e-12)
    scaled = riemann_apply(m, p, lam * X, Y, Z)
    assert np.allclose(scaled, lam * riemann_apply(m, p, X, Y, Z),
                       atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 3.0, **finite), st.floats(-1.0, 1.0, **finite),
       st.floats(-1.0, 1.0, **finite), st.floats(-1.0, 1.0, **finite),
       st.floats(-1.0, 1.0, **finite), st.floats(-1.0, 1.0, **finite))
def test_degree5_matches_its_recombination(k, tau0, rho, c0, c1, c2):
    w = degree5_witness(k, tau0, rho, c0, c1, c2)
    r = degree5_recombined(k, tau0, rho, c0, c1, c2)
    assert math.isclose(w, r, rel_tol=1e-10, abs_tol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 3.0, **finite), st.floats(-2.0, 2.0, **finite),
       st.floats(-2.0, 2.0, **finite), st.floats(-2.0, 2.0, **finite))
def test_degree10_discrepancy_closed_form(k, c1, c2, ks):
    d = degree10_discrepancy(k, c1, c2, ks)
    assert math.isclose(d, 75.0 * k**9 * (1.0 - k),
                        rel_tol=1e-8, abs_tol=1e-8)


@settings(max_examples=150, deadline=None)
@given(st.floats(-2.0, 2.0, **finite), st.floats(-3.0, 3.0, **finite),
       st.floats(0.05, math.pi - 0.05, **finite))
def test_p4_roots_are_roots_and_positive(a, b, alpha0):
    if abs(4.0 * a - b * b) < 1e-9:
        return
    c = p4_coefficients(a, b, alpha0)
    scale = float(np.max(np.abs(c)))
    for z, mult in p4_roots(a, b, alpha0, return_multiplicity=True):
        assert z > 0.0
        assert mult in (1, 2)
        assert abs(np.polyval(c, z)) <= 1e-10 * scale * max(1.0, z) ** 4


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 5.0, **finite), st.floats(0.0, 1.0, **finite))
def test_spaceform_minus_branch_nonpositive(rho, frac):
    tau0 = frac * math.sqrt(rho)
    disc = rho * (rho - tau0**2)
    if disc < 0.0:
        return
    minus = (rho - tau0**2) - math.sqrt(disc)
    assert minus <= 1e-12 * max(1.0, rho)


@settings(max_examples=60, deadline=None)
@given(st.floats(-2.0, 2.0, **finite), st.floats(0.2, math.pi - 0.2,
                                                 **finite))
def test_spaceform_sectional_convention(rho, angle):
    m = SpaceForm3(rho)
    X = np.array([1.0, 0.0, 0.0])
    Y = np.array([0.0, math.cos(angle), math.sin(angle)])
    val = riemann_apply(m, np.zeros(3), Y, X, X) @ Y
    assert math.isclose(val, rho, rel_tol=1e-12, abs_tol=1e-12)
