"""Curvature/torsion profiles that drive reconstruction and verification.

A profile provides kappa(s), tau(s) and the first four s-derivatives of
kappa.  Closed-form profiles evaluate derivatives analytically; tabulated
profiles fall back to spline derivatives and are documented as lower
accuracy.
"""

import math

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import NegativeRadicand
from . import surface_ode

SQRT5 = np.sqrt(5.0)
# tau/kappa ratio of the explicit nonconstant family: (3/2) sqrt(7/5)
LANCRET_RATIO = 1.5 * np.sqrt(7.0 / 5.0)


class FrenetProfile:
    """Base class; subclasses set .domain and implement the evaluators."""

    domain = (-np.inf, np.inf)

    def kappa(self, s):
        raise NotImplementedError

    def tau(self, s):
        raise NotImplementedError

    def dkappa(self, s, order=1):
        raise NotImplementedError

    def derivatives(self, s, upto=4):
        return tuple(self.dkappa(s, order=m) for m in range(upto + 1))

    def check_domain(self, s):
        s = np.asarray(s)
        lo, hi = self.domain
        if s.min() < lo or s.max() > hi:
            raise ValueError(f"s outside profile domain {self.domain}")


class ConstantPair(FrenetProfile):
    """Constant curvature and torsion (Frenet helix data)."""

    def __init__(self, kappa0, tau0=0.0):
        if kappa0 < 0:
            raise ValueError("kappa0 must be >= 0")
        self.kappa0 = float(kappa0)
        self.tau0 = float(tau0)

    def kappa(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.kappa0)

    def tau(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.tau0)

    def dkappa(self, s, order=1):
        s = np.asarray(s, dtype=float)
        if order == 0:
            return self.kappa(s)
        return np.zeros_like(s)


class TheoremExistence(FrenetProfile):
    """Nonconstant triharmonic curvature from the surface first integral.

    For c1 = c2 = 0 the orbit has the closed form kappa = sqrt(5)/s with
    induced torsion tau = 3 sqrt(7) / (2 s) (a Lancret pair).  For other
    constants the orbit is integrated numerically on ``s_span`` from
    ``kappa_init`` and the torsion is induced through the normal-component
    equation.
    """

    def __init__(self, c1=0.0, c2=0.0, s_span=(0.5, 4.0), kappa_init=None,
                 sign=-1.0):
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.closed_form = (self.c1 == 0.0 and self.c2 == 0.0)
        if self.closed_form:
            self.domain = (1e-12, np.inf)
            self._orbit = None
            return
        k0 = SQRT5 if kappa_init is None else float(kappa_init)
        if float(surface_ode.fi_rhs(k0, self.c1, self.c2)) < 0:
            raise NegativeRadicand(
                "first-integral radicand negative at kappa_init; "
                "pass an admissible kappa_init")
        self._orbit = surface_ode.solve_first_integral(
            surface_ode.FirstIntegralParams(c1=self.c1, c2=self.c2),
            k0, s_span, sign=sign)
        self.domain = self._orbit.domain

    def kappa(self, s):
        s = np.asarray(s, dtype=float)
        if self.closed_form:
            return SQRT5 / s
        return self._orbit.kappa(s)

    def dkappa(self, s, order=1):
        s = np.asarray(s, dtype=float)
        if self.closed_form:
            # d^m/ds^m (sqrt5 * s^-1) = sqrt5 * (-1)^m m! s^-(m+1)
            sign = -1.0 if order % 2 else 1.0
            return sign * SQRT5 * math.factorial(order) * s ** (-order - 1)
        return self._orbit.dkappa(s, order=order)

    def tau(self, s):
        s = np.asarray(s, dtype=float)
        if self.closed_form:
            return 1.5 * np.sqrt(7.0) / s
        return surface_ode.torsion_from_eq22(self.derivatives(s, upto=4))


class Tabulated(FrenetProfile):
    """Profile interpolated from (s, kappa[, tau]) samples.

    Quintic splines keep the fourth derivative defined (the normal-component
    equation consumes it); accuracy is limited by the table resolution.
    """

    def __init__(self, s, kappa, tau=None):
        s = np.asarray(s, dtype=float)
        kappa = np.asarray(kappa, dtype=float)
        if s.ndim != 1 or s.size != kappa.size:
            raise ValueError("s and kappa must be aligned 1-d arrays")
        if np.any(np.diff(s) <= 0):
            raise ValueError("s grid must be strictly increasing")
        k = 5 if s.size >= 6 else min(3, s.size - 1)
        self._spl = make_interp_spline(s, kappa, k=k)
        self._dspl = [self._spl.derivative(m) for m in range(1, 5)]
        self._tau_spl = None
        if tau is not None:
            tau = np.asarray(tau, dtype=float)
            self._tau_spl = make_interp_spline(s, tau, k=min(3, s.size - 1))
        self.domain = (float(s[0]), float(s[-1]))

    def kappa(self, s):
        self.check_domain(s)
        return self._spl(np.asarray(s, dtype=float))

    def dkappa(self, s, order=1):
        if order == 0:
            return self.kappa(s)
        self.check_domain(s)
        return self._dspl[order - 1](np.asarray(s, dtype=float))

    def tau(self, s):
        self.check_domain(s)
        s = np.asarray(s, dtype=float)
        if self._tau_spl is None:
            return np.zeros_like(s)
        return self._tau_spl(s)
