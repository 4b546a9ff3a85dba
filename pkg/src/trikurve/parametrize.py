"""Explicit chart parametrizations of constant-curvature helices in M(a, b).

All parametrizations realize the vertically-adapted frame (N3 = 0)

    T = sin(a0) cos(beta) E1 + sin(a0) sin(beta) E2 + cos(a0) E3

with kappa = zeta sin(a0) and tau = -zeta cos(a0) - b/2, where zeta couples
to the phase function beta(s) through

    zeta = beta'(s) + 2 a sin(a0) [y cos(beta) - x sin(beta)] - b cos(a0).

For a != 0 there are three solution shapes (nonconstant beta; constant beta
with sin*cos != 0; constant beta with sin*cos = 0); for the a = 0 group the
curve is closed-form.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BlowUp,
    ConstraintViolated,
    DegenerateParameter,
    NonUnitSpeed,
    OutOfChart,
)
from .geometry import BCV, CurveSamples
from .numerics import deriv_uniform, rk4_step, uniform_grid

_ESCAPE = 1e8
_IVP_OPTS = dict(method="DOP853", rtol=1e-12, atol=1e-13, dense_output=True)


@dataclass
class HelixParam:
    """Constants of one helix parametrization (unused fields stay None)."""

    type_tag: str
    a: float
    b: float
    alpha0: float
    zeta: float
    mu: float | None = None
    c1: float = 0.0
    c2: float = 0.0
    beta0: float | None = None
    x0_sign: int = 1                  # type (iii): branch flag (+1: x0 < 0
    #                                   with ascending y, -1: mirror branch)
    lam: float = 0.0                  # Heisenberg phase
    s_span: tuple = (0.0, 10.0)
    step: float = 1e-3
    beta_init: float = 0.0
    extras: dict = field(default_factory=dict)

    def as_dict(self):
        d = {"type": self.type_tag, "a": self.a, "b": self.b,
             "alpha0": self.alpha0, "zeta": self.zeta,
             "s_span": list(self.s_span), "step": self.step}
        for k in ("mu", "c1", "c2", "beta0", "x0_sign", "lam", "beta_init"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        d.update(self.extras)
        return d


def frame_n3zero(alpha0, beta):
    """Adapted frame (T, N, B) in frame components for given phase beta."""
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    sb, cb = math.sin(beta), math.cos(beta)
    T = np.array([sa * cb, sa * sb, ca])
    N = np.array([-sb, cb, 0.0])
    B = np.array([-ca * cb, -ca * sb, sa])
    return T, N, B


def beta_ode_residual(curve, beta, a, b, alpha0, zeta):
    """Residual zeta - (beta' + 2 a sin(a0) [y cos b - x sin b] - b cos(a0)).

    beta' is measured by 4th-order differences of the beta samples; a zero
    residual certifies the adapted-frame phase equation along the curve.
    """
    beta = np.asarray(beta, dtype=float)
    h = curve.step()
    bp = deriv_uniform(beta, h)
    x, y = curve.points[:, 0], curve.points[:, 1]
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    return zeta - (bp + 2.0 * a * sa * (y * np.cos(beta) - x * np.sin(beta))
                   - b * ca)


def _z_slope(a, b, alpha0, zeta):
    return ((4.0 * a - b * b) * math.cos(alpha0) - b * zeta) / (4.0 * a)


def _check_unit_speed(curve, tol):
    err = curve.unit_speed_error()
    if err > tol:
        raise NonUnitSpeed(f"max |speed - 1| = {err:.3e} > {tol}")
    curve.meta["unit_speed_error"] = err
    return curve


def type_i_constraint_radius_sq(a, b, alpha0, zeta, mu):
    """Right-hand side of the type (i) constraint on c1^2 + c2^2."""
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    return (mu / a) * ((b * ca + zeta - 1.0 / mu) + a * mu * sa * sa)


def type_i_constants(a, b, alpha0, zeta, mu=None, phase=0.0):
    """Pick admissible (mu, c1, c2) for the type (i) parametrization.

    Default mu = 1/(zeta + b cos a0) makes the constraint radius equal
    mu sin(a0) for every a; other mu values are accepted when the constraint
    right-hand side stays nonnegative.
    """
    if mu is None:
        denom = zeta + b * math.cos(alpha0)
        if denom <= 0.0:
            raise DegenerateParameter(
                "zeta + b cos(alpha0) <= 0: pass mu explicitly")
        mu = 1.0 / denom
    r_sq = type_i_constraint_radius_sq(a, b, alpha0, zeta, mu)
    if r_sq < 0.0:
        raise ConstraintViolated(
            f"constraint radius^2 = {r_sq:.3e} < 0 for mu = {mu}")
    r = math.sqrt(r_sq)
    return mu, r * math.cos(phase), r * math.sin(phase)


def parametrize_type_i(params):
    """Helix with nonconstant phase: a circling (x, y) and drifting z.

        x = mu sin(a0) sin(beta) + c1,  y = -mu sin(a0) cos(beta) + c2,
        z = (b / 4a) beta + z_slope * s

    beta solves the scalar phase equation obtained by substituting x(beta),
    y(beta); with the constraint on (mu, c1, c2) this makes beta' equal
    lambda_a / mu > 0, so beta is strictly monotone.
    """
    p = params
    if p.a == 0.0:
        raise DegenerateParameter("type (i) requires a != 0")
    BCV(p.a, p.b).require_nondegenerate()
    if p.mu is None or p.mu <= 0.0:
        raise ConstraintViolated("type (i) requires mu > 0")
    sa, ca = math.sin(p.alpha0), math.cos(p.alpha0)
    r_sq = type_i_constraint_radius_sq(p.a, p.b, p.alpha0, p.zeta, p.mu)
    if abs(p.c1**2 + p.c2**2 - r_sq) > 1e-12 * max(1.0, abs(r_sq)):
        raise ConstraintViolated(
            f"c1^2 + c2^2 = {p.c1**2 + p.c2**2:.15g} != {r_sq:.15g}")

    base = p.zeta + p.b * ca + 2.0 * p.a * p.mu * sa * sa

    def beta_rate(_, beta):
        return base - 2.0 * p.a * sa * (p.c2 * np.cos(beta)
                                        - p.c1 * np.sin(beta))

    bgrid = np.linspace(0.0, 2.0 * np.pi, 721)
    if np.min(beta_rate(0.0, bgrid)) <= 0.0:
        raise OutOfChart("the phase circle leaves the chart (beta' <= 0)")

    # fixed-step RK4 on the emission grid: its error is a smooth function of
    # s, so downstream stacked finite differences do not amplify it the way
    # they amplify the piecewise interpolation error of an adaptive solver
    s = uniform_grid(p.s_span[0], p.s_span[1], p.step)
    h = s[1] - s[0]
    beta = np.empty_like(s)
    beta[0] = p.beta_init
    for i in range(s.size - 1):
        beta[i + 1] = rk4_step(beta_rate, s[i], beta[i], h)
    x = p.mu * sa * np.sin(beta) + p.c1
    y = -p.mu * sa * np.cos(beta) + p.c2
    z = (p.b / (4.0 * p.a)) * beta + _z_slope(p.a, p.b, p.alpha0, p.zeta) * s
    curve = CurveSamples(s, np.stack([x, y, z], axis=1), BCV(p.a, p.b),
                         meta={"param": p.as_dict(), "beta": beta})
    return _check_unit_speed(curve, 1e-6)


def parametrize_type_ii(params):
    """Helix with constant phase beta0, sin(beta0) cos(beta0) != 0.

    y = x tan(beta0) + c1 with c1 = (zeta + b cos a0)/(2 a sin a0 cos beta0),
    z linear in s, and x integrating the chart-stretched line field.  For
    a > 0 the solution escapes in finite arc length; the emitted interval is
    truncated at 95% of the detected escape parameter.
    """
    p = params
    if p.a == 0.0:
        raise DegenerateParameter("type (ii) requires a != 0")
    BCV(p.a, p.b).require_nondegenerate()
    if p.beta0 is None or abs(math.sin(p.beta0) * math.cos(p.beta0)) < 1e-12:
        raise ConstraintViolated("type (ii) needs sin(beta0) cos(beta0) != 0")
    sa, ca = math.sin(p.alpha0), math.cos(p.alpha0)
    sb, cb = math.sin(p.beta0), math.cos(p.beta0)
    tb = sb / cb
    c1 = (p.zeta + p.b * ca) / (2.0 * p.a * sa * cb)

    def x_rate(_, xv):
        x = xv[0]
        y = x * tb + c1
        return [(1.0 + p.a * (x * x + y * y)) * sa * cb]

    def escape(_, xv):
        return abs(xv[0]) - _ESCAPE

    escape.terminal = True

    def chart_exit(_, xv):
        x = xv[0]
        y = x * tb + c1
        return 1.0 + p.a * (x * x + y * y) - 1e-9

    chart_exit.terminal = True

    x_init = float(p.extras.get("x_init", 0.0))
    if abs(x_init) >= _ESCAPE:
        raise BlowUp("initial point beyond the escape threshold",
                     escape_s=p.s_span[0])
    if chart_exit(0.0, [x_init]) <= 0.0:
        raise OutOfChart("initial point outside the chart")
    sol = solve_ivp(x_rate, p.s_span, [x_init],
                    events=[escape, chart_exit], **_IVP_OPTS)
    if not sol.success:
        raise RuntimeError(f"type (ii) integration failed: {sol.message}")
    s_end, truncated = _truncate_on_event(p.s_span, sol)
    s = uniform_grid(p.s_span[0], s_end, p.step)
    x = sol.sol(s)[0]
    y = x * tb + c1
    z = _z_slope(p.a, p.b, p.alpha0, p.zeta) * s + p.c2
    curve = CurveSamples(s, np.stack([x, y, z], axis=1), BCV(p.a, p.b),
                         meta={"param": p.as_dict(), "c1_derived": c1,
                               "truncated": truncated,
                               "beta": np.full(s.shape, p.beta0)})
    return _check_unit_speed(curve, 1e-6)


def parametrize_type_iii(params):
    """Helix with constant phase and sin(beta0) cos(beta0) = 0: x frozen.

        x = x0 = -sign * (zeta + b cos a0) / (2 a sin a0),   sign = x0_sign
        y' = (1 + a [x0^2 + y^2]) sin(a0)   (positive branch)
        z  = z_slope * s + c1

    The sign flag selects one of the two mirror curves (beta0 = +/- pi/2).
    """
    p = params
    if p.a == 0.0:
        raise DegenerateParameter("type (iii) requires a != 0")
    BCV(p.a, p.b).require_nondegenerate()
    sa, ca = math.sin(p.alpha0), math.cos(p.alpha0)
    sign = 1.0 if p.x0_sign >= 0 else -1.0
    x0 = -sign * (p.zeta + p.b * ca) / (2.0 * p.a * sa)

    def y_rate(_, yv):
        # the integration direction couples to the x0 sign choice
        # (sin(beta0) = sign); the default sign is the ascending branch
        return [sign * (1.0 + p.a * (x0 * x0 + yv[0] * yv[0])) * sa]

    def escape(_, yv):
        return abs(yv[0]) - _ESCAPE

    escape.terminal = True

    def chart_exit(_, yv):
        return 1.0 + p.a * (x0 * x0 + yv[0] * yv[0]) - 1e-9

    chart_exit.terminal = True

    y_init = float(p.extras.get("y_init", 0.0))
    if 1.0 + p.a * (x0 * x0 + y_init * y_init) <= 0.0:
        raise OutOfChart("initial point outside the chart")
    sol = solve_ivp(y_rate, p.s_span, [y_init],
                    events=[escape, chart_exit], **_IVP_OPTS)
    if not sol.success:
        raise RuntimeError(f"type (iii) integration failed: {sol.message}")
    s_end, truncated = _truncate_on_event(p.s_span, sol)
    s = uniform_grid(p.s_span[0], s_end, p.step)
    y = sol.sol(s)[0]
    x = np.full(s.shape, x0)
    z = _z_slope(p.a, p.b, p.alpha0, p.zeta) * s + p.c1
    beta0 = math.copysign(math.pi / 2.0, sign)
    curve = CurveSamples(s, np.stack([x, y, z], axis=1), BCV(p.a, p.b),
                         meta={"param": p.as_dict(), "x0": x0,
                               "truncated": truncated,
                               "beta": np.full(s.shape, beta0)})
    return _check_unit_speed(curve, 1e-6)


def _truncate_on_event(s_span, sol):
    """95% truncation before a detected escape; error out on empty windows."""
    hit = [t[0] for t in sol.t_events if t.size > 0]
    if not hit:
        return s_span[1], False
    s_esc = min(hit)
    s_end = s_span[0] + 0.95 * (s_esc - s_span[0])
    if s_end - s_span[0] < 1e-6:
        raise BlowUp("solution escapes immediately", escape_s=s_esc)
    return s_end, True


def type_iii_closed_form(a, x0, alpha0, s, s0=0.0):
    """Closed-form y(s) for a > 0 (tangent integral of the separable flow)."""
    if a <= 0.0:
        raise ValueError("closed form stated for a > 0")
    A = 1.0 + a * x0 * x0
    w = math.sqrt(a * A) * math.sin(alpha0)
    return math.sqrt(A / a) * np.tan(w * (np.asarray(s) - s0))


def parametrize_heisenberg(b, alpha0, zeta, lam=0.0, s_span=(0.0, 10.0),
                           step=1e-3, dtype=np.float64):
    """Closed-form helix through the origin of the a = 0 group.

        beta(s) = (zeta + b cos a0) s + lam
        x = sin(a0) (sin beta - sin lam) / (zeta + b cos a0)
        y = -sin(a0) (cos beta - cos lam) / (zeta + b cos a0)
        z = ((2 zeta + b cos a0) cos a0 + b) / (2 (zeta + b cos a0)) s
            + b sin^2(a0) (sin lam cos beta - cos lam sin beta)
              / (2 (zeta + b cos a0)^2)

    dtype=np.longdouble emits extended-precision samples (useful when the
    curve feeds long chains of stacked finite differences).
    """
    if b == 0.0:
        raise DegenerateParameter("the a = 0 family needs b != 0")
    if zeta <= 0.0:
        raise ValueError("zeta must be positive")
    b, alpha0, zeta, lam = (dtype(v) for v in (b, alpha0, zeta, lam))
    sa, ca = np.sin(alpha0), np.cos(alpha0)
    om = zeta + b * ca
    if abs(float(om)) < 1e-12 * max(zeta, abs(float(b))):
        raise DegenerateParameter(
            "zeta + b cos(alpha0) = 0: the closed-form parametrization "
            "degenerates (phase equation forces beta' = 0)")
    s = uniform_grid(s_span[0], s_span[1], step).astype(dtype)
    beta = om * s + lam
    x = sa * (np.sin(beta) - np.sin(lam)) / om
    y = -sa * (np.cos(beta) - np.cos(lam)) / om
    z = ((2.0 * zeta + b * ca) * ca + b) / (2.0 * om) * s \
        + b * sa * sa / (2.0 * om * om) \
        * (np.sin(lam) * np.cos(beta) - np.cos(lam) * np.sin(beta))
    p = HelixParam(type_tag="Heisenberg", a=0.0, b=float(b),
                   alpha0=float(alpha0), zeta=float(zeta), lam=float(lam),
                   s_span=tuple(s_span), step=step)
    curve = CurveSamples(s, np.stack([x, y, z], axis=1), BCV(0.0, float(b)),
                         meta={"param": p.as_dict(), "beta": beta})
    return _check_unit_speed(curve, 1e-9)


def heisenberg_ode_residuals(curve):
    """Max residuals of the first-order system the closed form must satisfy.

        x' = sin(a0) cos(beta),  y' = sin(a0) sin(beta),
        z' = cos(a0) + (b/2) sin(a0) (x sin(beta) - y cos(beta))

    Derivatives of the closed form are evaluated analytically, so the
    residual reflects transcription errors only (machine precision).
    """
    p = curve.meta["param"]
    b, alpha0, zeta, lam = p["b"], p["alpha0"], p["zeta"], p["lam"]
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    om = zeta + b * ca
    s = curve.s
    beta = om * s + lam
    x, y = curve.points[:, 0], curve.points[:, 1]
    xp = sa * np.cos(beta)               # analytic x'
    yp = sa * np.sin(beta)
    zp = ((2.0 * zeta + b * ca) * ca + b) / (2.0 * om) \
        + b * sa * sa / (2.0 * om) \
        * (-math.sin(lam) * np.sin(beta) - math.cos(lam) * np.cos(beta))
    rx = xp - sa * np.cos(beta)
    ry = yp - sa * np.sin(beta)
    rz = zp - (ca + 0.5 * b * sa * (x * np.sin(beta) - y * np.cos(beta)))
    return (float(np.max(np.abs(rx))), float(np.max(np.abs(ry))),
            float(np.max(np.abs(rz))))
