"""Constant-curvature classification of triharmonic curves.

Surfaces of constant Gaussian curvature, 3-space forms, zero-torsion curves
in BCV spaces, and the Hopf-helix family parametrized by positive roots of
the quartic

    P4(z) = 4 z^4 + 8 b cos(a0) z^3
            + (5 b^2 cos^2(a0) - 8 (4a - b^2) sin^4(a0)) z^2
            + b (b^2 - 2 (4a - b^2) sin^2(a0)) cos(a0) z
            - b^2 (4a - b^2) sin^2(a0)

with kappa = z sin(a0) and tau = -z cos(a0) - b/2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GeodesicInput,
    ResidualTooLarge,
    SpaceFormDegenerate,
)
from .frenet import measure_frenet
from .geometry import BCV
from .numerics import deriv_uniform
from .tension import helix_tension_exact


@dataclass
class HelixSolution:
    """One classified constant-curvature solution with admissibility data."""

    class_tag: str                     # Geodesic | SurfaceCircle | ...
    kappa0: float = 0.0
    tau0: float = 0.0
    kappa0_sq: float = 0.0
    admissible: bool = True
    reason: str = ""
    ambient: dict = field(default_factory=dict)
    zeta: float | None = None
    alpha0: float | None = None
    B3: float | None = None
    multiplicity: int = 1
    residuals: dict = field(default_factory=dict)
    note: str = ""

    def as_dict(self):
        d = {
            "class": self.class_tag,
            "kappa0": self.kappa0,
            "tau0": self.tau0,
            "kappa0_sq": self.kappa0_sq,
            "admissible": self.admissible,
            "reason": self.reason,
            "ambient": self.ambient,
            "residuals": self.residuals,
        }
        for k in ("zeta", "alpha0", "B3"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        if self.multiplicity != 1:
            d["multiplicity"] = self.multiplicity
        if self.note:
            d["note"] = self.note
        return d


def _geodesic(ambient):
    return HelixSolution(class_tag="Geodesic", admissible=True,
                         reason="harmonic, hence triharmonic",
                         ambient=ambient)


def classify_surface(ks):
    """Constant-curvature triharmonic curves in a surface of curvature K_S.

    K_S <= 0 admits only geodesics; K_S > 0 adds the circle with
    kappa_g^2 = 2 K_S.
    """
    ambient = {"kind": "surface", "KS": float(ks)}
    out = [_geodesic(ambient)]
    if ks > 0.0:
        k_sq = 2.0 * ks
        out.append(HelixSolution(class_tag="SurfaceCircle",
                                 kappa0=math.sqrt(k_sq), kappa0_sq=k_sq,
                                 admissible=True,
                                 reason="kappa_g^2 = 2 K_S",
                                 ambient=ambient))
    return out


def classify_spaceform(rho, tau0):
    """Triharmonic Frenet helices in the 3-space form of curvature rho.

    Both branches kappa0^2 = (rho - tau0^2) +/- sqrt(rho (rho - tau0^2)) are
    reported; the minus branch is never a proper helix (it is nonpositive)
    and is kept with an admissibility flag.
    """
    ambient = {"kind": "spaceform", "dim": 3, "rho": float(rho),
               "tau0": float(tau0)}
    out = [_geodesic(ambient)]
    disc = rho * (rho - tau0**2)
    if rho <= 0.0 or disc < 0.0:
        return out
    root = math.sqrt(disc)
    for sgn, name in ((1.0, "plus"), (-1.0, "minus")):
        k_sq = (rho - tau0**2) + sgn * root
        admissible = k_sq > 0.0
        reason = f"{name} branch: kappa0^2 = (rho - tau0^2) {'+' if sgn > 0 else '-'} sqrt(rho (rho - tau0^2))"
        if not admissible:
            reason += " is not positive"
        out.append(HelixSolution(
            class_tag="SpaceFormHelix",
            kappa0=math.sqrt(k_sq) if k_sq > 0 else 0.0,
            kappa0_sq=k_sq, tau0=float(tau0),
            admissible=admissible, reason=reason, ambient=ambient))
    return out


def bcv_zero_torsion(a, b, B3):
    """Zero-torsion triharmonic helix data in M(a, b) for a given B3.

    kappa0^2 = 2 (b^2/4 + (4a - b^2) B3^2); admissible iff kappa0^2 > 0 and
    B3 respects the classification bounds: B3^2 < b^2 / (4 (b^2 - 4a)) when
    b^2 > 4a, and B3 != 0 when b^2 < 4a.  The excluded B3 = 0 case with
    b != 0 still has kappa0^2 > 0; it is reported inadmissible with a
    diagnostic note rather than silently dropped.
    """
    if 4.0 * a == b * b:
        raise SpaceFormDegenerate("4a = b^2 is the space-form case")
    ambient = {"kind": "bcv", "a": float(a), "b": float(b)}
    k_sq = 2.0 * (0.25 * b * b + (4.0 * a - b * b) * B3 * B3)
    admissible = k_sq > 0.0
    reason = "kappa0^2 = 2 (b^2/4 + (4a - b^2) B3^2)"
    note = ""
    if b * b > 4.0 * a:
        bound = b * b / (4.0 * (b * b - 4.0 * a))
        if not B3 * B3 < bound:
            admissible = False
            reason = f"B3^2 = {B3*B3:.6g} >= b^2/(4(b^2-4a)) = {bound:.6g}"
    else:
        if B3 == 0.0:
            admissible = False
            reason = "B3 = 0 excluded when b^2 < 4a"
            if k_sq > 0.0:
                note = ("excluded case with kappa0^2 = b^2/2 > 0: the "
                        "classification rules it out even though the "
                        "curvature equation alone would admit it")
    return HelixSolution(class_tag="BcvZeroTorsion",
                         kappa0=math.sqrt(k_sq) if k_sq > 0 else 0.0,
                         kappa0_sq=k_sq, tau0=0.0, B3=float(B3),
                         admissible=admissible, reason=reason,
                         ambient=ambient, note=note)


# ---------------------------------------------------------------------------
# P4 quartic and its positive roots.
#
# Two forms are provided.  The "published" form carries the tabulated
# coefficients (with sin^4 in the z^2 term and factor 2 in the z term).  The
# "corrected" form is the elimination redone with a sign-consistent pairing
# of the helix torsion and the adapted frame: for the frame with
# (T3, N3, B3) = (cos a0, 0, sin a0) and B = T x N, the emitted helices have
# standard-convention torsion tau0 = +zeta cos(a0) + b/2, and requiring the
# exact normal residual to vanish yields
#
#   4 z^4 + 8 b cos(a0) z^3 + (5 b^2 cos^2(a0) - 8 (4a-b^2) sin^2(a0)) z^2
#   + b (b^2 - 6 (4a-b^2) sin^2(a0)) cos(a0) z - b^2 (4a-b^2) sin^2(a0).
#
# The two differ by 4 z cos(a0) sin^2(a0) (4a-b^2) (2 z cos(a0) + b), so
# they coincide exactly on the zero-torsion locus; away from it only the
# corrected form's positive roots produce curves with vanishing order-3
# tension (verified against finite-difference tension and an independent
# product-geometry computation for b = 0).  Geometry-producing paths use
# the corrected form; the published form remains available for reference
# and is exposed through p4_discrepancy.
# ---------------------------------------------------------------------------

def p4_coefficients(a, b, alpha0, form="corrected"):
    """Descending coefficients [z^4 ... z^0] of the Hopf-helix quartic."""
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    d = 4.0 * a - b * b
    if form == "published":
        return np.array([
            4.0,
            8.0 * b * ca,
            5.0 * b * b * ca * ca - 8.0 * d * sa**4,
            b * (b * b - 2.0 * d * sa * sa) * ca,
            -b * b * d * sa * sa,
        ])
    if form == "corrected":
        return np.array([
            4.0,
            8.0 * b * ca,
            5.0 * b * b * ca * ca - 8.0 * d * sa * sa,
            b * (b * b - 6.0 * d * sa * sa) * ca,
            -b * b * d * sa * sa,
        ])
    raise ValueError("form must be 'corrected' or 'published'")


def p4_discrepancy(a, b, alpha0, zeta):
    """Corrected minus published quartic: -4 z ca sa^2 (4a-b^2)(2 z ca + b).

    Vanishes identically on the zero-torsion locus 2 zeta cos(a0) + b = 0
    and for vertical-normal angles (cos a0 = 0).
    """
    z = np.asarray(zeta)
    return np.polyval(p4_coefficients(a, b, alpha0, "corrected"), z) \
        - np.polyval(p4_coefficients(a, b, alpha0, "published"), z)


def hopf_helix_torsion(b, alpha0, zeta):
    """Standard-convention torsion of the adapted helix: zeta cos(a0) + b/2.

    The opposite torsion convention (binormal N x T) reports the negative,
    -zeta cos(a0) - b/2; magnitudes agree.
    """
    return zeta * math.cos(alpha0) + 0.5 * b


def _polyval(c, x):
    return np.polyval(c, x)


def _bisect(c, lo, hi, flo, fhi, tol=1e-12, max_iter=200):
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = _polyval(c, mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if (flo < 0) != (fm < 0):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _newton_polish(c, dc, x, lo, hi, steps=3):
    for _ in range(steps):
        f, df = _polyval(c, x), _polyval(dc, x)
        if df == 0.0:
            break
        x_new = x - f / df
        if not lo <= x_new <= hi:
            break
        x = x_new
    return x


def _real_roots_descending(c, lo, hi):
    """All real roots of the real polynomial c (descending coeffs) in [lo, hi].

    Derivative-cascade isolation: critical points of each derivative bracket
    monotone pieces of the next polynomial up; each bracket with a sign
    change is bisected and Newton-polished.  No eigenvalue solver involved.
    """
    c = np.trim_zeros(np.asarray(c, dtype=float), "f")
    if c.size <= 1:
        return []
    if c.size == 2:
        r = -c[1] / c[0]
        return [r] if lo <= r <= hi else []
    dc = np.polyder(c)
    crit = _real_roots_descending(dc, lo, hi)
    nodes = [lo] + sorted(crit) + [hi]
    roots = []
    for xl, xr in zip(nodes[:-1], nodes[1:]):
        if xr <= xl:
            continue
        fl, fr = _polyval(c, xl), _polyval(c, xr)
        if fl == 0.0:
            roots.append(xl)
            continue
        if (fl < 0) != (fr < 0):
            r = _bisect(c, xl, xr, fl, fr)
            roots.append(_newton_polish(c, dc, r, xl, xr))
    fr = _polyval(c, hi)
    if fr == 0.0:
        roots.append(hi)
    # dedupe (a root can coincide with an interval endpoint)
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] > 1e-12 * max(1.0, abs(r)):
            out.append(r)
    return out


def p4_roots(a, b, alpha0, return_multiplicity=False, form="corrected"):
    """Sorted positive roots of the Hopf-helix quartic.

    Sign-change brackets between critical points are bisected to 1e-12 and
    Newton-polished; a critical point where the quartic vanishes without
    changing sign is reported as a double root (multiplicity 2).  An empty
    list is a valid answer.
    """
    if 4.0 * a == b * b:
        raise SpaceFormDegenerate("4a = b^2 is the space-form case")
    if math.sin(alpha0) <= 0.0:
        raise ValueError("alpha0 must lie in (0, pi)")
    c = p4_coefficients(a, b, alpha0, form=form)
    scale = float(np.max(np.abs(c)))
    hi = 1.0 + scale / 4.0                     # Cauchy bound, leading coeff 4
    dc = np.polyder(c)
    crit = _real_roots_descending(dc, 0.0, hi)
    nodes = [0.0] + crit + [hi]
    roots = []
    for xl, xr in zip(nodes[:-1], nodes[1:]):
        if xr <= xl:
            continue
        fl, fr = _polyval(c, xl), _polyval(c, xr)
        if fl == 0.0 or fr == 0.0:
            # the quartic is monotone on the piece, so a node root leaves no
            # interior root; node roots are zeta = 0 (excluded) or critical
            # points (double-root scan below)
            continue
        if (fl < 0) != (fr < 0):
            r = _bisect(c, xl, xr, fl, fr)
            roots.append((_newton_polish(c, dc, r, xl, xr), 1))
    # double roots sit at critical points where P4 nearly vanishes
    for x0 in crit:
        if x0 <= 1e-14:
            continue
        if abs(_polyval(c, x0)) <= 1e-10 * scale * max(1.0, x0)**4:
            near = any(abs(x0 - r) <= 1e-8 * max(1.0, x0) for r, _ in roots)
            if not near:
                roots.append((x0, 2))
    roots = [(r, m) for r, m in roots if r > 1e-14]
    roots.sort()
    if return_multiplicity:
        return roots
    return [r for r, _ in roots]


def helix_from_root(a, b, alpha0, zeta, residual_tol=1e-8):
    """Hopf-helix solution from a root of the (corrected) quartic.

    kappa0 = zeta sin(alpha0) and tau0 = zeta cos(alpha0) + b/2 in the
    standard torsion convention (the opposite convention reports -tau0),
    with adapted frame projections (T3, N3, B3) = (cos a0, 0, sin a0).
    Raises ResidualTooLarge when zeta does not satisfy the normal-component
    helix equation (scaled by the equation's term magnitudes).
    """
    if zeta <= 0.0:
        raise ValueError("zeta must be positive")
    m = BCV(a, b)
    m.require_nondegenerate()
    sa, ca = math.sin(alpha0), math.cos(alpha0)
    kappa0 = zeta * sa
    tau0 = hopf_helix_torsion(b, alpha0, zeta)
    res_n, res_b = helix_tension_exact(m, kappa0, tau0,
                                       projections=(ca, 0.0, sa))
    scale = max((kappa0**2 + tau0**2) ** 2, 1e-30)
    if abs(res_n) > residual_tol * scale or abs(res_b) > residual_tol * scale:
        raise ResidualTooLarge(
            f"normal/binormal residuals ({res_n:.3e}, {res_b:.3e}) too large "
            f"for zeta = {zeta}")
    return HelixSolution(class_tag="BcvHopfHelix", kappa0=kappa0,
                         kappa0_sq=kappa0**2, tau0=tau0, zeta=float(zeta),
                         alpha0=float(alpha0), B3=sa, admissible=True,
                         reason="positive root of the helix quartic",
                         ambient={"kind": "bcv", "a": float(a), "b": float(b)},
                         residuals={"normal": res_n, "binormal": res_b})


def classify_bcv(a, b, alpha0=None, B3=None):
    """All constant-curvature solutions for M(a, b) at the given frame data.

    Zero-torsion solutions need B3; Hopf helices need alpha0 (roots of the
    quartic).  Always includes the geodesic class.
    """
    if 4.0 * a == b * b:
        raise SpaceFormDegenerate("4a = b^2 is the space-form case")
    ambient = {"kind": "bcv", "a": float(a), "b": float(b)}
    out = [_geodesic(ambient)]
    if B3 is not None:
        out.append(bcv_zero_torsion(a, b, B3))
    if alpha0 is not None:
        for zeta, mult in p4_roots(a, b, alpha0, return_multiplicity=True):
            sol = helix_from_root(a, b, alpha0, zeta)
            sol.multiplicity = mult
            if mult > 1:
                sol.note = "double root of the quartic"
            out.append(sol)
    return out


def n3_dichotomy_check(curve, stride=1, kappa_tol=1e-6, tol=1e-4):
    """Check T3' = kappa N3 and the constancy dichotomy along a BCV curve.

    Returns True when (T3 is constant) iff (N3 vanishes identically), the
    equivalence the vertical-projection identity forces for non-geodesic
    curves.  Raises GeodesicInput when the curve has no usable Frenet frame.
    """
    if not isinstance(curve.manifold, BCV):
        raise ValueError("dichotomy check applies to BCV curves")
    app = measure_frenet(curve, stride=stride)
    if not np.any(app.defined):
        raise GeodesicInput("curvature below tolerance everywhere")
    if np.median(app.kappa[app.defined]) < kappa_tol:
        raise GeodesicInput("curve is geodesic to tolerance")
    ok = app.defined
    T3 = app.T[:, 2]
    N3 = np.where(ok, app.N[:, 2], 0.0)
    h = float(app.s[1] - app.s[0])
    dT3 = deriv_uniform(T3, h)
    identity_err = np.max(np.abs(dT3 - app.kappa * N3)[ok][2:-2])
    scale = max(1.0, float(np.max(np.abs(app.kappa[ok]))))
    if identity_err > 100 * tol * scale:
        raise ValueError(
            f"projection identity T3' = kappa N3 violated ({identity_err:.2e})"
            "; the samples do not resolve the curve")
    t3_const = float(np.max(np.abs(T3[ok] - T3[ok][0]))) <= tol
    n3_zero = float(np.max(np.abs(N3[ok]))) <= tol
    return t3_const == n3_zero
