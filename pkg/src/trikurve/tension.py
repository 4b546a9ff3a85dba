"""Order-r tension fields along curves, numerically and exactly for helices.

The order-r tension of an arc-length curve is

    tau_r = nabla_T^{2r-1} T
            + sum_{l=0}^{r-2} (-1)^l R(nabla_T^{2r-3-l} T, nabla_T^l T) T

(r = 1 geodesic equation, r = 2 biharmonic, r = 3 triharmonic).  For curves
with constant curvature and torsion the Frenet recursion collapses tau_3 to
closed-form normal/binormal residuals, evaluated here without any finite
differencing.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotAHelix, TooFewSamples
from .frenet import measure_frenet
from .geometry import BCV, SpaceForm2, SpaceForm3, CurveSamples
from .numerics import deriv_uniform, gram_schmidt


def covariant_derivatives(curve, k_max, stride=1, dtype=None):
    """Iterated covariant derivatives nabla_T^k T, k = 0..k_max.

    Frame-component fields differentiated with 4th-order stencils plus the
    connection correction Gamma(T, .) at each sample.  ``dtype`` casts the
    computation (np.longdouble tames the roundoff amplification of stacked
    stencils).  Returns a list of (n, dim) arrays.
    """
    if not 1 <= k_max <= 5:
        raise ValueError("k_max must be in 1..5")
    pts = curve.points[::stride]
    s = curve.s[::stride]
    if s.size < 2 * k_max + 3:
        raise TooFewSamples(f"need >= {2 * k_max + 3} samples")
    if dtype is not None:
        pts = pts.astype(dtype)
        s = s.astype(dtype)
    sub = CurveSamples(s, pts, curve.manifold)
    h = sub.step()
    m = curve.manifold

    vel = deriv_uniform(pts, h)
    T = m.chart_to_frame(pts, vel)
    G = m.gamma(pts)

    out = [T]
    V = T
    for _ in range(k_max):
        V = deriv_uniform(V, h) + np.einsum("ni,nj,nijk->nk", T, V, G)
        out.append(V)
    return out


@dataclass
class TensionReport:
    """Residual of tau_r along a sampled curve.

    components: (n, dim) frame components of tau_r
    residual_norm: per-sample |tau_r|
    rel_residual: residual_norm / max term magnitude (scale-free)
    frame_components: per-sample (res_T, res_N, res_B) in the measured
        Frenet frame where defined, NaN elsewhere
    """

    order: int
    s: np.ndarray
    components: np.ndarray
    residual_norm: np.ndarray
    rel_residual: np.ndarray
    frame_components: np.ndarray
    method: str = "finite_difference"

    def max_rel(self, interior=4):
        sl = slice(interior, -interior if interior else None)
        return float(np.max(self.rel_residual[sl]))


def tension_r(curve, r, stride=1, dtype=None):
    """Evaluate tau_r along a sampled curve by finite differences."""
    if r not in (1, 2, 3):
        raise ValueError("r must be 1, 2 or 3")
    V = covariant_derivatives(curve, 2 * r - 1, stride=stride, dtype=dtype)
    pts = curve.points[::stride]
    if dtype is not None:
        pts = pts.astype(dtype)
    m = curve.manifold

    tau_r = V[2 * r - 1].copy()
    scale = np.sqrt((V[2 * r - 1] ** 2).sum(axis=1))
    for ell in range(r - 1):
        term = m.riemann_apply_many(pts, V[2 * r - 3 - ell], V[ell], V[0])
        tau_r += (-1.0) ** ell * term
        scale = np.maximum(scale, np.sqrt((term**2).sum(axis=1)))

    norm = np.sqrt((tau_r**2).sum(axis=1))
    rel = norm / np.maximum(scale, np.finfo(float).tiny)

    app = measure_frenet(curve, stride=stride)
    n = pts.shape[0]
    fc = np.full((n, 3), np.nan)
    fc[:, 0] = (tau_r * app.T).sum(axis=1)
    ok = app.defined
    if m.dim == 2:
        fc[:, 1] = (tau_r * app.N).sum(axis=1)
        fc[:, 2] = 0.0
    else:
        fc[ok, 1] = (tau_r[ok] * app.N[ok]).sum(axis=1)
        fc[ok, 2] = (tau_r[ok] * app.B[ok]).sum(axis=1)
    return TensionReport(order=r, s=curve.s[::stride],
                         components=np.asarray(tau_r, dtype=float),
                         residual_norm=np.asarray(norm, dtype=float),
                         rel_residual=np.asarray(rel, dtype=float),
                         frame_components=fc)


def frame_with_vertical_projections(proj):
    """Right-handed orthonormal (T, N, B) whose E3-components are ``proj``.

    proj = (T3, N3, B3) must satisfy T3^2 + N3^2 + B3^2 = 1 (they are the
    components of E3 in the T,N,B basis).
    """
    u = np.asarray(proj, dtype=float)
    if abs(u @ u - 1.0) > 1e-9:
        raise ValueError("projections must satisfy T3^2 + N3^2 + B3^2 = 1")
    seed = np.array([1.0, 0.0, 0.0])
    if abs(u @ seed) > 0.9:
        seed = np.array([0.0, 1.0, 0.0])
    r1 = gram_schmidt(np.stack([u, seed]))[1]
    r2 = np.cross(u, r1)
    M = np.stack([r1, r2, u / np.sqrt(u @ u)])   # rows; det = +1
    return M[:, 0], M[:, 1], M[:, 2]


def helix_tension_exact(m, kappa0, tau0, projections=None):
    """Closed-form normal and binormal residuals of tau_3 for a Frenet helix.

        res_N = (k^2+t^2)^2 - (2k^2+t^2) <R(N,T)T,N> - k t <R(B,N)T,N>
        res_B = (2k^2+t^2) <R(N,T)T,B> + k t <R(B,N)T,B>

    The tangent component vanishes identically for constant (kappa, tau).
    Space forms need no frame data; BCV requires the constant projections
    (T3, N3, B3) of the Frenet frame on the vertical direction.
    Returns (res_N, res_B).
    """
    if kappa0 <= 0.0:
        raise NotAHelix("kappa0 must be positive for a Frenet helix")
    k2, t2 = kappa0**2, tau0**2
    if isinstance(m, SpaceForm3):
        return (k2 + t2) ** 2 - (2.0 * k2 + t2) * m.rho, 0.0
    if isinstance(m, SpaceForm2):
        if tau0 != 0.0:
            raise ValueError("surface curves have no torsion")
        return (k2 + t2) ** 2 - (2.0 * k2 + t2) * m.rho, 0.0
    if not isinstance(m, BCV):
        raise ValueError("exact helix residuals: space form or BCV only")
    if projections is None:
        raise ValueError("BCV residuals need the frame projections (T3,N3,B3)")
    T, N, B = frame_with_vertical_projections(projections)
    p = np.zeros(3)
    RNT_T = riemann(m, p, N, T, T)
    RBN_T = riemann(m, p, B, N, T)
    res_n = (k2 + t2) ** 2 - (2.0 * k2 + t2) * (RNT_T @ N) \
        - kappa0 * tau0 * (RBN_T @ N)
    res_b = (2.0 * k2 + t2) * (RNT_T @ B) + kappa0 * tau0 * (RBN_T @ B)
    return float(res_n), float(res_b)


def riemann(m, p, X, Y, Z):
    """Single-point R(X,Y)Z in frame components."""
    return m.riemann_apply_many(np.asarray(p, float)[None, :],
                                np.asarray(X, float)[None, :],
                                np.asarray(Y, float)[None, :],
                                np.asarray(Z, float)[None, :])[0]
