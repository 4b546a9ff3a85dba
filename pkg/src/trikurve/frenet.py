"""Frenet apparatus along sampled curves and curve reconstruction in R^3."""

from dataclasses import dataclass, field

import numpy as np

from .errors import CurvatureVanishes, TooFewSamples
from .geometry import CurveSamples, SpaceForm3, product_extend  # noqa: F401
from .numerics import deriv_uniform, gram_schmidt, uniform_grid

KAPPA_TOL = 1e-9


@dataclass
class FrenetApparatus:
    """Curvature, torsion and frame fields along a sampled curve.

    Frame vectors are stored in frame components of the ambient manifold.
    ``defined`` marks samples where kappa exceeds the frame tolerance; N, B
    and tau are meaningless (NaN) elsewhere.  For surfaces kappa is the
    signed geodesic curvature (sign via the rotated normal JT), tau is None
    and B is None.
    """

    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray | None
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray | None
    defined: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.defined is None:
            self.defined = np.ones(self.s.shape, dtype=bool)


def reconstruct_r3(profile, s0, s1, step):
    """Integrate the Frenet system in Euclidean R^3 for a (kappa, tau) profile.

    Classical RK4 on (alpha, T, N, B) with the frame re-orthonormalized by
    modified Gram-Schmidt after every step; initial data alpha(s0) = 0 and
    the standard basis frame.  Returns (CurveSamples, FrenetApparatus); the
    apparatus carries the profile's kappa/tau and the integrated frames.
    """
    s = uniform_grid(s0, s1, step)
    h = s[1] - s[0]
    n = s.size
    # profile values at full and half grid points, evaluated once
    kap_full = np.asarray(profile.kappa(s), dtype=float)
    tau_full = np.asarray(profile.tau(s), dtype=float)
    if np.min(kap_full) <= 0.0:
        raise CurvatureVanishes("kappa must stay positive on the interval")
    s_half = s[:-1] + 0.5 * h
    kap_half = np.asarray(profile.kappa(s_half), dtype=float)
    tau_half = np.asarray(profile.tau(s_half), dtype=float)

    pos = np.empty((n, 3))
    frames = np.empty((n, 3, 3))          # rows T, N, B
    alpha = np.zeros(3)
    M = np.eye(3)
    pos[0] = alpha
    frames[0] = M

    def rates(M, kap, tau):
        A = np.array([[0.0, kap, 0.0],
                      [-kap, 0.0, tau],
                      [0.0, -tau, 0.0]])
        return A @ M

    for i in range(n - 1):
        k0, t0 = kap_full[i], tau_full[i]
        kh, th = kap_half[i], tau_half[i]
        k1v, t1v = kap_full[i + 1], tau_full[i + 1]

        dM1 = rates(M, k0, t0)
        dA1 = M[0]
        M2 = M + 0.5 * h * dM1
        dM2 = rates(M2, kh, th)
        dA2 = M2[0]
        M3 = M + 0.5 * h * dM2
        dM3 = rates(M3, kh, th)
        dA3 = M3[0]
        M4 = M + h * dM3
        dM4 = rates(M4, k1v, t1v)
        dA4 = M4[0]

        M = M + (h / 6.0) * (dM1 + 2.0 * dM2 + 2.0 * dM3 + dM4)
        alpha = alpha + (h / 6.0) * (dA1 + 2.0 * dA2 + 2.0 * dA3 + dA4)
        M = gram_schmidt(M)
        pos[i + 1] = alpha
        frames[i + 1] = M

    curve = CurveSamples(s, pos, SpaceForm3(0.0),
                         meta={"source": "reconstruct_r3", "step": float(h)})
    apparatus = FrenetApparatus(s=s, kappa=kap_full, tau=tau_full,
                                T=frames[:, 0], N=frames[:, 1],
                                B=frames[:, 2])
    return curve, apparatus


def measure_frenet(curve, stride=1, kappa_tol=KAPPA_TOL):
    """Measure the Frenet apparatus of a sampled curve in its ambient space.

    kappa = |nabla_T T|_g and tau = <nabla_T N, B> with the ambient
    connection; 4th-order stencils on a uniform grid.  ``stride`` subsamples
    before differencing (wider stencils trade truncation error against
    roundoff amplification in the stacked derivatives).
    """
    s = curve.s[::stride]
    pts = curve.points[::stride]
    if s.size < 7:
        raise TooFewSamples("need at least 7 samples after striding")
    sub = CurveSamples(s, pts, curve.manifold)
    h = sub.step()
    m = curve.manifold

    vel = deriv_uniform(pts, h)
    T = m.chart_to_frame(pts, vel)
    G = m.gamma(pts)

    def cov_along(V):
        corr = np.einsum("ni,nj,nijk->nk", T, V, G)
        return deriv_uniform(V, h) + corr

    dT = cov_along(T)
    kap = np.sqrt((dT * dT).sum(axis=1))
    defined = kap > kappa_tol

    if m.dim == 2:
        JT = np.stack([-T[:, 1], T[:, 0]], axis=1)
        kap_signed = (dT * JT).sum(axis=1)
        return FrenetApparatus(s=s, kappa=kap_signed, tau=None, T=T, N=JT,
                               B=None, defined=defined)

    N = np.full_like(T, np.nan)
    N[defined] = dT[defined] / kap[defined, None]
    B = np.cross(T, N)
    dN = cov_along(np.where(defined[:, None], N, 0.0))
    tau = np.full(s.shape, np.nan, dtype=kap.dtype)
    tau[defined] = (dN[defined] * B[defined]).sum(axis=1)
    # torsion stencils straddling undefined samples are contaminated
    bad = ~defined
    for off in range(1, 3):
        bad[:-off] |= ~defined[off:]
        bad[off:] |= ~defined[:-off]
    tau[bad & defined] = np.nan
    return FrenetApparatus(s=s, kappa=kap, tau=tau, T=T, N=N, B=B,
                           defined=defined)


def ruled_surface_directrix_data(profile, s):
    """Gaussian curvature and geodesic curvature along the ruled directrix.

    K_S(s) = -tau(s)^2 and kappa_g(s) = kappa(s) (orientation chosen so the
    sign is +).
    """
    s = np.asarray(s, dtype=float)
    kap = np.asarray(profile.kappa(s), dtype=float)
    if np.min(kap) <= 0.0:
        raise CurvatureVanishes("directrix curvature must stay positive")
    tau = np.asarray(profile.tau(s), dtype=float)
    return {"KS": -tau**2, "kappa_g": kap}
