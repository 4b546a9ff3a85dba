"""Ambient geometries: metrics, orthonormal frames, connections, curvature.

All vector quantities handed between modules are *frame components* with
respect to each manifold's distinguished orthonormal frame; conversions to
and from chart components are explicit.  The curvature sign convention is
fixed so that <R(N,T)T,N> equals the sectional curvature of span{T,N}; every
model here has a curvature operator diagonal in its frame, so the full
tensor is reconstructed from sectional curvatures of the frame planes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import OutOfChart, SpaceFormDegenerate, Unsupported


@dataclass(frozen=True)
class FramePoint:
    """Chart point plus the frame vectors (columns) in chart components."""

    position: np.ndarray
    frame: np.ndarray

    def gram(self, metric):
        """Gram matrix of the frame under the given metric matrix."""
        return self.frame.T @ metric @ self.frame


class ManifoldModel:
    """Base class for the ambient geometries.

    Subclasses implement vectorized evaluators over arrays of chart points
    ``pts`` of shape (..., dim):

    - frame_matrix(pts)      -> (..., dim, dim), columns are frame vectors
    - gamma(pts)             -> (..., dim, dim, dim) with
                                nabla_{E_i} E_j = sum_k Gamma[..., i, j, k] E_k
    - sectional_at(pts)      -> (..., n_pairs) sectional curvatures of the
                                frame planes listed by sectional_pairs()
    """

    dim = 3
    kind = "abstract"

    def check_chart(self, pts):
        pass

    def metric_at(self, p):
        """Metric matrix in chart coordinates at a single point."""
        p = np.asarray(p, dtype=float)
        self.check_chart(p[None, :])
        F = self.frame_matrix(p[None, :])[0]
        Finv = np.linalg.inv(F)
        return Finv.T @ Finv

    def frame_at(self, p):
        p = np.asarray(p, dtype=float)
        self.check_chart(p[None, :])
        return FramePoint(position=p, frame=self.frame_matrix(p[None, :])[0])

    def connection_in_frame(self, p):
        """Gamma[i, j, k] at a single point: nabla_{E_i}E_j = Gamma[i,j,k] E_k."""
        p = np.asarray(p, dtype=float)
        self.check_chart(p[None, :])
        return self.gamma(p[None, :])[0]

    def sectional_pairs(self):
        if self.dim == 2:
            return [(0, 1)]
        return [(0, 1), (0, 2), (1, 2)]

    def curvature_components(self):
        raise Unsupported(f"curvature_components undefined for {self.kind}")

    # -- vectorized helpers shared by the curve machinery ------------------

    def chart_to_frame(self, pts, vecs):
        """Convert chart-component vectors along pts to frame components."""
        F = self.frame_matrix(pts)
        return np.linalg.solve(F, vecs[..., None])[..., 0]

    def frame_to_chart(self, pts, vecs):
        F = self.frame_matrix(pts)
        return (F @ vecs[..., None])[..., 0]

    def norm_g(self, pts, vecs_chart):
        """Metric norm of chart-component vectors."""
        vf = self.chart_to_frame(pts, vecs_chart)
        return np.sqrt((vf * vf).sum(axis=-1))

    def riemann_apply_many(self, pts, X, Y, Z):
        """R(X, Y)Z in frame components; vectorized over leading axes.

        Uses the diagonal curvature-operator decomposition: with K_pq the
        sectional curvature of the plane E_p ^ E_q,

            <R(X,Y)Z, W> = sum_{p<q} K_pq w_pq(X,Y) w_pq(W,Z),
            w_pq(A,B) = A_p B_q - A_q B_p.
        """
        K = self.sectional_at(pts)
        X, Y, Z = (np.asarray(v) for v in (X, Y, Z))
        out = np.zeros(np.broadcast(X, Y, Z).shape, dtype=X.dtype)
        for idx, (p, q) in enumerate(self.sectional_pairs()):
            w = X[..., p] * Y[..., q] - X[..., q] * Y[..., p]
            coef = K[..., idx] * w
            out[..., p] += coef * Z[..., q]
            out[..., q] -= coef * Z[..., p]
        return out


class SpaceForm2(ManifoldModel):
    """Surface of constant curvature rho in the conformal disk chart.

    g = (dx^2 + dy^2) / lam^2 with lam = 1 + (rho/4)(x^2 + y^2); the chart is
    all of R^2 for rho >= 0 and the disk lam > 0 for rho < 0.
    """

    dim = 2
    kind = "spaceform2"

    def __init__(self, rho):
        self.rho = float(rho)

    def _lam(self, pts):
        return 1.0 + 0.25 * self.rho * (pts**2).sum(axis=-1)

    def check_chart(self, pts):
        if np.any(self._lam(np.asarray(pts)) <= 0.0):
            raise OutOfChart("conformal factor nonpositive")

    def frame_matrix(self, pts):
        pts = np.asarray(pts)
        lam = self._lam(pts)
        eye = np.eye(self.dim, dtype=pts.dtype)
        return lam[..., None, None] * eye

    def chart_to_frame(self, pts, vecs):
        return np.asarray(vecs) / self._lam(np.asarray(pts))[..., None]

    def frame_to_chart(self, pts, vecs):
        return np.asarray(vecs) * self._lam(np.asarray(pts))[..., None]

    def gamma(self, pts):
        pts = np.asarray(pts)
        dlam = 0.5 * self.rho * pts                     # coordinate gradient
        n = pts.shape[:-1]
        G = np.zeros(n + (self.dim,) * 3, dtype=pts.dtype)
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    if i == j:
                        G[..., i, j, k] += dlam[..., k]
                    if i == k:
                        G[..., i, j, k] -= dlam[..., j]
        return G

    def sectional_at(self, pts):
        pts = np.asarray(pts)
        return np.full(pts.shape[:-1] + (1,), self.rho, dtype=pts.dtype)

    def curvature_components(self):
        return {"K": self.rho}


class SpaceForm3(SpaceForm2):
    """3-space form of constant curvature rho, conformal ball chart."""

    dim = 3
    kind = "spaceform3"

    def sectional_at(self, pts):
        pts = np.asarray(pts)
        return np.full(pts.shape[:-1] + (3,), self.rho, dtype=pts.dtype)

    def curvature_components(self):
        return {"R1212": self.rho, "R1313": self.rho, "R2323": self.rho}


class BCV(ManifoldModel):
    """Bianchi-Cartan-Vranceanu space M(a, b) in its global chart.

    Metric: (dx^2 + dy^2)/lam^2 + (dz + (b/2)(y dx - x dy)/lam)^2 with
    lam = 1 + a (x^2 + y^2) > 0.  Orthonormal frame:

        E1 = lam d_x - (b y / 2) d_z,  E2 = lam d_y + (b x / 2) d_z,
        E3 = d_z.

    4a = b^2 is the space-form degeneration: geometric evaluation remains
    valid (the classification invariants assume it, via the curvature
    components), but every classification entry point rejects such
    parameters through require_nondegenerate().
    """

    dim = 3
    kind = "bcv"

    def __init__(self, a, b):
        self.a = float(a)
        self.b = float(b)

    @property
    def is_spaceform_degenerate(self):
        return 4.0 * self.a == self.b**2

    def require_nondegenerate(self):
        if self.is_spaceform_degenerate:
            raise SpaceFormDegenerate(
                f"4a = b^2 = {self.b**2}: M(a,b) is a space form")

    def _lam(self, pts):
        return 1.0 + self.a * (pts[..., 0]**2 + pts[..., 1]**2)

    def check_chart(self, pts):
        if np.any(self._lam(np.asarray(pts)) <= 0.0):
            raise OutOfChart("lambda_a <= 0: outside the BCV chart")

    def frame_matrix(self, pts):
        pts = np.asarray(pts)
        lam = self._lam(pts)
        n = pts.shape[:-1]
        F = np.zeros(n + (3, 3), dtype=pts.dtype)
        F[..., 0, 0] = lam
        F[..., 1, 1] = lam
        F[..., 2, 0] = -0.5 * self.b * pts[..., 1]
        F[..., 2, 1] = 0.5 * self.b * pts[..., 0]
        F[..., 2, 2] = 1.0
        return F

    def chart_to_frame(self, pts, vecs):
        pts = np.asarray(pts)
        vecs = np.asarray(vecs)
        lam = self._lam(pts)
        x, y = pts[..., 0], pts[..., 1]
        out = np.empty_like(vecs)
        out[..., 0] = vecs[..., 0] / lam
        out[..., 1] = vecs[..., 1] / lam
        out[..., 2] = vecs[..., 2] + 0.5 * self.b / lam * (
            y * vecs[..., 0] - x * vecs[..., 1])
        return out

    def frame_to_chart(self, pts, vecs):
        pts = np.asarray(pts)
        vecs = np.asarray(vecs)
        lam = self._lam(pts)
        x, y = pts[..., 0], pts[..., 1]
        out = np.empty_like(vecs)
        out[..., 0] = lam * vecs[..., 0]
        out[..., 1] = lam * vecs[..., 1]
        out[..., 2] = (vecs[..., 2] - 0.5 * self.b * y * vecs[..., 0]
                       + 0.5 * self.b * x * vecs[..., 1])
        return out

    def gamma(self, pts):
        pts = np.asarray(pts)
        ax2 = 2.0 * self.a * pts[..., 0]
        ay2 = 2.0 * self.a * pts[..., 1]
        hb = 0.5 * self.b
        n = pts.shape[:-1]
        G = np.zeros(n + (3, 3, 3), dtype=pts.dtype)
        G[..., 0, 0, 1] = ay2          # nabla_E1 E1 =  2ay E2
        G[..., 0, 1, 0] = -ay2         # nabla_E1 E2 = -2ay E1 + (b/2) E3
        G[..., 0, 1, 2] = hb
        G[..., 0, 2, 1] = -hb          # nabla_E1 E3 = -(b/2) E2
        G[..., 1, 0, 1] = -ax2         # nabla_E2 E1 = -2ax E2 - (b/2) E3
        G[..., 1, 0, 2] = -hb
        G[..., 1, 1, 0] = ax2          # nabla_E2 E2 =  2ax E1
        G[..., 1, 2, 0] = hb           # nabla_E2 E3 =  (b/2) E1
        G[..., 2, 0, 1] = -hb          # nabla_E3 E1 = -(b/2) E2
        G[..., 2, 1, 0] = hb           # nabla_E3 E2 =  (b/2) E1
        return G

    def sectional_at(self, pts):
        pts = np.asarray(pts)
        K = np.empty(pts.shape[:-1] + (3,), dtype=pts.dtype)
        K[..., 0] = 4.0 * self.a - 0.75 * self.b**2
        K[..., 1] = 0.25 * self.b**2
        K[..., 2] = 0.25 * self.b**2
        return K

    def curvature_components(self):
        return {"R1212": 4.0 * self.a - 0.75 * self.b**2,
                "R1313": 0.25 * self.b**2,
                "R2323": 0.25 * self.b**2}


class RuledSurfaceR3(ManifoldModel):
    """Ruled surface x(s,t) = alpha(s) + t N(s) over a Frenet directrix.

    Chart coordinates are (s, t).  Geometry is evaluated only along the
    directrix t = 0, where the induced frame is (d_s, d_t), the geodesic
    curvature of the directrix equals its space curvature, and the Gaussian
    curvature is -tau(s)^2.
    """

    dim = 2
    kind = "ruled"

    def __init__(self, directrix):
        self.directrix = directrix

    def check_chart(self, pts):
        pts = np.asarray(pts)
        if np.any(np.abs(pts[..., 1]) > 1e-12):
            raise OutOfChart("ruled-surface geometry is evaluated at t = 0")
        lo, hi = self.directrix.domain
        if np.any(pts[..., 0] < lo) or np.any(pts[..., 0] > hi):
            raise OutOfChart("s outside the directrix domain")

    def metric_at(self, p):
        p = np.asarray(p, dtype=float)
        s, t = float(p[0]), float(p[1])
        kap = float(self.directrix.kappa(np.array([s]))[0])
        tau = float(self.directrix.tau(np.array([s]))[0])
        E = (1.0 - t * kap)**2 + (t * tau)**2
        return np.array([[E, 0.0], [0.0, 1.0]])

    def frame_matrix(self, pts):
        pts = np.asarray(pts)
        self.check_chart(pts)
        eye = np.eye(2, dtype=pts.dtype)
        return np.broadcast_to(eye, pts.shape[:-1] + (2, 2)).copy()

    def chart_to_frame(self, pts, vecs):
        self.check_chart(np.asarray(pts))
        return np.asarray(vecs).copy()

    def frame_to_chart(self, pts, vecs):
        self.check_chart(np.asarray(pts))
        return np.asarray(vecs).copy()

    def gamma(self, pts):
        pts = np.asarray(pts)
        self.check_chart(pts)
        kap = np.asarray(self.directrix.kappa(pts[..., 0]), dtype=pts.dtype)
        n = pts.shape[:-1]
        G = np.zeros(n + (2, 2, 2), dtype=pts.dtype)
        G[..., 0, 0, 1] = kap          # nabla_{e_s} e_s =  kappa e_t
        G[..., 0, 1, 0] = -kap         # nabla_{e_s} e_t = -kappa e_s
        return G

    def sectional_at(self, pts):
        pts = np.asarray(pts)
        self.check_chart(pts)
        tau = np.asarray(self.directrix.tau(pts[..., 0]), dtype=pts.dtype)
        return (-tau**2)[..., None]


class ProductWithLine(ManifoldModel):
    """Riemannian product base x R; the extra coordinate is appended last."""

    kind = "product"

    def __init__(self, base):
        if base.dim != 2:
            raise Unsupported("only 2-dimensional bases are supported")
        self.base = base
        self.dim = base.dim + 1

    def check_chart(self, pts):
        self.base.check_chart(np.asarray(pts)[..., :-1])

    def frame_matrix(self, pts):
        pts = np.asarray(pts)
        Fb = self.base.frame_matrix(pts[..., :-1])
        n = pts.shape[:-1]
        F = np.zeros(n + (self.dim, self.dim), dtype=pts.dtype)
        F[..., :-1, :-1] = Fb
        F[..., -1, -1] = 1.0
        return F

    def chart_to_frame(self, pts, vecs):
        pts, vecs = np.asarray(pts), np.asarray(vecs)
        out = np.empty_like(vecs)
        out[..., :-1] = self.base.chart_to_frame(pts[..., :-1], vecs[..., :-1])
        out[..., -1] = vecs[..., -1]
        return out

    def frame_to_chart(self, pts, vecs):
        pts, vecs = np.asarray(pts), np.asarray(vecs)
        out = np.empty_like(vecs)
        out[..., :-1] = self.base.frame_to_chart(pts[..., :-1], vecs[..., :-1])
        out[..., -1] = vecs[..., -1]
        return out

    def gamma(self, pts):
        pts = np.asarray(pts)
        Gb = self.base.gamma(pts[..., :-1])
        n = pts.shape[:-1]
        G = np.zeros(n + (self.dim,) * 3, dtype=pts.dtype)
        G[..., :-1, :-1, :-1] = Gb
        return G

    def sectional_at(self, pts):
        pts = np.asarray(pts)
        Kb = self.base.sectional_at(pts[..., :-1])
        K = np.zeros(pts.shape[:-1] + (3,), dtype=pts.dtype)
        K[..., 0] = Kb[..., 0]         # plane (e1, e2) = base plane
        return K


@dataclass
class CurveSamples:
    """Arc-length-sampled curve in a manifold chart.

    s       : strictly increasing arc-length grid (n,)
    points  : chart coordinates (n, dim)
    manifold: the ambient ManifoldModel
    """

    s: np.ndarray
    points: np.ndarray
    manifold: ManifoldModel
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s = np.asarray(self.s)
        self.points = np.asarray(self.points)
        if self.s.ndim != 1 or self.points.shape != (self.s.size,
                                                     self.manifold.dim):
            raise ValueError("inconsistent curve sample shapes")
        if np.any(np.diff(self.s.astype(float)) <= 0):
            raise ValueError("s must be strictly increasing")

    @property
    def n(self):
        return self.s.size

    def step(self):
        ds = np.diff(self.s.astype(float))
        h = float(ds.mean())
        if np.max(np.abs(ds - h)) > 1e-9 * max(abs(h), 1.0):
            raise ValueError("curve grid is not uniform")
        return h

    def astype(self, dtype):
        return CurveSamples(self.s.astype(dtype), self.points.astype(dtype),
                            self.manifold, dict(self.meta))

    def unit_speed_error(self):
        """Max deviation of the metric speed from 1 at interior samples."""
        from .numerics import deriv_uniform
        vel = deriv_uniform(self.points, self.step())
        speed = self.manifold.norm_g(self.points, vel)
        return float(np.max(np.abs(speed[2:-2] - 1.0)))


def metric_at(m, p):
    return m.metric_at(p)


def frame_at(m, p):
    return m.frame_at(p)


def connection_in_frame(m, p):
    return m.connection_in_frame(p)


def curvature_components(m):
    return m.curvature_components()


def riemann_apply(m, p, X, Y, Z):
    """R(X,Y)Z at a single point, vectors in frame components."""
    p = np.asarray(p, dtype=float)
    m.check_chart(p[None, :])
    return m.riemann_apply_many(p[None, :], np.asarray(X, float)[None, :],
                                np.asarray(Y, float)[None, :],
                                np.asarray(Z, float)[None, :])[0]


def product_extend(curve):
    """Include a base-manifold curve into base x R with last coordinate 0."""
    prod = ProductWithLine(curve.manifold)
    pts = np.concatenate(
        [curve.points, np.zeros((curve.n, 1), dtype=curve.points.dtype)],
        axis=1)
    return CurveSamples(curve.s.copy(), pts, prod, dict(curve.meta))
