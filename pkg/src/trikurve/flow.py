"""Discrete trienergy and gradient descent over polylines.

The energy of a polyline (x_0 .. x_{N-1}) with parameter step h is the
composite-midpoint value of (1/2) |nabla_T^2 T|_g^2 built from order-2
covariant difference operators, plus a speed penalty w * sum (|seg|_g - h)^2
that keeps vertices uniformly spaced at h.  The step h is part of the flow
state and is refreshed only at re-spacing events, so each descent leg
minimizes one fixed functional; analytic triharmonic curves sampled at
uniform spacing are then discrete critical points up to O(h^2).

Energies and exact gradients are evaluated with jax (float64); finite
difference gradients of the same scalar are provided for verification.

A note on what descent can find: the nontrivial critical circles on spheres
are saddle points of this energy.  Along the circle-radius family the energy
profile is sin^2(theta) cos^4(theta) (polar radius theta), with its interior
critical point a maximum, so descent started at a nearby circle flows toward
the equator (or collapses), never into the saddle; this mirrors the classical
instability of closed geodesics under the harmonic energy.  run_flow is
therefore a descent and criticality-verification tool; locating saddle-type
critical points requires a different objective (e.g. squared gradient norm),
which trades away the energy-monotonicity guarantee.
"""

from dataclasses import dataclass, field

import numpy as np

import jax

jax.config.update("jax_enable_x64", True)

import jax.numpy as jnp  # noqa: E402

from .errors import NonUniform, TooFewVertices, Unsupported
from .geometry import BCV, SpaceForm2, SpaceForm3

_MIN_VERTICES = 9


def _metric_builder(m):
    """jax-traceable chart metric g(p) for the supported manifolds."""
    if isinstance(m, (SpaceForm2, SpaceForm3)):
        rho, dim = m.rho, m.dim

        def gfn(p):
            lam = 1.0 + 0.25 * rho * jnp.sum(p * p)
            return jnp.eye(dim) / lam**2

        return gfn, dim
    if isinstance(m, BCV):
        a, b = m.a, m.b

        def gfn(p):
            x, y = p[0], p[1]
            lam = 1.0 + a * (x * x + y * y)
            u = 0.5 * b * y / lam
            v = -0.5 * b * x / lam
            il2 = 1.0 / lam**2
            return jnp.array([[il2 + u * u, u * v, u],
                              [u * v, il2 + v * v, v],
                              [u, v, 1.0]])

        return gfn, 3
    raise Unsupported(f"flow energy not implemented for {m.kind}")


def _christoffel_builder(gfn):
    dg_fn = jax.jacfwd(gfn)

    def gamma(p):
        g = gfn(p)
        ginv = jnp.linalg.inv(g)
        dg = dg_fn(p)                      # dg[a, b, c] = d_c g_{ab}
        # Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij})
        term = (jnp.swapaxes(dg, 1, 2)     # [l,i,j] = d_i g_{lj}
                + dg                       # [l,i,j] = d_j g_{li}
                - jnp.moveaxis(dg, 2, 0))  # [l,i,j] = d_l g_{ij}
        return 0.5 * jnp.einsum("kl,lij->kij", ginv, term)

    return gamma


class _EnergyKernel:
    """Compiled energy/gradient for one (manifold, N, closed) signature."""

    def __init__(self, m, n, closed):
        gfn, dim = _metric_builder(m)
        gamma = _christoffel_builder(gfn)
        self.dim = dim
        self.n = n
        self.closed = closed

        if closed:
            interior = jnp.ones(n, dtype=bool)
        else:
            interior = jnp.zeros(n, dtype=bool).at[3:n - 3].set(True)

        def pieces(x, h, w):
            xp = jnp.roll(x, -1, axis=0)
            xm = jnp.roll(x, 1, axis=0)
            T = (xp - xm) / (2.0 * h)
            Gam = jax.vmap(gamma)(x)

            def covd(V):
                dV = (jnp.roll(V, -1, axis=0) - jnp.roll(V, 1, axis=0)) \
                    / (2.0 * h)
                return dV + jnp.einsum("nkij,ni,nj->nk", Gam, T, V)

            W = covd(covd(T))
            gmat = jax.vmap(gfn)(x)
            dens = jnp.einsum("ni,nij,nj->n", W, gmat, W)
            energy = 0.5 * h * jnp.sum(jnp.where(interior, dens, 0.0))

            seg = xp - x
            mid = 0.5 * (x + xp)
            gm = jax.vmap(gfn)(mid)
            ell2 = jnp.einsum("ni,nij,nj->n", seg, gm, seg)
            ell = jnp.sqrt(jnp.maximum(ell2, 1e-300))
            if closed:
                pen = w * jnp.sum((ell - h) ** 2)
            else:
                pen = w * jnp.sum((ell[:n - 1] - h) ** 2)
            return energy, pen

        def total(x, h, w):
            e, p = pieces(x, h, w)
            return e + p

        if closed:
            clamp = None
        else:
            clamp = jnp.zeros((n, dim)).at[2:n - 2].set(1.0)

        def grad(x, h, w):
            g = jax.grad(total)(x, h, w)
            if clamp is not None:
                g = g * clamp
            return g

        self.pieces = jax.jit(pieces)
        self.total = jax.jit(total)
        self.grad = jax.jit(grad)
        self.seg_lengths = jax.jit(
            lambda x: jnp.sqrt(jnp.einsum(
                "ni,nij,nj->n", jnp.roll(x, -1, 0) - x,
                jax.vmap(gfn)(0.5 * (x + jnp.roll(x, -1, 0))),
                jnp.roll(x, -1, 0) - x)))


_KERNILE_CACHE = {}


def _kernel(m, n, closed):
    if isinstance(m, BCV):
        key = ("bcv", m.a, m.b, n, closed)
    else:
        key = (m.kind, m.rho, n, closed)
    if key not in _KERNILE_CACHE:
        _KERNILE_CACHE[key] = _EnergyKernel(m, n, closed)
    return _KERNILE_CACHE[key]


@dataclass
class FlowState:
    """Discrete curve state of the trienergy descent."""

    points: np.ndarray
    manifold: object
    closed: bool = True
    h_param: float = None
    speed_penalty_weight: float = None
    step_size: float = 1e-3
    iteration: int = 0
    energy: float = None
    penalty: float = None
    grad_norm: float = None
    flag: str = ""
    history: list = field(default_factory=list)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        n = self.points.shape[0]
        if n < _MIN_VERTICES:
            raise TooFewVertices(f"need >= {_MIN_VERTICES} vertices, got {n}")
        k = _kernel(self.manifold, n, self.closed)
        ell = np.asarray(k.seg_lengths(self.points))
        if not self.closed:
            ell = ell[:-1]
        if float(ell.max() / ell.min()) > 1.5:
            raise NonUniform(
                f"segment ratio {ell.max() / ell.min():.3f} exceeds 1.5")
        if self.h_param is None:
            self.h_param = float(ell.mean())
        if self.speed_penalty_weight is None:
            e0, _ = discrete_trienergy(self.points, self.manifold,
                                       closed=self.closed, h=self.h_param,
                                       weight=0.0)
            length = float(ell.sum())
            self.speed_penalty_weight = 10.0 * max(e0, 1e-12) / length

    @property
    def n(self):
        return self.points.shape[0]


def discrete_trienergy(points, manifold, closed=True, h=None, weight=0.0):
    """Discrete trienergy and speed penalty of a polyline.

    Returns (energy, penalty); the energy excludes the penalty, matching the
    invariant energy = 0 iff the discrete second covariant derivative
    vanishes at all interior vertices.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if n < _MIN_VERTICES:
        raise TooFewVertices(f"need >= {_MIN_VERTICES} vertices, got {n}")
    k = _kernel(manifold, n, closed)
    ell = np.asarray(k.seg_lengths(points))
    if not closed:
        ell = ell[:-1]
    if float(ell.max() / ell.min()) > 1.5:
        raise NonUniform("segment ratio exceeds 1.5")
    if h is None:
        h = float(ell.mean())
    e, p = k.pieces(jnp.asarray(points), h, weight)
    return float(e), float(p)


def trienergy_gradient(points, manifold, closed=True, h=None, weight=0.0):
    """Exact (reverse-mode) gradient of energy + penalty wrt vertex coords."""
    points = np.asarray(points, dtype=float)
    k = _kernel(manifold, points.shape[0], closed)
    if h is None:
        ell = np.asarray(k.seg_lengths(points))
        if not closed:
            ell = ell[:-1]
        h = float(ell.mean())
    return np.asarray(k.grad(jnp.asarray(points), h, weight))


def trienergy_gradient_fd(points, manifold, closed=True, h=None, weight=0.0,
                          fd_step=None):
    """Forward-difference gradient of the same scalar, for verification."""
    points = np.asarray(points, dtype=float)
    k = _kernel(manifold, points.shape[0], closed)
    if h is None:
        ell = np.asarray(k.seg_lengths(points))
        if not closed:
            ell = ell[:-1]
        h = float(ell.mean())
    scale = max(float(np.max(np.abs(points))), 1.0)
    eps = (1e-7 * scale) if fd_step is None else fd_step
    base = float(k.total(jnp.asarray(points), h, weight))
    g = np.zeros_like(points)
    n, d = points.shape
    lo = 0 if closed else 2
    hi = n if closed else n - 2
    for i in range(lo, hi):
        for j in range(d):
            pp = points.copy()
            pp[i, j] += eps
            g[i, j] = (float(k.total(jnp.asarray(pp), h, weight)) - base) / eps
    return g


def grad_norm_density(g, h):
    """Mesh-independent gradient norm: l2 of the vertexwise density."""
    g = np.asarray(g)
    return float(np.sqrt((g**2).sum() / h))


def _np_energy_conformal(points, rho, dim, closed, h, weight):
    """dtype-generic twin of the jax energy for conformal space-form charts.

    Same order-2 operators and chart Christoffels as the compiled kernel;
    useful in extended precision, where the fp noise floor of the stiff
    discrete Hessian would otherwise swamp small gradients.
    """
    x = np.asarray(points)
    n = x.shape[0]
    xp = np.roll(x, -1, axis=0)
    xm = np.roll(x, 1, axis=0)
    T = (xp - xm) / (2.0 * h)
    lam = 1.0 + 0.25 * rho * (x * x).sum(axis=1)
    dlam = 0.5 * rho * x                       # coordinate gradient of lam
    # conformal chart: Gamma^k_ij = -(d_i lam dkj + d_j lam dki - d_k lam dij)/lam
    def gamma_apply(V, W):
        VW = (V * W).sum(axis=1)
        dV = (dlam * V).sum(axis=1)
        dW = (dlam * W).sum(axis=1)
        return -(dV[:, None] * W + dW[:, None] * V - VW[:, None] * dlam) \
            / lam[:, None]

    def covd(V):
        dV = (np.roll(V, -1, axis=0) - np.roll(V, 1, axis=0)) / (2.0 * h)
        return dV + gamma_apply(T, V)

    W = covd(covd(T))
    dens = (W * W).sum(axis=1) / lam**2
    if closed:
        energy = 0.5 * h * dens.sum()
    else:
        energy = 0.5 * h * dens[3:n - 3].sum()
    seg = xp - x
    mid = 0.5 * (x + xp)
    lam_m = 1.0 + 0.25 * rho * (mid * mid).sum(axis=1)
    ell = np.sqrt((seg * seg).sum(axis=1)) / lam_m
    if not closed:
        ell = ell[:n - 1]
    return energy + weight * ((ell - h) ** 2).sum()


def trienergy_gradient_highprec(points, manifold, closed=True, h=None,
                                weight=0.0, dtype=np.longdouble):
    """Central-difference gradient of the extended-precision twin energy."""
    if not isinstance(manifold, (SpaceForm2, SpaceForm3)):
        raise Unsupported("high-precision twin covers space forms only")
    x = np.asarray(points, dtype=dtype)
    if h is None:
        k = _kernel(manifold, x.shape[0], closed)
        ell = np.asarray(k.seg_lengths(np.asarray(points, dtype=float)))
        if not closed:
            ell = ell[:-1]
        h = float(ell.mean())
    h = dtype(h)
    w = dtype(weight)
    rho = dtype(manifold.rho)
    eps = np.sqrt(np.finfo(dtype).eps) * max(1.0, float(np.max(np.abs(x))))
    g = np.zeros_like(x)
    n, d = x.shape
    lo = 0 if closed else 2
    hi = n if closed else n - 2
    for i in range(lo, hi):
        for j in range(d):
            xp_ = x.copy()
            xm_ = x.copy()
            xp_[i, j] += eps
            xm_[i, j] -= eps
            ep = _np_energy_conformal(xp_, rho, manifold.dim, closed, h, w)
            em = _np_energy_conformal(xm_, rho, manifold.dim, closed, h, w)
            g[i, j] = (ep - em) / (2.0 * eps)
    return g


def respace(points, manifold, closed=True):
    """Resample the polyline to uniform metric arc length (chart-linear)."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    k = _kernel(manifold, n, closed)
    ell = np.asarray(k.seg_lengths(points))
    if closed:
        poly = np.vstack([points, points[:1]])
        cum = np.concatenate([[0.0], np.cumsum(ell)])
        targets = np.linspace(0.0, cum[-1], n, endpoint=False)
    else:
        poly = points
        cum = np.concatenate([[0.0], np.cumsum(ell[:-1])])
        targets = np.linspace(0.0, cum[-1], n)
    out = np.empty_like(points)
    for j in range(points.shape[1]):
        out[:, j] = np.interp(targets, cum, poly[:, j])
    if not closed:
        out[0], out[-1] = points[0], points[-1]
    return out


def run_flow(state, max_iters=10000, grad_tol=1e-8, respace_every=50,
             step_growth=2.0, min_step=1e-16, log_every=1):
    """Gradient descent with backtracking on the penalized trienergy.

    Accepted steps strictly decrease the objective; the parameter step
    h_param (hence the functional) is refreshed only at re-spacing events,
    every ``respace_every`` iterations.  Terminates when the density gradient
    norm drops below grad_tol or after max_iters.  A line-search underflow
    sets state.flag = "line_search_failed" and returns the best state.
    """
    m = state.manifold
    k = _kernel(m, state.n, state.closed)
    w = state.speed_penalty_weight
    x = jnp.asarray(state.points)
    h = state.h_param
    e, p = (float(v) for v in k.pieces(x, h, w))
    total = e + p
    step = state.step_size
    it = state.iteration

    for it in range(state.iteration, state.iteration + max_iters):
        if it > state.iteration and respace_every and \
                it % respace_every == 0:
            x_np = respace(np.asarray(x), m, closed=state.closed)
            ell = np.asarray(k.seg_lengths(x_np))
            if not state.closed:
                ell = ell[:-1]
            h = float(ell.mean())
            x = jnp.asarray(x_np)
            e, p = (float(v) for v in k.pieces(x, h, w))
            total = e + p

        g = k.grad(x, h, w)
        gnorm = grad_norm_density(np.asarray(g), h)
        if log_every and it % log_every == 0:
            state.history.append((it, e, gnorm, step))
        if gnorm < grad_tol:
            state.flag = "converged"
            break

        accepted = False
        while step >= min_step:
            x_new = x - step * g
            e_new, p_new = (float(v) for v in k.pieces(x_new, h, w))
            if e_new + p_new < total:
                x = x_new
                e, p, total = e_new, p_new, e_new + p_new
                step = min(step * step_growth, 1e6)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            state.flag = "line_search_failed"
            break
    else:
        state.flag = state.flag or "max_iters"

    state.points = np.asarray(x)
    state.h_param = h
    state.energy = e
    state.penalty = p
    state.grad_norm = grad_norm_density(np.asarray(k.grad(x, h, w)), h)
    state.step_size = step
    state.iteration = it
    return state


def measured_kappa(state):
    """Mean discrete geodesic curvature magnitude of the current polyline."""
    x = jnp.asarray(state.points)
    m = state.manifold
    k = _kernel(m, state.n, state.closed)
    h = state.h_param
    gfn, _ = _metric_builder(m)
    gamma = _christoffel_builder(gfn)
    xp = jnp.roll(x, -1, 0)
    xm = jnp.roll(x, 1, 0)
    T = (xp - xm) / (2.0 * h)
    Gam = jax.vmap(gamma)(x)
    U = (jnp.roll(T, -1, 0) - jnp.roll(T, 1, 0)) / (2.0 * h) \
        + jnp.einsum("nkij,ni,nj->nk", Gam, T, T)
    gmat = jax.vmap(gfn)(x)
    kap = np.asarray(jnp.sqrt(jnp.einsum("ni,nij,nj->n", U, gmat, U)))
    if not state.closed:
        kap = kap[3:-3]
    return float(np.mean(kap))
