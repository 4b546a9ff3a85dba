"""Independent numerical oracles used by the test suite.

These deliberately avoid the code paths they check: finite-difference
Christoffel symbols and curvature straight from the metric, a dense
sign-scan root finder for polynomials, and chart constructions of sphere
circles sampled by arc length.
"""

import math

import numpy as np


def fd_chart_christoffels(m, p, step=1e-5):
    """Central-difference Christoffels Gamma^k_ij of metric_at in the chart."""
    p = np.asarray(p, dtype=float)
    d = p.size
    g0 = m.metric_at(p)
    ginv = np.linalg.inv(g0)
    dg = np.empty((d, d, d))          # dg[c, a, b] = d_c g_ab
    for c in range(d):
        dp = np.zeros(d)
        dp[c] = step
        dg[c] = (m.metric_at(p + dp) - m.metric_at(p - dp)) / (2 * step)
    Gam = np.empty((d, d, d))         # Gam[k, i, j]
    for k in range(d):
        for i in range(d):
            for j in range(d):
                s = 0.0
                for l in range(d):
                    s += ginv[k, l] * (dg[i, l, j] + dg[j, l, i]
                                       - dg[l, i, j])
                Gam[k, i, j] = 0.5 * s
    return Gam


def fd_frame_connection(m, p, step=1e-5):
    """Frame connection coefficients from metric_at and frame_at only.

    nabla_{E_i} E_j = (E_i^a d_a E_j^k + E_i^a E_j^b Gamma^k_ab) d_k,
    re-expressed in the frame.
    """
    p = np.asarray(p, dtype=float)
    d = p.size
    F0 = m.frame_at(p).frame
    Gam = fd_chart_christoffels(m, p, step=step)
    dF = np.empty((d, d, d))          # dF[a, k, j] = d_a (E_j)^k
    for a in range(d):
        dp = np.zeros(d)
        dp[a] = step
        dF[a] = (m.frame_at(p + dp).frame - m.frame_at(p - dp).frame) \
            / (2 * step)
    out = np.empty((d, d, d))         # out[i, j, l]
    Finv = np.linalg.inv(F0)
    for i in range(d):
        for j in range(d):
            vec = np.zeros(d)
            for a in range(d):
                vec += F0[a, i] * dF[a, :, j]
            vec += np.einsum("kab,a,b->k", Gam, F0[:, i], F0[:, j])
            out[i, j] = Finv @ vec
    return out


def fd_riemann_frame(m, p, i, j, k, l, step=1e-4):
    """<R(E_i, E_j) E_k, E_l> by double finite differences of the metric.

    R^h_{kij} = d_i Gam^h_jk - d_j Gam^h_ik + Gam contractions, evaluated on
    coordinate fields and contracted with the frame.
    """
    p = np.asarray(p, dtype=float)
    d = p.size

    def gam(q):
        return fd_chart_christoffels(m, q, step=step)

    dGam = np.empty((d, d, d, d))     # dGam[c, h, a, b] = d_c Gamma^h_ab
    for c in range(d):
        dp = np.zeros(d)
        dp[c] = step
        dGam[c] = (gam(p + dp) - gam(p - dp)) / (2 * step)
    G0 = gam(p)
    F = m.frame_at(p).frame
    g0 = m.metric_at(p)
    Ei, Ej, Ek, El = F[:, i], F[:, j], F[:, k], F[:, l]
    # R(X,Y)Z = [d_i Gam^h_jk - d_j Gam^h_ik + G^h_im G^m_jk - G^h_jm G^m_ik]
    #           X^i Y^j Z^k, coordinate indices
    R = np.einsum("ahbk,a,b,k->h", dGam, Ei, Ej, Ek) \
        - np.einsum("bhak,a,b,k->h", dGam, Ei, Ej, Ek) \
        + np.einsum("ham,mbk,a,b,k->h", G0, G0, Ei, Ej, Ek) \
        - np.einsum("hbm,mak,a,b,k->h", G0, G0, Ei, Ej, Ek)
    return float(R @ g0 @ El)


def sign_scan_roots(coeffs, lo, hi, n_grid=4000, refine_tol=1e-13):
    """All sign-change roots of a polynomial on (lo, hi] by dense scanning."""
    xs = np.linspace(lo, hi, n_grid)
    vals = np.polyval(coeffs, xs)
    roots = []
    for i in range(n_grid - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            if xs[i] > lo:
                roots.append(xs[i])
            continue
        if (a < 0) != (b < 0):
            x0, x1, fa = xs[i], xs[i + 1], a
            while x1 - x0 > refine_tol * max(1.0, abs(x1)):
                mid = 0.5 * (x0 + x1)
                fm = np.polyval(coeffs, mid)
                if (fa < 0) != (fm < 0):
                    x1 = mid
                else:
                    x0, fa = mid, fm
            roots.append(0.5 * (x0 + x1))
    if vals[-1] == 0.0:
        roots.append(xs[-1])
    return sorted(roots)


def sphere_circle_chart(rho, kappa_g, n, psi=0.0):
    """Arc-length samples of a kappa_g circle on S^2(rho), conformal chart.

    psi rotates the sphere about the x-axis, decentering the chart image
    while keeping the samples uniformly spaced along the curve.
    """
    sr = math.sqrt(rho)
    theta = math.atan2(sr, kappa_g)           # cot(theta) sr ... polar angle
    rc = (2.0 / sr) * math.tan(theta / 2.0)
    ang = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    x, y = rc * np.cos(ang), rc * np.sin(ang)
    if psi == 0.0:
        return np.stack([x, y], axis=1)
    # chart -> unit sphere -> rotate -> chart (exact isometry)
    u, v = sr * x / 2.0, sr * y / 2.0
    den = 1.0 + u * u + v * v
    X = np.stack([2 * u / den, 2 * v / den, (2.0 - den) / den], axis=1)
    c, s = math.cos(psi), math.sin(psi)
    R = np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]])
    Xr = X @ R.T
    return np.stack([2.0 * Xr[:, 0] / (sr * (1 + Xr[:, 2])),
                     2.0 * Xr[:, 1] / (sr * (1 + Xr[:, 2]))], axis=1)


def circle_length(rho, kappa_g):
    return 2.0 * math.pi / math.sqrt(rho + kappa_g**2)


def unit_speed_bcv_curve(m, path_fn, t_span, n, fine=4001):
    """Reparametrize a chart path to unit metric speed by arc length.

    path_fn: t -> (d,) chart point, smooth.  Returns (s_grid, points) with a
    uniform arc-length grid.
    """
    from scipy.interpolate import make_interp_spline

    t = np.linspace(t_span[0], t_span[1], fine)
    pts = np.array([path_fn(tt) for tt in t])
    dt = t[1] - t[0]
    vel = np.gradient(pts, dt, axis=0, edge_order=2)
    speed = m.norm_g(pts, vel)
    s_cum = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1])
                                             * dt)])
    total = s_cum[-1]
    spl = make_interp_spline(s_cum, pts, k=5)
    s = np.linspace(0.0, total, n)
    return s, spl(s)
