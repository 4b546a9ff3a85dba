"""Shared low-level numerics: finite differences, orthonormalization, RK4."""

import numpy as np

# 5-point, 4th-order first-derivative stencils on a uniform grid.
# Rows: offsets used at the two left edge points; interior; two right edge points.
_FWD0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0   # offsets 0..4
_FWD1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0     # offsets -1..3
_CEN = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0         # offsets -2..2


def deriv_uniform(y, h, axis=0):
    """4th-order first derivative of samples on a uniform grid.

    Interior points use the 5-point central stencil; the two points at each
    end use one-sided 5-point stencils of the same order.  Preserves dtype,
    so extended-precision inputs stay extended precision.
    """
    y = np.asarray(y)
    if y.shape[axis] < 5:
        raise ValueError("need at least 5 samples for 4th-order stencils")
    y = np.moveaxis(y, axis, 0)
    n = y.shape[0]
    out = np.empty_like(y)
    c = _CEN.astype(y.dtype)
    out[2:n - 2] = (c[0] * y[0:n - 4] + c[1] * y[1:n - 3] + c[3] * y[3:n - 1]
                    + c[4] * y[4:n])
    f0 = _FWD0.astype(y.dtype)
    f1 = _FWD1.astype(y.dtype)
    out[0] = sum(f0[k] * y[k] for k in range(5))
    out[1] = sum(f1[k] * y[k - 1 + 1] for k in range(5))  # offsets -1..3 at i=1
    out[-1] = -sum(f0[k] * y[n - 1 - k] for k in range(5))
    out[-2] = -sum(f1[k] * y[n - 2 + 1 - k] for k in range(5))
    out = out / np.asarray(h, dtype=y.dtype)
    return np.moveaxis(out, 0, axis)


def gram_schmidt(vectors):
    """Orthonormalize row vectors with modified Gram-Schmidt.

    vectors: (k, d) array, rows assumed linearly independent.
    """
    v = np.array(vectors, copy=True)
    k = v.shape[0]
    for i in range(k):
        for j in range(i):
            v[i] -= (v[i] @ v[j]) * v[j]
        nrm = np.sqrt(v[i] @ v[i])
        if nrm == 0.0:
            raise ValueError("degenerate frame in Gram-Schmidt")
        v[i] /= nrm
    return v


def rk4_step(f, t, y, h):
    """One classical Runge-Kutta step for y' = f(t, y)."""
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def uniform_grid(s0, s1, step):
    """Uniform grid covering [s0, s1] with spacing as close to step as possible."""
    if not s1 > s0:
        raise ValueError("empty interval")
    if not step > 0:
        raise ValueError("step must be positive")
    n = max(int(round((s1 - s0) / step)), 4) + 1
    return np.linspace(s0, s1, n)


def power_law_fit(x, y):
    """Least-squares exponent fit y ~ C x^p; returns (p, R^2)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(((ly - pred) ** 2).sum())
    ss_tot = float(((ly - ly.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2
