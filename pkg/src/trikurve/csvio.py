"""CSV and JSON serialization for curves, frames, reports and manifolds.

Floats are written with repr (shortest round-trip, >= 15 significant
digits); files are UTF-8 with LF line endings; JSON objects are written with
sorted keys so identical inputs produce byte-identical artifacts.
"""

import json
import os

import numpy as np

from .geometry import (
    BCV,
    CurveSamples,
    ProductWithLine,
    RuledSurfaceR3,
    SpaceForm2,
    SpaceForm3,
)
from .profiles import ConstantPair, Tabulated, TheoremExistence


def _fmt(x):
    return repr(float(x))


def _ensure_dir(path):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)


def _write_rows(path, header, rows):
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def write_curve_csv(path, curve):
    """Curve CSV: header s,x,y,z (3-d) or s,u,v (surfaces)."""
    dim = curve.manifold.dim
    header = ["s", "x", "y", "z"] if dim == 3 else ["s", "u", "v"]
    rows = np.column_stack([np.asarray(curve.s, float),
                            np.asarray(curve.points, float)])
    _write_rows(path, header[:dim + 1], rows)


def read_curve_csv(path, manifold):
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=float)
    if data.ndim == 1:
        data = data[None, :]
    return CurveSamples(data[:, 0], data[:, 1:manifold.dim + 1], manifold)


def write_frenet_csv(path, apparatus):
    """Frenet CSV (always the 3-d schema; surface data is zero-padded)."""
    header = ["s", "kappa", "tau", "Tx", "Ty", "Tz", "Nx", "Ny", "Nz",
              "Bx", "By", "Bz"]
    tau = apparatus.tau if apparatus.tau is not None \
        else np.zeros_like(apparatus.kappa)

    def pad(V):
        if V is None:
            return np.zeros((apparatus.s.size, 3))
        V = np.asarray(V, dtype=float)
        if V.shape[1] == 3:
            return V
        return np.column_stack([V, np.zeros(V.shape[0])])

    rows = np.column_stack([apparatus.s, apparatus.kappa, tau,
                            pad(apparatus.T), pad(apparatus.N),
                            pad(apparatus.B)])
    _write_rows(path, header, rows)


def write_report_csv(path, report):
    header = ["s", "res_T", "res_N", "res_B", "res_norm"]
    rows = np.column_stack([report.s, report.frame_components,
                            report.residual_norm])
    _write_rows(path, header, rows)


def write_flow_log_csv(path, history):
    """Flow log: iter,energy,grad_norm,step (energy = descended objective)."""
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("iter,energy,grad_norm,step\n")
        for row in history:
            it, e, g, st = row[:4]
            f.write(f"{int(it)},{_fmt(e)},{_fmt(g)},{_fmt(st)}\n")


def write_json(path, obj):
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def profile_to_json(profile):
    if isinstance(profile, TheoremExistence):
        return {"kind": "theorem-existence", "c1": profile.c1,
                "c2": profile.c2}
    if isinstance(profile, ConstantPair):
        return {"kind": "constant", "kappa0": profile.kappa0,
                "tau0": profile.tau0}
    if isinstance(profile, Tabulated):
        raise ValueError("tabulated profiles serialize by file path")
    raise ValueError(f"unknown profile {profile!r}")


def profile_from_json(obj):
    kind = obj["kind"]
    if kind == "theorem-existence":
        return TheoremExistence(c1=obj.get("c1", 0.0), c2=obj.get("c2", 0.0))
    if kind == "constant":
        return ConstantPair(obj["kappa0"], obj.get("tau0", 0.0))
    if kind == "tabulated":
        data = np.loadtxt(obj["path"], delimiter=",", skiprows=1)
        tau = data[:, 2] if data.shape[1] > 2 else None
        return Tabulated(data[:, 0], data[:, 1], tau)
    raise ValueError(f"unknown profile kind {kind!r}")


def manifold_to_json(m):
    if isinstance(m, BCV):
        return {"kind": "bcv", "a": m.a, "b": m.b}
    if isinstance(m, (SpaceForm2, SpaceForm3)):
        return {"kind": "spaceform", "dim": m.dim, "rho": m.rho}
    if isinstance(m, RuledSurfaceR3):
        return {"kind": "ruled", "profile": profile_to_json(m.directrix)}
    if isinstance(m, ProductWithLine):
        return {"kind": "product", "base": manifold_to_json(m.base)}
    raise ValueError(f"unknown manifold {m!r}")


def manifold_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj["kind"]
    if kind == "bcv":
        return BCV(obj["a"], obj["b"])
    if kind == "spaceform":
        dim = int(obj.get("dim", 3))
        if dim == 2:
            return SpaceForm2(obj["rho"])
        if dim == 3:
            return SpaceForm3(obj["rho"])
        raise ValueError("spaceform dim must be 2 or 3")
    if kind == "ruled":
        return RuledSurfaceR3(profile_from_json(obj["profile"]))
    if kind == "product":
        return ProductWithLine(manifold_from_json(obj["base"]))
    raise ValueError(f"unknown manifold kind {kind!r}")
