"""Command-line interface: classify | roots | parametrize | reconstruct |
verify | flow | sweep.

Option precedence: explicit flags > TRIKURVE_* environment variables >
config file (flat ``key = value`` lines) > built-in defaults.  Exit codes:
0 ok, 1 verification failure, 2 usage, 3 space-form degenerate parameters,
4 numerical failure (blow-up, line-search stall, bad radicands).
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import csvio
from .classifier import classify_bcv, classify_spaceform, classify_surface, \
    p4_roots
from .errors import SpaceFormDegenerate, TrikurveError
from .flow import FlowState, run_flow, measured_kappa
from .frenet import measure_frenet, reconstruct_r3
from .geometry import CurveSamples, SpaceForm2, SpaceForm3, RuledSurfaceR3
from .parametrize import (
    HelixParam,
    parametrize_heisenberg,
    parametrize_type_i,
    parametrize_type_ii,
    parametrize_type_iii,
    type_i_constants,
    beta_ode_residual,
)
from .profiles import ConstantPair, TheoremExistence
from .surface_ode import surface_residuals
from .tension import tension_r

_DEFAULTS = {
    "tol": 1e-6,
    "stride": 1,
    "step": 1e-3,
    "seed": 0,
    "out": ".",
    "grad_tol": 1e-8,
    "max_iters": 10000,
}


def _load_config(path):
    cfg = {}
    if not path:
        return cfg
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, val = line.split("=", 1)
            cfg[key.strip()] = val.strip()
    return cfg


def _resolve(args, key, cast=float):
    """flags > environment > config file > defaults."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    env = os.environ.get("TRIKURVE_" + key.upper())
    if env is not None:
        return cast(env)
    cfg = getattr(args, "_cfg", {})
    if key in cfg:
        return cast(cfg[key])
    return _DEFAULTS.get(key)


def _print_solutions(sols, json_path=None):
    cols = f"{'class':<16}{'kappa0':>12}{'tau0':>12}{'admissible':>12}  reason"
    print(cols)
    for s in sols:
        print(f"{s.class_tag:<16}{s.kappa0:>12.6g}{s.tau0:>12.6g}"
              f"{str(s.admissible):>12}  {s.reason}"
              + (f"  [{s.note}]" if s.note else ""))
    if json_path:
        csvio.write_json(json_path, [s.as_dict() for s in sols])


def cmd_classify(args):
    if args.target == "surface":
        sols = classify_surface(args.ks)
    elif args.target == "spaceform":
        sols = classify_spaceform(args.rho, args.tau0 or 0.0)
    elif args.target == "bcv":
        sols = classify_bcv(args.a, args.b, alpha0=args.alpha0, B3=args.b3)
        if args.b == 0.0 and args.a < 0.0:
            proper = [s for s in sols if s.admissible
                      and s.class_tag != "Geodesic"]
            if not proper:
                print("note: H^2 x R admits no proper constant-curvature "
                      "solutions")
    else:
        raise ValueError(f"unknown classify target {args.target}")
    _print_solutions(sols, args.json)
    return 0


def cmd_roots(args):
    form = args.form or "corrected"
    roots = p4_roots(args.a, args.b, args.alpha0, return_multiplicity=True,
                     form=form)
    print(f"{'zeta':>18} {'multiplicity':>13}   [{form} quartic]")
    for z, mlt in roots:
        print(f"{z:>18.12g} {mlt:>13d}")
    if not roots:
        print("(no positive roots)")
    if args.json:
        csvio.write_json(args.json, [{"zeta": z, "multiplicity": mlt,
                                      "form": form} for z, mlt in roots])
    return 0


def _pick_zeta(args):
    if args.zeta is not None:
        return args.zeta
    roots = p4_roots(args.a if hasattr(args, "a") and args.a is not None
                     else 0.0, args.b, args.alpha0)
    if not roots:
        raise TrikurveError("the quartic has no positive root here; "
                            "pass --zeta explicitly")
    return roots[-1]


def cmd_parametrize(args):
    step = _resolve(args, "step")
    s_span = (args.s0 or 0.0, args.s1)
    if args.family == "heisenberg":
        args.a = 0.0
        zeta = _pick_zeta(args)
        curve = parametrize_heisenberg(args.b, args.alpha0, zeta,
                                       lam=args.lam or 0.0,
                                       s_span=s_span, step=step)
    else:
        zeta = _pick_zeta(args)
        p = HelixParam(type_tag=args.family, a=args.a, b=args.b,
                       alpha0=args.alpha0, zeta=zeta, s_span=s_span,
                       step=step, beta0=args.beta0,
                       x0_sign=-1 if (args.branch or "-") == "-" else 1,
                       c1=args.c1 or 0.0, c2=args.c2 or 0.0,
                       beta_init=args.beta_init or 0.0)
        if args.family == "type-i":
            mu, c1, c2 = type_i_constants(args.a, args.b, args.alpha0, zeta,
                                          mu=args.mu,
                                          phase=args.phase or 0.0)
            p.mu, p.c1, p.c2 = mu, c1, c2
            curve = parametrize_type_i(p)
        elif args.family == "type-ii":
            if p.beta0 is None:
                p.beta0 = math.pi / 4.0
            curve = parametrize_type_ii(p)
        elif args.family == "type-iii":
            curve = parametrize_type_iii(p)
        else:
            raise ValueError(f"unknown family {args.family}")

    out = _resolve(args, "out", str)
    base = os.path.join(out, f"{args.family}")
    csvio.write_curve_csv(base + ".csv", curve)
    app = measure_frenet(curve, stride=max(1, int(0.003 / step)))
    ok = app.defined
    sidecar = {
        "param": curve.meta["param"],
        "unit_speed_error": curve.meta.get("unit_speed_error"),
        "measured_kappa_mean": float(np.mean(app.kappa[ok])),
        "measured_tau_mean": float(np.nanmean(app.tau[ok])),
        "truncated": bool(curve.meta.get("truncated", False)),
    }
    if "beta" in curve.meta:
        res = beta_ode_residual(curve, curve.meta["beta"],
                                curve.meta["param"].get("a", 0.0), args.b,
                                args.alpha0, zeta)
        sidecar["beta_residual_max"] = float(np.max(np.abs(res[3:-3])))
    csvio.write_json(base + ".json", sidecar)
    print(f"wrote {base}.csv and {base}.json")
    return 0


def _profile_from_args(args):
    name = args.profile
    if name == "theorem-existence":
        return TheoremExistence(c1=args.c1 or 0.0, c2=args.c2 or 0.0)
    if name == "constant":
        return ConstantPair(args.kappa0, args.tau0 or 0.0)
    if name.startswith("tabulated:"):
        return csvio.profile_from_json({"kind": "tabulated",
                                        "path": name.split(":", 1)[1]})
    raise ValueError(f"unknown profile preset {name!r}")


def cmd_reconstruct(args):
    profile = _profile_from_args(args)
    step = _resolve(args, "step")
    curve, app = reconstruct_r3(profile, args.s0, args.s1, step)
    csvio.write_curve_csv(args.out, curve)
    if args.frenet_out:
        csvio.write_frenet_csv(args.frenet_out, app)
    print(f"wrote {args.out} ({curve.n} samples)")
    return 0


def cmd_verify(args):
    tol = _resolve(args, "tol")
    stride = int(_resolve(args, "stride", int))
    if args.surface == "ruled":
        profile = _profile_from_args(args)
        manifold = RuledSurfaceR3(profile)
        curve = csvio.read_curve_csv(args.curve, SpaceForm3(0.0))
        app = measure_frenet(curve, stride=stride)
        sl = slice(6, -6)
        ok = app.defined[sl]
        kap_ref = np.asarray(profile.kappa(app.s[sl]))
        tau_ref = np.asarray(profile.tau(app.s[sl]))
        rel_k = np.abs(app.kappa[sl][ok] - kap_ref[ok]) / np.abs(kap_ref[ok])
        rel_t = np.abs(app.tau[sl][ok] - tau_ref[ok]) / \
            np.maximum(np.abs(tau_ref[ok]), 1e-30)
        max_rel = float(max(np.max(rel_k), np.max(rel_t)))
        ss = np.linspace(curve.s[0], curve.s[-1], 101)
        derivs = profile.derivatives(ss, upto=4)
        res1, res2 = surface_residuals(derivs, -np.asarray(
            profile.tau(ss))**2)
        summary = {
            "max_rel_kappa": float(np.max(rel_k)),
            "max_rel_tau": float(np.max(rel_t)),
            "surface_res1_max": float(np.max(np.abs(res1))),
            "surface_res2_max": float(np.max(np.abs(res2))),
            "tol": tol,
            "passed": max_rel <= tol,
        }
        _ = manifold
    else:
        m = csvio.manifold_from_json(json.loads(args.manifold))
        curve = csvio.read_curve_csv(args.curve, m)
        report = tension_r(curve, args.order or 3, stride=stride)
        max_rel = report.max_rel(interior=12)
        summary = {"max_rel_residual": max_rel,
                   "mean_rel_residual": float(
                       np.mean(report.rel_residual[12:-12])),
                   "order": args.order or 3,
                   "tol": tol, "passed": max_rel <= tol}
        if args.report_csv:
            csvio.write_report_csv(args.report_csv, report)
    if args.report:
        csvio.write_json(args.report, summary)
    print(json.dumps(summary, sort_keys=True))
    return 0 if summary["passed"] else 1


def cmd_flow(args):
    rho = args.rho if args.rho is not None else 1.0
    m = SpaceForm2(rho)
    n = args.vertices or 200
    kap = args.kappa0 if args.kappa0 is not None else 1.2
    sr = math.sqrt(rho)
    theta = math.atan2(sr, kap)
    rc = (2.0 / sr) * math.tan(theta / 2.0)
    ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    pts = np.stack([rc * np.cos(ang), rc * np.sin(ang)], axis=1)
    state = FlowState(points=pts, manifold=m, closed=True)
    max_iters = int(_resolve(args, "max_iters", int))
    grad_tol = _resolve(args, "grad_tol")
    out = _resolve(args, "out", str)
    ckpt = args.checkpoint_every
    done = 0
    while done < max_iters:
        chunk = min(ckpt or max_iters, max_iters - done)
        state = run_flow(state, max_iters=chunk, grad_tol=grad_tol)
        done += chunk
        if ckpt:
            s = np.arange(n, dtype=float) * state.h_param
            cur = CurveSamples(s, state.points, m)
            csvio.write_curve_csv(
                os.path.join(out, f"flow_{state.iteration + 1:06d}.csv"), cur)
        if state.flag in ("converged", "line_search_failed"):
            break
    csvio.write_flow_log_csv(os.path.join(out, "flow_log.csv"),
                             state.history)
    s = np.arange(n, dtype=float) * state.h_param
    csvio.write_curve_csv(os.path.join(out, "flow_final.csv"),
                          CurveSamples(s, state.points, m))
    kap_m = measured_kappa(state)
    print(json.dumps({"flag": state.flag, "iterations": state.iteration,
                      "energy": state.energy, "grad_norm": state.grad_norm,
                      "measured_kappa": kap_m}, sort_keys=True))
    return 4 if state.flag == "line_search_failed" else 0


def cmd_sweep(args):
    out = _resolve(args, "out", str)
    seed = int(_resolve(args, "seed", int))
    rows = []
    if args.grid == "roots":
        if args.random:
            rng = np.random.default_rng(seed)
            cells = [(rng.uniform(-2, 2), rng.uniform(-3, 3),
                      rng.uniform(0.1, math.pi - 0.1))
                     for _ in range(args.random)]
        else:
            avals = np.linspace(args.a_min, args.a_max, args.a_steps)
            bvals = np.linspace(args.b_min, args.b_max, args.b_steps)
            cells = [(a, b, args.alpha0) for a in avals for b in bvals]
        for a, b, al in cells:
            if 4.0 * a == b * b:
                continue
            roots = p4_roots(a, b, al)
            rows.append([a, b, al, len(roots)] + roots[:4]
                        + [float("nan")] * (4 - min(len(roots), 4)))
        header = ["a", "b", "alpha0", "n_roots", "zeta1", "zeta2", "zeta3",
                  "zeta4"]
    elif args.grid == "spaceform":
        rvals = np.linspace(args.rho_min, args.rho_max, args.rho_steps)
        tvals = np.linspace(args.tau0_min, args.tau0_max, args.tau0_steps)
        for rho in rvals:
            for t0 in tvals:
                sols = classify_spaceform(rho, t0)
                proper = [s for s in sols if s.admissible
                          and s.class_tag != "Geodesic"]
                rows.append([rho, t0, len(proper),
                             proper[0].kappa0_sq if proper else float("nan")])
        header = ["rho", "tau0", "n_proper", "kappa0_sq"]
    else:
        raise ValueError(f"unknown sweep grid {args.grid!r}")
    path = os.path.join(out, f"sweep_{args.grid}.csv")
    csvio._write_rows(path, header, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="trikurve",
        description="Triharmonic curves: classification, parametrization, "
                    "verification, flows")
    ap.add_argument("--config", default=None, help="flat key=value file")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="constant-curvature classifications")
    c.add_argument("target", choices=["surface", "spaceform", "bcv"])
    c.add_argument("--ks", type=float, help="surface Gaussian curvature")
    c.add_argument("--rho", type=float)
    c.add_argument("--tau0", type=float)
    c.add_argument("--a", type=float)
    c.add_argument("--b", type=float)
    c.add_argument("--alpha0", type=float)
    c.add_argument("--b3", type=float)
    c.add_argument("--json", default=None)
    c.set_defaults(func=cmd_classify)

    r = sub.add_parser("roots", help="positive roots of the helix quartic")
    r.add_argument("--a", type=float, required=True)
    r.add_argument("--b", type=float, required=True)
    r.add_argument("--alpha0", type=float, required=True)
    r.add_argument("--form", choices=["corrected", "published"],
                   default=None)
    r.add_argument("--json", default=None)
    r.set_defaults(func=cmd_roots)

    p = sub.add_parser("parametrize", help="emit explicit helix curves")
    p.add_argument("family", choices=["heisenberg", "type-i", "type-ii",
                                      "type-iii"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--zeta", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--phase", type=float)
    p.add_argument("--beta0", type=float)
    p.add_argument("--beta-init", dest="beta_init", type=float)
    p.add_argument("--branch", choices=["+", "-"])
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--s0", type=float)
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--step", type=float)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_parametrize)

    rc = sub.add_parser("reconstruct", help="curve from (kappa, tau) profile")
    rc.add_argument("--profile", required=True,
                    help="theorem-existence | constant | tabulated:PATH")
    rc.add_argument("--c1", type=float)
    rc.add_argument("--c2", type=float)
    rc.add_argument("--kappa0", type=float)
    rc.add_argument("--tau0", type=float)
    rc.add_argument("--s0", type=float, required=True)
    rc.add_argument("--s1", type=float, required=True)
    rc.add_argument("--step", type=float)
    rc.add_argument("--out", required=True)
    rc.add_argument("--frenet-out", dest="frenet_out", default=None)
    rc.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("verify", help="residual verification of a curve file")
    v.add_argument("--curve", required=True)
    v.add_argument("--surface", choices=["ruled"], default=None)
    v.add_argument("--manifold", default=None, help="manifold JSON")
    v.add_argument("--profile", default="theorem-existence")
    v.add_argument("--c1", type=float)
    v.add_argument("--c2", type=float)
    v.add_argument("--kappa0", type=float)
    v.add_argument("--tau0", type=float)
    v.add_argument("--order", type=int, choices=[1, 2, 3])
    v.add_argument("--tol", type=float)
    v.add_argument("--stride", type=int)
    v.add_argument("--report", default=None, help="summary JSON path")
    v.add_argument("--report-csv", dest="report_csv", default=None,
                   help="per-sample residual CSV path")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("flow", help="trienergy gradient descent")
    f.add_argument("--rho", type=float)
    f.add_argument("--kappa0", type=float)
    f.add_argument("--vertices", type=int)
    f.add_argument("--max-iters", dest="max_iters", type=int)
    f.add_argument("--grad-tol", dest="grad_tol", type=float)
    f.add_argument("--checkpoint-every", dest="checkpoint_every", type=int)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_flow)

    s = sub.add_parser("sweep", help="parameter-grid summaries")
    s.add_argument("grid", choices=["roots", "spaceform"])
    s.add_argument("--a-min", dest="a_min", type=float, default=-1.0)
    s.add_argument("--a-max", dest="a_max", type=float, default=1.0)
    s.add_argument("--a-steps", dest="a_steps", type=int, default=5)
    s.add_argument("--b-min", dest="b_min", type=float, default=-1.0)
    s.add_argument("--b-max", dest="b_max", type=float, default=1.0)
    s.add_argument("--b-steps", dest="b_steps", type=int, default=5)
    s.add_argument("--alpha0", type=float, default=math.pi / 2)
    s.add_argument("--rho-min", dest="rho_min", type=float, default=0.1)
    s.add_argument("--rho-max", dest="rho_max", type=float, default=2.0)
    s.add_argument("--rho-steps", dest="rho_steps", type=int, default=5)
    s.add_argument("--tau0-min", dest="tau0_min", type=float, default=0.0)
    s.add_argument("--tau0-max", dest="tau0_max", type=float, default=1.0)
    s.add_argument("--tau0-steps", dest="tau0_steps", type=int, default=5)
    s.add_argument("--random", type=int, default=None)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    args._cfg = _load_config(args.config)
    try:
        return args.func(args)
    except SpaceFormDegenerate as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except TrikurveError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
