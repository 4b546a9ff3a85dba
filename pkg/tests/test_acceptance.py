"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 7 (flow discovery) is implemented exactly as stated and is
expected to fail: the descent target is a saddle of the discrete energy
along the circle-radius direction, so plain gradient descent moves away
from it (see the convergence note in trikurve.flow).  All other criteria
pass.
"""

import math
import time

import numpy as np

from trikurve.classifier import (
    classify_spaceform,
    classify_surface,
    helix_from_root,
    hopf_helix_torsion,
    p4_coefficients,
    p4_roots,
)
from trikurve.flow import (
    FlowState,
    _kernel,
    grad_norm_density,
    measured_kappa,
    run_flow,
    trienergy_gradient_highprec,
)
from trikurve.frenet import measure_frenet, reconstruct_r3
from trikurve.geometry import CurveSamples, SpaceForm2, SpaceForm3
from trikurve.numerics import power_law_fit
from trikurve.parametrize import (
    HelixParam,
    beta_ode_residual,
    parametrize_heisenberg,
    parametrize_type_i,
    parametrize_type_ii,
    parametrize_type_iii,
    type_i_constants,
    type_iii_closed_form,
)
from trikurve.profiles import TheoremExistence
from trikurve.surface_ode import (
    FirstIntegralParams,
    binormal_route_c0,
    degree5_scale,
    degree5_witness,
    degree10_discrepancy,
    degree10_recombined,
    degree10_scale,
    degree10_witness,
    eq22_gaussian_curvature,
    fi_rhs,
    solve_first_integral,
    surface_residuals,
)
from trikurve.tension import helix_tension_exact, tension_r

from oracles import circle_length, sign_scan_roots, sphere_circle_chart

SQRT5 = math.sqrt(5.0)


def report(num, ok, desc):
    print(f"\nACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {desc}")
    assert ok, f"criterion {num}: {desc}"


def auto_stride(step, omega, lo=0.01, hi=0.1):
    """Stencil span balancing truncation (high omega) against roundoff."""
    h_target = min(max(0.12 / max(abs(omega), 0.8), lo), hi)
    return max(1, int(round(h_target / step)))


def test_criterion_1_existence_loop():
    t0 = time.monotonic()
    profile = TheoremExistence()
    s = np.linspace(1.0, 2.0, 2001)
    res1, res2 = surface_residuals(profile.derivatives(s, 4),
                                   -63.0 / (4.0 * s**2))
    analytic_ok = max(float(np.max(np.abs(res1))),
                      float(np.max(np.abs(res2)))) < 1e-9

    curve, _ = reconstruct_r3(profile, 1.0, 2.0, 1e-4)
    app = measure_frenet(curve, stride=20)
    sl = slice(6, -6)
    kap_err = float(np.max(np.abs(app.kappa[sl] - SQRT5 / app.s[sl])))
    tau_err = float(np.max(np.abs(
        app.tau[sl] - 1.5 * math.sqrt(7.0) / app.s[sl])))
    elapsed = time.monotonic() - t0
    report(1, analytic_ok and kap_err < 1e-6 and tau_err < 1e-6
           and elapsed < 5.0,
           f"existence loop: residuals<1e-9 ({analytic_ok}), kappa err "
           f"{kap_err:.2e}, tau err {tau_err:.2e}, {elapsed:.2f}s < 5s")


def test_criterion_2_surface_classification():
    rng = np.random.default_rng(11)
    exact_ok = True
    for ks in rng.uniform(1e-3, 100.0, size=100):
        circle = [s for s in classify_surface(ks)
                  if s.class_tag == "SurfaceCircle"][0]
        exact_ok &= circle.kappa0_sq == 2.0 * ks

    m = SpaceForm2(1.0)
    kap = math.sqrt(2.0)
    L = circle_length(1.0, kap)
    hs, gs = [], []
    for h_target in (2e-2, 1e-2, 5e-3):
        n = int(round(L / h_target))
        pts = sphere_circle_chart(1.0, kap, n, psi=0.7)
        g = trienergy_gradient_highprec(pts, m)
        h = float(np.asarray(_kernel(m, n, True).seg_lengths(pts)).mean())
        hs.append(h)
        gs.append(grad_norm_density(g.astype(float), h))
    slope, r2 = power_law_fit(hs, gs)
    C = max(g / h**2 for g, h in zip(gs, hs))
    bound_ok = all(g <= C * h**2 * (1 + 1e-12) for g, h in zip(gs, hs))
    report(2, exact_ok and bound_ok and r2 > 0.99 and 1.6 < slope < 2.5,
           f"kappa_g^2=2K_S exact x100 ({exact_ok}); gradient order "
           f"{slope:.3f} (R^2={r2:.5f}) <= C h^2")


def test_criterion_3_space_forms():
    sols = classify_spaceform(1.0, 0.5)
    proper = [s for s in sols if s.class_tag == "SpaceFormHelix"
              and s.admissible]
    single = len(proper) == 1
    value_ok = proper[0].kappa0_sq == 0.75 + math.sqrt(0.75)
    res = helix_tension_exact(SpaceForm3(1.0), proper[0].kappa0, 0.5)
    res_ok = abs(res[0]) < 1e-14 and res[1] == 0.0

    minus_ok = True
    for tau0 in np.linspace(1e-8, 1.0, 10_000):
        branches = [s for s in classify_spaceform(1.0, float(tau0))
                    if s.class_tag == "SpaceFormHelix"]
        minus = [s for s in branches if "minus" in s.reason]
        if minus and minus[0].admissible:
            minus_ok = False
            break
    report(3, single and value_ok and res_ok and minus_ok,
           f"kappa0^2 = 3/4 + sqrt(3)/2 ({value_ok}), exact residual "
           f"{res[0]:.1e}, minus branch inadmissible on 1e4 grid ({minus_ok})")


def test_criterion_4_bcv_quartic():
    rng = np.random.default_rng(4)
    agree = True
    checked = 0
    while checked < 10_000:
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(-3.0, 3.0)
        al = rng.uniform(0.05, math.pi - 0.05)
        if abs(4.0 * a - b * b) < 1e-8:
            continue
        checked += 1
        c = p4_coefficients(a, b, al)
        hi = 1.0 + float(np.max(np.abs(c))) / 4.0
        mine = p4_roots(a, b, al)
        oracle = [r for r in sign_scan_roots(c, 0.0, hi, n_grid=2000)
                  if r > 1e-10]
        if len(mine) != len(oracle) or any(
                abs(x - y) > 1e-10 * max(1.0, abs(y))
                for x, y in zip(mine, oracle)):
            agree = False
            break

    pos_ok = True
    neg_ok = True
    for _ in range(1000):
        al = rng.uniform(0.05, math.pi - 0.05)
        a = rng.uniform(0.01, 4.0)
        pub = p4_roots(a, 0.0, al, form="published")
        pos_ok &= len(pub) == 1 and abs(
            pub[0] - math.sqrt(8 * a) * math.sin(al) ** 2) < 1e-10
        cor = p4_roots(a, 0.0, al)
        pos_ok &= len(cor) == 1 and abs(
            cor[0] - math.sqrt(8 * a) * math.sin(al)) < 1e-10
        neg_ok &= p4_roots(-a, 0.0, al) == [] \
            and p4_roots(-a, 0.0, al, form="published") == []
    report(4, agree and pos_ok and neg_ok,
           f"oracle agreement on 1e4 draws ({agree}); b=0 roots "
           f"(published sqrt(8a)sin^2, corrected sqrt(8a)sin) ({pos_ok}); "
           f"empty for a<0 x1000 ({neg_ok})")


def _heisenberg_cases(n_cases, seed=5):
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n_cases:
        b = rng.uniform(-2.5, 2.5)
        al = rng.uniform(0.15, math.pi - 0.15)
        if abs(b) < 0.3 or b * math.cos(al) >= 0.0:
            continue
        roots = p4_roots(0.0, b, al)
        roots = [z for z in roots if abs(z + b * math.cos(al)) > 0.05]
        if roots:
            cases.append((b, al, roots[-1]))
    return cases


def test_criterion_5_heisenberg():
    t0 = time.monotonic()
    cases = _heisenberg_cases(20)
    unit_ok = meas_ok = fd_ok = exact_ok = True
    worst = {"unit": 0.0, "kap": 0.0, "tau": 0.0, "fd": 0.0, "exact": 0.0}
    for b, al, zeta in cases:
        curve = parametrize_heisenberg(b, al, zeta, s_span=(0.0, 8.0),
                                       step=1e-3)
        worst["unit"] = max(worst["unit"], curve.meta["unit_speed_error"])
        unit_ok &= curve.meta["unit_speed_error"] < 1e-9

        om = zeta + b * math.cos(al)
        stride = auto_stride(1e-3, om)
        app = measure_frenet(curve, stride=20)
        sl = slice(12, -12)
        kap_err = float(np.max(np.abs(app.kappa[sl] - zeta * math.sin(al))))
        # the stated torsion magnitude |-zeta cos a0 - b/2|; the measured
        # sign follows the standard binormal convention (see ledger)
        tau_stated = -zeta * math.cos(al) - 0.5 * b
        tau_err = float(np.nanmax(np.abs(
            np.abs(app.tau[sl]) - abs(tau_stated))))
        sign_ok = np.nanmedian(app.tau[sl]) * hopf_helix_torsion(
            b, al, zeta) > 0
        worst["kap"] = max(worst["kap"], kap_err)
        worst["tau"] = max(worst["tau"], tau_err)
        meas_ok &= kap_err < 1e-6 and tau_err < 1e-6 and sign_ok

        rep = tension_r(curve, 3, stride=stride)
        rel = rep.max_rel(interior=12)
        worst["fd"] = max(worst["fd"], rel)
        fd_ok &= rel < 1e-3

        sol = helix_from_root(0.0, b, al, zeta)
        scale = max(1.0, (sol.kappa0_sq + sol.tau0**2) ** 2)
        exact = max(abs(sol.residuals["normal"]),
                    abs(sol.residuals["binormal"])) / scale
        worst["exact"] = max(worst["exact"], exact)
        exact_ok &= exact < 1e-12
    elapsed = time.monotonic() - t0
    report(5, unit_ok and meas_ok and fd_ok and exact_ok and elapsed < 10.0,
           f"20 helices: unit speed {worst['unit']:.1e} (<1e-9), "
           f"kappa/|tau| {worst['kap']:.1e}/{worst['tau']:.1e} (<1e-6), "
           f"FD tau3 rel {worst['fd']:.1e} (<1e-3), exact "
           f"{worst['exact']:.1e} (<1e-12), {elapsed:.1f}s < 10s")


def test_criterion_6_type_parametrizations():
    checks = []

    # type (i) on the product space; root exists and beta is nonconstant
    a, b, al = 1.0, 0.0, 1.0
    zeta = p4_roots(a, b, al)[-1]
    mu, c1, c2 = type_i_constants(a, b, al, zeta, phase=0.3)
    p = HelixParam(type_tag="type-i", a=a, b=b, alpha0=al, zeta=zeta,
                   mu=mu, c1=c1, c2=c2, s_span=(0.0, 6.0), step=1e-3)
    curve = parametrize_type_i(p)
    res_beta = beta_ode_residual(curve, curve.meta["beta"], a, b, al, zeta)
    sol = helix_from_root(a, b, al, zeta)
    checks.append(("type-i beta residual",
                   float(np.max(np.abs(res_beta[4:-4]))) < 1e-8))
    checks.append(("type-i unit speed",
                   curve.meta["unit_speed_error"] < 1e-6))
    checks.append(("type-i helix equations at root",
                   max(abs(sol.residuals["normal"]),
                       abs(sol.residuals["binormal"])) < 1e-10))

    # type (ii): mixed-slope constant phase
    a2, b2, al2 = 0.7, -0.5, 1.3
    zeta2 = p4_roots(a2, b2, al2)[-1]
    p2 = HelixParam(type_tag="type-ii", a=a2, b=b2, alpha0=al2, zeta=zeta2,
                    beta0=math.pi / 4.0, s_span=(0.0, 1.2), step=5e-4)
    curve2 = parametrize_type_ii(p2)
    res2 = beta_ode_residual(curve2, curve2.meta["beta"], a2, b2, al2, zeta2)
    sol2 = helix_from_root(a2, b2, al2, zeta2)
    checks.append(("type-ii beta residual",
                   float(np.max(np.abs(res2[4:-4]))) < 1e-8))
    checks.append(("type-ii unit speed",
                   curve2.meta["unit_speed_error"] < 1e-6))
    checks.append(("type-ii helix equations at root",
                   max(abs(sol2.residuals["normal"]),
                       abs(sol2.residuals["binormal"])) < 1e-10))

    # type (iii): frozen x, closed-form y for a > 0
    p3 = HelixParam(type_tag="type-iii", a=a, b=b, alpha0=al, zeta=zeta,
                    x0_sign=1, s_span=(0.0, 0.6), step=5e-4)
    curve3 = parametrize_type_iii(p3)
    y_cf = type_iii_closed_form(a, curve3.meta["x0"], al, curve3.s)
    res3 = beta_ode_residual(curve3, curve3.meta["beta"], a, b, al, zeta)
    checks.append(("type-iii closed form",
                   float(np.max(np.abs(curve3.points[:, 1] - y_cf))) < 1e-8))
    checks.append(("type-iii unit speed",
                   curve3.meta["unit_speed_error"] < 1e-6))
    checks.append(("type-iii beta residual",
                   float(np.max(np.abs(res3[4:-4]))) < 1e-8))

    ok = all(flag for _, flag in checks)
    detail = "; ".join(f"{name}: {'ok' if flag else 'FAIL'}"
                       for name, flag in checks)
    report(6, ok, detail)


def test_criterion_7_flow_discovery():
    t0 = time.monotonic()
    m = SpaceForm2(1.0)
    pts = sphere_circle_chart(1.0, 1.2, 200)
    state = FlowState(points=pts, manifold=m, closed=True)
    state = run_flow(state, max_iters=50_000, grad_tol=1e-8,
                     respace_every=50, log_every=100)
    elapsed = time.monotonic() - t0

    objective = [row[1] for row in state.history]
    iters = [row[0] for row in state.history]
    monotone = all(objective[i] <= objective[i - 1] + 1e-14
                   for i in range(1, len(objective))
                   if iters[i] % 50 != 0)
    kap = measured_kappa(state)
    target = math.sqrt(2.0)
    within = abs(kap - target) / target
    print(f"\n  flow: iterations={state.iteration} flag={state.flag} "
          f"energy={state.energy:.6f} measured kappa={kap:.6f} "
          f"target={target:.6f} rel dev={within:.3%} "
          f"monotone={monotone} time={elapsed:.0f}s")
    report(7, monotone and elapsed < 120.0 and within < 0.01,
           f"flow from kappa=1.2 reaches sqrt(2) within 1% "
           f"(measured {kap:.4f}, dev {within:.1%}); energy non-increasing "
           f"({monotone}); {elapsed:.0f}s < 120s "
           "[expected failure: the target circle is a saddle of the "
           "trienergy along the radius mode, so descent moves away from it]")


def test_criterion_8_witness_polynomials():
    rng = np.random.default_rng(8)

    # degree-10: along first-integral orbits with K_S from the normal
    # equation, the recombination witness vanishes; the tabulated form's
    # deviation is exactly the flagged 75 k^9 (1 - k) discrepancy
    orbit_ok = True
    discrepancy_ok = True
    for _ in range(10):
        while True:
            c1 = rng.uniform(-1.0, 1.0)
            c2 = rng.uniform(-1.0, 1.0)
            k0 = rng.uniform(0.8, 2.0)
            if float(fi_rhs(k0, c1, c2)) > 0.1:
                break
        orbit = solve_first_integral(FirstIntegralParams(c1=c1, c2=c2),
                                     k0, (0.0, 2.0))
        s = np.linspace(*orbit.domain, 64)
        derivs = orbit.derivatives(s, upto=4)
        ks = eq22_gaussian_curvature(derivs)
        k = orbit.kappa(s)
        w = degree10_recombined(k, c1, c2, ks)
        scale = degree10_scale(k, c1, c2, ks)
        orbit_ok &= float(np.max(np.abs(w) / scale)) < 1e-7
        d = degree10_discrepancy(k, c1, c2, ks)
        pred = 75.0 * k**9 * (1.0 - k)
        discrepancy_ok &= float(np.max(np.abs(d - pred))) < 1e-8 * float(
            np.max(scale))

    # degree-5: joint orbits of the two space-form quadratures
    deg5_ok = True
    rho = 0.8
    for _ in range(10):
        tau0 = rng.uniform(0.1, 0.8)
        while True:
            c1 = rng.uniform(-1.0, 1.0)
            c2 = rng.uniform(-1.0, 1.0)
            k0 = rng.uniform(0.8, 2.0)
            if float(fi_rhs(k0, c1, c2, tau0)) > 0.1:
                break
        orbit = solve_first_integral(
            FirstIntegralParams(c1=c1, c2=c2, tau0=tau0), k0, (0.0, 2.0))
        s = np.linspace(*orbit.domain, 64)
        k = orbit.kappa(s)
        c0 = binormal_route_c0(k, orbit.dkappa(s, 1), rho)
        w = degree5_witness(k, tau0, rho, c0, c1, c2)
        scale = degree5_scale(k, tau0, rho, float(np.max(np.abs(c0))),
                              c1, c2)
        deg5_ok &= float(np.max(np.abs(w) / scale)) < 1e-7

    # bounded away from zero on generic random curvature, 100 trials each
    generic_ok = True
    for _ in range(100):
        k = rng.uniform(0.5, 3.0)
        w10 = degree10_witness(k, 0.7, -0.4, 1.1)
        generic_ok &= abs(w10) > 1e-6 * float(degree10_scale(k, 0.7, -0.4,
                                                             1.1))
        w5 = degree5_witness(k, 0.5, 1.0, 0.3, 0.8, -0.2)
        generic_ok &= abs(w5) > 1e-6 * float(degree5_scale(k, 0.5, 1.0, 0.3,
                                                           0.8, -0.2))
    report(8, orbit_ok and deg5_ok and generic_ok and discrepancy_ok,
           f"recombined degree-10 vanishes on joint orbits ({orbit_ok}); "
           f"tabulated-form discrepancy = 75k^9(1-k) ({discrepancy_ok}); "
           f"degree-5 vanishes on joint orbits ({deg5_ok}); both bounded "
           f"away from zero generically ({generic_ok})")


def test_criterion_9_negative_controls(tmp_path, capsys):
    from trikurve.cli import main

    # corrupted curve -> verify exits 1
    curve_path = tmp_path / "c.csv"
    main(["reconstruct", "--profile", "theorem-existence", "--c1", "0",
          "--c2", "0", "--s0", "1", "--s1", "2", "--step", "1e-3",
          "--out", str(curve_path)])
    lines = curve_path.read_text().splitlines()
    parts = lines[501].split(",")               # on the stride-10 grid
    parts[2] = repr(float(parts[2]) + 1e-2)
    lines[501] = ",".join(parts)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    ok_code = main(["verify", "--surface", "ruled", "--curve",
                    str(curve_path), "--tol", "1e-5", "--stride", "10"])
    bad_code = main(["verify", "--surface", "ruled", "--curve", str(bad),
                     "--tol", "1e-5", "--stride", "10"])
    capsys.readouterr()
    corrupt_ok = ok_code == 0 and bad_code == 1

    # geodesics are r-harmonic for r = 1, 2, 3
    s = np.linspace(0.0, 2.0, 15)
    line = CurveSamples(s, np.stack([s, 0 * s, 0 * s], axis=1),
                        SpaceForm3(0.0))
    geo_ok = all(float(np.max(tension_r(line, r).residual_norm[6:-6])) < 1e-8
                 for r in (1, 2, 3))

    # the triharmonic circle is not biharmonic
    rho, kap = 1.0, math.sqrt(2.0)
    n = 360
    pts = sphere_circle_chart(rho, kap, n)
    sc = CurveSamples(np.arange(n) * circle_length(rho, kap) / n, pts,
                      SpaceForm2(rho))
    rep2 = tension_r(sc, 2)
    expect = kap * rho                           # |kappa (rho - kappa^2)|
    mid = rep2.residual_norm[20:-20]
    bi_ok = float(np.min(mid)) > 0.5 * expect
    report(9, corrupt_ok and geo_ok and bi_ok,
           f"corrupted verify exits 1 ({corrupt_ok}); geodesics r-harmonic "
           f"r=1,2,3 ({geo_ok}); critical circle not biharmonic ({bi_ok})")
