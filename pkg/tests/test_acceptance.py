"""The fourteen acceptance criteria, one test each, at their stated tolerances.

Each test records a PASS/FAIL line (shown in the terminal summary) before asserting.
"""

import math
import time

import numpy as np

from orthoflow import action_engine as ae
from orthoflow import circleflow as cf
from orthoflow import ledger
from orthoflow import suites as S
from orthoflow.errors import OutsideWPlus
from orthoflow.sopq import Signature, boost, exp_algebra, gram, random_algebra_coeffs


def _values(checks):
    return {c.name: c for c in checks}


def test_c01_group_membership(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for p, q in [(3, 3), (3, 4), (4, 5)]:
        sig = Signature(p, q)
        I = gram(sig)
        rng = np.random.default_rng(1)
        for _ in range(500):
            X = exp_algebra(sig, random_algebra_coeffs(sig, rng))
            worst = max(worst, float(np.linalg.norm(X @ I @ X.T - I)))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 5.0
    criterion(1, "group membership", ok, f"max residual {worst:.2e} (<= 1e-9), {dt:.2f}s (< 5s)")
    assert ok


def test_c02_action_axiom(criterion):
    t0 = time.perf_counter()
    (c,) = S.action_axiom(S.SuiteConfig(3, 3, n=1, a=0.3, seed=42, samples=100))
    dt = time.perf_counter() - t0
    ok = c.passed and c.threshold == 1e-6 and dt < 60
    criterion(2, "action axiom", ok, f"max discrepancy {c.value:.2e} (<= 1e-6), {dt:.1f}s (< 60s)")
    assert ok


def test_c03_k_extension(criterion):
    (c,) = S.k_extension(S.SuiteConfig(3, 3, n=1, a=0.3, seed=7, samples=100))
    criterion(3, "K-extension", c.passed, f"max discrepancy {c.value:.2e} (<= 1e-10)")
    assert c.passed and c.threshold == 1e-10


def test_c04_cross_ratio_law(criterion):
    worst = 0.0
    for n, a in [(1, 0.0), (1, 0.3), (2, 0.5)]:
        c = S.cross_ratio(cf.make_flow(cf.BASIC_J1, n, a), grid=30)
        worst = max(worst, c.value)
    ok = worst <= 1e-7
    criterion(4, "cross-ratio law", ok, f"max residual {worst:.2e} on 30x30 grids (<= 1e-7)")
    assert ok


def test_c05_boost_projector_identity(criterion):
    sig = Signature(3, 3)
    worst = 0.0
    for th in np.linspace(-2, 2, 21):
        for f in np.linspace(-0.95, 0.95, 21):
            worst = max(worst, ae.conjugation_identity_check(sig, float(th), float(f))["projector"])
    ok = worst <= 1e-9
    criterion(5, "boost/projector identity", ok, f"max Frobenius residual {worst:.2e} (<= 1e-9)")
    assert ok


def test_c06_charts(criterion):
    v = _values(S.charts(S.SuiteConfig(3, 3, n=1, a=0.3, seed=11, samples=100)))
    trip, route = v["chart-round-trip"], v["chart-vs-decomposition"]
    ok = trip.value <= 1e-8 and route.value <= 1e-6
    criterion(6, "charts", ok, f"round trip {trip.value:.2e} (<= 1e-8), route gap {route.value:.2e} (<= 1e-6)")
    assert ok


def test_c07_decomposition_margin(criterion):
    sig = Signature(3, 3)
    v = _values(S.decomposition_margin(S.SuiteConfig(3, 3, seed=5, samples=500)))
    # probes of the boundary at f = 0: the gap of boost(t) is cosh(2t) - 1
    raises_near = False
    try:
        ae.decompose(sig, boost(sig, 1e-4), 0.0)
    except OutsideWPlus:
        raises_near = True
    ae.decompose(sig, boost(sig, 1e-3), 0.0)
    ok = (v["single-accepted-branch"].passed and v["runner-up-margin"].passed
          and v["boundary-raises-off-boundary"].passed and raises_near)
    criterion(7, "decomposition uniqueness", ok,
              f"multi-branch samples {v['single-accepted-branch'].detail['got']}, "
              f"min runner-up ratio {v['runner-up-margin'].value:.2e} (>= 10), "
              f"off-boundary raises {v['boundary-raises-off-boundary'].detail['got']}")
    assert ok


def _nilradical_dim(kind, p, q):
    # independent arithmetic: null line gives R^{p+q-2}; a maximal isotropic
    # q-plane gives Hom(R^{p-q}, R^q) plus the skew forms on R^q
    return p + q - 2 if kind == ledger.NULL_LINE else q * (p - q) + q * (q - 1) // 2


def test_c08_dimension_ledger(criterion):
    bad = []
    for p in range(3, 10):
        for q in range(3, p + 1):
            for kind in (ledger.NULL_LINE, ledger.MAX_ISOTROPIC):
                d = ledger.parabolic_dims(kind, p, q)
                dimG = (p + q) * (p + q - 1) // 2
                if d.codim != _nilradical_dim(kind, p, q) or d.dimPTheta != dimG - d.codim:
                    bad.append((kind, p, q))
                if kind == ledger.NULL_LINE and d.codim != p + q - 2:
                    bad.append(("nullcodim", p, q))
    printed = [ledger.parabolic_dims(ledger.MAX_ISOTROPIC, 4, 3).codim,
               ledger.parabolic_dims(ledger.MAX_ISOTROPIC, 3, 3).codim]
    rows = ledger.printed_row_checks()
    spin = [r for r, _ in rows if r.p == 9 and r.subgroupName == "Spin(7)"][0]
    ok = not bad and printed == [6, 3] and all(ok for _, ok in rows) and spin.dimOrbit == 15
    criterion(8, "dimension ledger", ok,
              f"{len(bad)} parabolic mismatches, MaxIsotropic codims {printed}, "
              f"{sum(ok for _, ok in rows)}/{len(rows)} table rows, SO(9)/Spin(7) -> {spin.dimOrbit}")
    assert ok


def test_c09_orbit_census(criterion):
    checks = S.orbit_census(S.SuiteConfig(3, 3, n=1, a=0.0, seed=3))
    ok = all(c.passed for c in checks)
    v = _values(checks)
    criterion(9, "orbit census", ok,
              f"dims {v['open-orbit-dimension'].detail['got']}/{v['fixed-point-orbit-dimension'].detail['got']}, "
              f"f-tilde error {v['f-tilde-extraction'].value:.1e} (<= 1e-3), "
              f"SO(p) fixed {v['SOp-fixed-set'].detail['got']}, SO(q) fixed {v['SOq-fixed-set'].detail['got']}, "
              f"bundle {v['bundle-SOp-fixed-set'].detail['got']}/{v['bundle-SOq-fixed-set'].detail['got']}")
    assert ok


def test_c10_flow_oracles(criterion):
    ode = 0.0
    closed = 0.0
    for n in (1, 2, 3):
        flow = cf.make_flow(cf.BASIC_J1, n, 0.0)
        for th in np.linspace(-5, 5, 21):
            for phi in np.linspace(0.05, math.pi - 0.05, 15):
                ref = 2 * math.atan(math.tan(phi / 2) * math.exp(-2 * th / n))
                ode = max(ode, abs(flow.flow_map(float(th), float(phi), method="ode") - ref))
        for phi in np.linspace(0.01, math.pi - 0.01, 199):
            t = math.tan(phi / 2) ** n
            closed = max(closed, abs(cf.f_of(flow, float(phi)) - (1 - t) / (1 + t)))
    ok = ode <= 1e-8 and closed <= 1e-8
    criterion(10, "flow oracles", ok, f"integrator {ode:.2e} (<= 1e-8), f closed form {closed:.2e} (<= 1e-8)")
    assert ok


def _midpoint_pv(a, N=4_000_000):
    # poles at 0 and pi fall on cell edges, so the midpoint sum is symmetric about each
    h = 2 * math.pi / N
    x = (np.arange(N) + 0.5) * h
    return float(np.sum(1.0 / (-2 * np.sin(x) * (1 + a * np.sin(x)))) * h)


def test_c11_mu_surrogate(criterion):
    mu0 = cf.pv_global_invariant(cf.make_flow(cf.BASIC_J1, 1, 0.0))
    mu5 = cf.pv_global_invariant(cf.make_flow(cf.BASIC_J1, 1, 0.5))
    oracle = _midpoint_pv(0.5)
    mus = [cf.pv_global_invariant(cf.make_flow(cf.BASIC_J1, 1, a)) for a in np.linspace(0, 0.9, 10)]
    mono = all(b > a for a, b in zip(mus, mus[1:]))
    ok = abs(mu0) <= 1e-6 and abs(mu5 - oracle) <= 1e-4 and mono
    criterion(11, "mu surrogate", ok,
              f"mu(a=0) {mu0:.1e}, mu(a=0.5) {mu5:.10f} vs oracle {oracle:.10f}, monotone {mono}")
    assert ok


def test_c12_conjugacy(criterion):
    J1 = cf.BASIC_J1
    same = cf.conjugacy_map(cf.make_flow(J1, 1, 0.2), cf.make_flow(J1, 1, 0.2))
    jac = cf.conjugacy_map(cf.make_flow(J1, 1, 0.0), cf.make_flow(J1, 2, 0.0))
    asym = cf.conjugacy_map(cf.make_flow(J1, 1, 0.0), cf.make_flow(J1, 1, 0.5))
    ok = (same.success and same.defect <= 1e-6 and not jac.success
          and jac.certificate.startswith("Jacobian mismatch") and not asym.success and asym.certificate)
    criterion(12, "conjugacy", ok,
              f"self defect {same.defect:.1e}; n=1 vs n=2: {jac.certificate!r}; a=0 vs a=0.5: {asym.certificate!r}")
    assert ok


def test_c13_bundle(criterion):
    v = _values(S.bundle(S.SuiteConfig(3, 3, n=1, a=0.3, seed=13, samples=100)))
    ok = all(c.passed for c in v.values())
    criterion(13, "bundle", ok,
              f"pi(m) {v['pi-of-boost'].value:.1e} (<= 1e-12), pi on stabilizer {v['pi-on-null-stabilizer'].value:.1e}"
              f" (<= 1e-9), axiom failures {v['bundle-action-axiom-failures'].detail['got']}, "
              f"lift defect {v['double-cover-lift-defect'].value:.1e} (<= 1e-8)")
    assert ok


def test_c14_sphere_action(criterion):
    v = _values(S.uchida(S.SuiteConfig(3, 3, n=1, a=0.3, seed=17, samples=100)))
    ok = all(c.passed for c in v.values())
    criterion(14, "sphere action", ok,
              f"K-extension {v['uchida-k-extension'].value:.1e} (<= 1e-10), axiom {v['uchida-action-axiom'].value:.1e}"
              f" (<= 1e-5), f-tilde transport {v['uchida-f-tilde-transport'].value:.1e} (<= 1e-5)")
    assert ok
