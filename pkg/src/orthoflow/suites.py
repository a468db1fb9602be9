"""Seeded verification suites shared by the command line and the test-suite.

Each suite returns a list of :class:`Check` records.  Sample ``i`` of a suite
draws from ``numpy.random.default_rng(seed + i)``, so results do not depend on
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import action_engine as ae
from . import circleflow as cf
from . import orbit_lab as ol
from .errors import OutsideWPlus, UsageError
from .numkit import matrix_exp
from .sopq import (Signature, boost, embed_K, exp_algebra, random_algebra_coeffs, random_so,
                   stabilizer_algebra)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    detail: dict | None = None

    def as_dict(self) -> dict:
        out = {"name": self.name, "value": self.value, "threshold": self.threshold,
               "pass": self.passed}
        if self.detail:
            out["detail"] = self.detail
        return out


def at_most(name: str, value: float, threshold: float, **detail) -> Check:
    return Check(name, float(value), threshold, bool(value <= threshold), detail or None)


def equals(name: str, value, expected, **detail) -> Check:
    ok = value == expected
    return Check(name, float(ok is False), 0.0, ok, {"got": value, "expected": expected, **detail})


@dataclass(frozen=True)
class SuiteConfig:
    p: int = 3
    q: int = 3
    n: int = 1
    a: float = 0.0
    seed: int = 42
    samples: int = 100

    @property
    def sig(self) -> Signature:
        return Signature(self.p, self.q)


def _rng(cfg: SuiteConfig, i: int) -> np.random.Generator:
    return np.random.default_rng(cfg.seed + i)


def _random_g(sig: Signature, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return exp_algebra(sig, random_algebra_coeffs(sig, rng, scale))


def _random_k(sig: Signature, rng: np.random.Generator):
    return random_so(sig.p, rng), random_so(sig.q, rng)


def _random_O_point(sig: Signature, rng: np.random.Generator) -> ae.ProductSpherePoint:
    x = ae.random_product_point(sig, rng)
    v = x.v.copy()
    v[sig.p] = abs(v[sig.p])
    return ae.ProductSpherePoint(v, x.w)


# --- suites -------------------------------------------------------------------------

def action_axiom(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    worst = 0.0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        g1, g2 = _random_g(sig, rng), _random_g(sig, rng)
        x = ae.random_product_point(sig, rng)
        composed = ae.act_product(sig, g1 @ g2, x, flow)
        sequential = ae.act_product(sig, g1, ae.act_product(sig, g2, x, flow), flow)
        worst = max(worst, composed.distance(sequential))
    return [at_most("action-axiom", worst, 1e-6, samples=cfg.samples)]


def k_extension(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    worst = 0.0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        k1, k2 = _random_k(sig, rng)
        x = ae.random_product_point(sig, rng)
        got = ae.act_product(sig, embed_K(k1, k2), x, flow)
        worst = max(worst, got.distance(ae.standard_K_act(k1, k2, x)))
    return [at_most("k-extension", worst, 1e-10, samples=cfg.samples)]


def boost_projector(cfg: SuiteConfig, grid: int = 21) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    proj = iso = 0.0
    for th in np.linspace(-2.0, 2.0, grid):
        for f in np.linspace(-0.95, 0.95, grid):
            r = ae.conjugation_identity_check(sig, float(th), float(f), flow)
            proj = max(proj, r["projector"])
            iso = max(iso, r["isotropy"])
    return [at_most("boost-projector-identity", proj, 1e-9, grid=grid),
            at_most("isotropy-transport", iso, 1e-9, grid=grid),
            cross_ratio(flow)]


def cross_ratio(flow: cf.CircleFlow, grid: int = 30) -> Check:
    """f(Phi_theta(phi)) against the tanh addition rule on a theta x phi grid."""
    worst = 0.0
    for th in np.linspace(-2.0, 2.0, grid):
        for phi in np.linspace(0.0, 2 * math.pi, grid, endpoint=False):
            f0 = cf.f_of(flow, float(phi))
            f1 = cf.f_of(flow, flow.flow_map(float(th), float(phi)))
            worst = max(worst, abs(f1 - ae.transport_value(float(th), f0)))
    return at_most("cross-ratio-law", worst, 1e-7, grid=grid)


def charts(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    trip = route = 0.0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        x = _random_O_point(sig, rng)
        back = ae.chart_F1(sig, ae.chart_F0(sig, x, flow), flow)
        trip = max(trip, back.distance(x))
        g = _random_g(sig, rng)
        route = max(route, ae.act_via_chart(sig, g, x, flow).distance(
            ae.act_product(sig, g, x, flow, route="decompose")))
    return [at_most("chart-round-trip", trip, 1e-8, samples=cfg.samples),
            at_most("chart-vs-decomposition", route, 1e-6, samples=cfg.samples)]


def decomposition_margin(cfg: SuiteConfig) -> list:
    """Exactly one accepted branch with a 10x residual margin; boundary raises only near the boundary."""
    sig = cfg.sig
    multi = 0
    margin = math.inf
    bad_raise = 0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        g = _random_g(sig, rng)
        f = float(rng.uniform(-0.95, 0.95))
        try:
            d = ae.decompose(sig, g, f)
        except OutsideWPlus:
            w = ae.datum_vector(sig, f)
            y = g @ w
            if ae.solve_theta(float(y @ y), f).gap > 1e-6:
                bad_raise += 1
            continue
        multi += d.diagnostics["accepted_count"] != 1
        margin = min(margin, d.diagnostics["runner_up_residual"] / max(d.diagnostics["residual"], 1e-300))
    return [equals("single-accepted-branch", multi, 0, samples=cfg.samples),
            Check("runner-up-margin", margin, 10.0, bool(margin >= 10.0)),
            equals("boundary-raises-off-boundary", bad_raise, 0)]


def bundle(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    pi_m = max(abs(ae.bundle_pi(sig, boost(sig, float(t))) - t) for t in np.linspace(-3, 3, 61))
    stab = stabilizer_algebra(sig, ae.null_datum(sig)).matrices()
    pi_u = 0.0
    for i in range(50):
        rng = _rng(cfg, i)
        X = np.tensordot(rng.standard_normal(len(stab)), stab, axes=1)
        pi_u = max(pi_u, abs(ae.bundle_pi(sig, matrix_exp(X))))
    fails = 0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        g1, g2 = _random_g(sig, rng), _random_g(sig, rng)
        pt = ae.BundlePoint(_random_g(sig, rng), float(rng.uniform(0, 2 * math.pi)))
        lhs = ae.bundle_act(sig, g1 @ g2, pt, flow)
        rhs = ae.bundle_act(sig, g1, ae.bundle_act(sig, g2, pt, flow), flow)
        fails += not ae.bundle_eq(sig, lhs, rhs, flow)
    return [at_most("pi-of-boost", pi_m, 1e-12),
            at_most("pi-on-null-stabilizer", pi_u, 1e-9, samples=50),
            equals("bundle-action-axiom-failures", fails, 0, samples=cfg.samples),
            covering_defect()]


def covering_defect(n: int = 2, a: float = 0.4, grid: int = 25) -> Check:
    """Lifted flow pushed down to RP^1 against an independent RK integration there."""
    base = cf.make_flow(cf.BASIC_J1J2, n, a)
    lifted = cf.lift_double_cover(cf.project_to_rp1(base))
    rk = cf.ProjectiveFlow(field=base.field)
    worst = 0.0
    for th in np.linspace(-3.0, 3.0, grid):
        for phi in np.linspace(0.0, 2 * math.pi, 2 * grid, endpoint=False):
            down = math.fmod(lifted.flow_map(float(th), float(phi)), math.pi)
            ref = rk.flow_map(float(th), math.fmod(float(phi), math.pi))
            d = abs(down - ref)
            worst = max(worst, min(d, math.pi - d))
    return at_most("double-cover-lift-defect", worst, 1e-8, grid=grid)


def uchida(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1J2, cfg.n, cfg.a)
    kext = axiom = 0.0
    for i in range(cfg.samples):
        rng = _rng(cfg, i)
        y = ae.random_sphere_point(sig, rng)
        k1, k2 = _random_k(sig, rng)
        k = embed_K(k1, k2)
        kext = max(kext, ae.act_sphere(sig, k, y, flow).distance(ae.SpherePoint(k @ y.y)))
        g1, g2 = _random_g(sig, rng), _random_g(sig, rng)
        lhs = ae.act_sphere(sig, g1 @ g2, y, flow)
        rhs = ae.act_sphere(sig, g1, ae.act_sphere(sig, g2, y, flow), flow)
        axiom = max(axiom, lhs.distance(rhs))
    transport = 0.0
    for th in np.linspace(-2.0, 2.0, 21):
        for phi in np.linspace(0.0, 2 * math.pi, 24, endpoint=False):
            y = ae.sphere_slice_point(sig, math.cos(phi), math.sin(phi))
            z = ae.act_sphere(sig, boost(sig, float(th)), y, flow).y
            got = cf.f_tilde_cs(flow, float(z[0]), float(z[sig.p]))
            want = cf.f_tilde_cs(flow, math.cos(phi), math.sin(phi)).transport(float(th))
            transport = max(transport, got.distance(want))
    return [at_most("uchida-k-extension", kext, 1e-10, samples=cfg.samples),
            at_most("uchida-action-axiom", axiom, 1e-5, samples=cfg.samples),
            at_most("uchida-f-tilde-transport", transport, 1e-5)]


def orbit_census(cfg: SuiteConfig) -> list:
    sig, flow = cfg.sig, cf.make_flow(cf.BASIC_J1, cfg.n, cfg.a)
    act = ol.product_action(sig, flow)
    c, s = cf.inverse_f_cs(flow, 0, 0.4)
    open_dim = ol.orbit_dimension(act, ae.slice_point(sig, c, s))
    fixed_dim = ol.orbit_dimension(act, ae.slice_point_at(sig, 0.0))
    ft = 0.0
    for th in np.linspace(-1.5, 1.5, 20):
        z = ae.slice_point_at(sig, flow.flow_map(float(th), math.pi / 2))
        got = ol.extract_f_tilde(act, z)
        ft = max(ft, got.distance(cf.ProjectivePoint.of(math.tanh(th), 1.0)))
    poles = [math.pi / 2, 3 * math.pi / 2]
    sop = ol.fixed_set_scan(act, "SOp", seed=cfg.seed)
    soq = ol.fixed_set_scan(act, "SOq", seed=cfg.seed)
    bact = ol.bundle_action(sig, flow)
    bsop = ol.fixed_set_scan(bact, "SOp", seed=cfg.seed)
    bsoq = ol.fixed_set_scan(bact, "SOq", seed=cfg.seed)
    return [equals("open-orbit-dimension", open_dim, sig.n - 1),
            equals("fixed-point-orbit-dimension", fixed_dim, sig.n - 2),
            at_most("f-tilde-extraction", ft, 1e-3, points=20),
            equals("SOp-fixed-set", sop, poles),
            equals("SOq-fixed-set", soq, []),
            equals("bundle-SOp-fixed-set", bsop, []),
            equals("bundle-SOq-fixed-set", bsoq, [])]


SUITES: dict[str, Callable[[SuiteConfig], list]] = {
    "action-axiom": action_axiom,
    "k-extension": k_extension,
    "boost-projector": boost_projector,
    "charts": charts,
    "bundle": bundle,
    "uchida": uchida,
    "orbit-census": orbit_census,
}


# older name of the boost-projector suite, still accepted on the command line
ALIASES = {"eq10": "boost-projector"}


def run_suite(name: str, cfg: SuiteConfig) -> list:
    name = ALIASES.get(name, name)
    if name == "all":
        return [c for fn in SUITES.values() for c in fn(cfg)]
    if name not in SUITES:
        raise UsageError(f"--suite: unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    return SUITES[name](cfg)


def check_dicts(checks: list) -> list:
    return [c.as_dict() for c in checks]


__all__ = ["Check", "SuiteConfig", "SUITES", "run_suite", "check_dicts", "cross_ratio",
           "covering_defect", "decomposition_margin"]
