"""The group actions built from a flow/function pair.

Three actions of G = SO°(p,q) are realized here:

* the product action on S^p x S^{q-1} (slice circle {(cos phi e1 + sin phi N, eps1)}),
* the sphere action on S^{p+q-1} built from a four-fixed-point flow (slice {cos phi e1 + sin phi eps1}),
* the action on the twisted product G x_P S^1, P the stabilizer of the null line R(e1 + eps1).

The first two are evaluated by factoring g = k m(theta) u with k in K, m(theta)
a boost and u in the isotropy group of the slice point, then returning
k * Phi_theta(z).  A second, factorization-free route (projectivize, act
linearly, read the point back off the flow's clock) is exposed as the chart
route and is used whenever the factorization is not unique.

Ambient indexing: R^{p+q} has e_1..e_p at 0..p-1 and eps_1..eps_q at p..p+q-1.
Product-sphere points store v in R^{p+1} (pole N at index p) and w in R^q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import Chebyshev

from . import circleflow as cf
from .circleflow import BASIC_J1, BASIC_J1J2, CircleFlow, FlowFunctionPair
from .errors import (CanonicalizationFailure, NoRealRoot, NonUnitInput, NotInP,
                     NumericalAmbiguity, OutsideDomain, OutsideWPlus, Unreachable, WrongKind)
from .numkit import DEFAULT_TOL, Tolerances, rotation_sending
from .sopq import (Signature, _check_so, as_matrix, boost, embed_K, form, group_inverse,
                   stabilizer_algebra, stabilizer_identity_component_test)

FIT_RADIUS = 0.2
FIT_DEGREE = 8  # in r^2
FIT_TARGET = 1e-11


def _flow_of(pair) -> CircleFlow:
    return pair.flow if isinstance(pair, FlowFunctionPair) else pair


def _need(flow: CircleFlow, kind: str):
    if flow.kind != kind:
        raise WrongKind(f"this action needs a {kind} flow, got {flow.kind}")


# --- points ----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProductSpherePoint:
    v: np.ndarray
    w: np.ndarray

    @staticmethod
    def make(v, w, tol: Tolerances = DEFAULT_TOL) -> "ProductSpherePoint":
        v = np.asarray(v, dtype=float)
        w = np.asarray(w, dtype=float)
        if abs(np.linalg.norm(v) - 1) > tol.algebraic or abs(np.linalg.norm(w) - 1) > tol.algebraic:
            raise NonUnitInput("product-sphere coordinates must be unit vectors")
        return ProductSpherePoint(v, w)

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.v, self.w])

    def distance(self, other: "ProductSpherePoint") -> float:
        return max(float(np.linalg.norm(self.v - other.v)), float(np.linalg.norm(self.w - other.w)))


@dataclass(frozen=True, eq=False)
class SpherePoint:
    y: np.ndarray

    @staticmethod
    def make(y, tol: Tolerances = DEFAULT_TOL) -> "SpherePoint":
        y = np.asarray(y, dtype=float)
        if abs(np.linalg.norm(y) - 1) > tol.algebraic:
            raise NonUnitInput("sphere point must be a unit vector")
        return SpherePoint(y)

    def as_vector(self) -> np.ndarray:
        return self.y

    def distance(self, other: "SpherePoint") -> float:
        return float(np.linalg.norm(self.y - other.y))


def slice_point(sig: Signature, c: float, s: float) -> ProductSpherePoint:
    """(c e1 + s N, eps1)."""
    v = np.zeros(sig.p + 1)
    v[0], v[sig.p] = c, s
    w = np.zeros(sig.q)
    w[0] = 1.0
    return ProductSpherePoint(v, w)


def slice_point_at(sig: Signature, phi: float) -> ProductSpherePoint:
    return slice_point(sig, math.cos(phi), math.sin(phi))


def sphere_slice_point(sig: Signature, c: float, s: float) -> SpherePoint:
    y = np.zeros(sig.n)
    y[0], y[sig.p] = c, s
    return SpherePoint(y)


def random_product_point(sig: Signature, rng: np.random.Generator) -> ProductSpherePoint:
    v = rng.standard_normal(sig.p + 1)
    w = rng.standard_normal(sig.q)
    return ProductSpherePoint(v / np.linalg.norm(v), w / np.linalg.norm(w))


def random_sphere_point(sig: Signature, rng: np.random.Generator) -> SpherePoint:
    y = rng.standard_normal(sig.n)
    return SpherePoint(y / np.linalg.norm(y))


# --- K action and slice reduction ------------------------------------------------

def standard_K_act(kappa1, kappa2, x: ProductSpherePoint, tol: Tolerances = DEFAULT_TOL) -> ProductSpherePoint:
    k1 = np.asarray(kappa1, dtype=float)
    k2 = np.asarray(kappa2, dtype=float)
    _check_so(k1, tol, "kappa1")
    _check_so(k2, tol, "kappa2")
    p = k1.shape[0]
    v = np.concatenate([k1 @ x.v[:p], x.v[p:]])
    return ProductSpherePoint(v, k2 @ x.w)


def _split_K(sig: Signature, k):
    K = as_matrix(k)
    return K[:sig.p, :sig.p], K[sig.p:, sig.p:]


def _k_from_directions(sig: Signature, dp, dq) -> np.ndarray:
    """K element with kappa1 e1 = dp/|dp| and kappa2 eps1 = dq/|dq| (identity on a zero block)."""
    e = np.zeros(sig.p)
    e[0] = 1.0
    eq = np.zeros(sig.q)
    eq[0] = 1.0
    np_, nq = np.linalg.norm(dp), np.linalg.norm(dq)
    k1 = rotation_sending(e, dp / np_) if np_ > 1e-300 else np.eye(sig.p)
    k2 = rotation_sending(eq, dq / nq) if nq > 1e-300 else np.eye(sig.q)
    return embed_K(k1, k2)


def point_to_slice(sig: Signature, x: ProductSpherePoint):
    """Return (k0, c, s) with x = k0 * (c e1 + s N, eps1) and c >= 0."""
    v0 = x.v[:sig.p]
    c = float(np.linalg.norm(v0))
    k0 = _k_from_directions(sig, v0 if c >= 1e-12 else np.zeros(sig.p), x.w)
    return k0, c, float(x.v[sig.p])


def point_to_sphere_slice(sig: Signature, y: SpherePoint):
    """Return (k0, c, s) with y = k0 (c e1 + s eps1), c, s >= 0."""
    yp, yq = y.y[:sig.p], y.y[sig.p:]
    c, s = float(np.linalg.norm(yp)), float(np.linalg.norm(yq))
    k0 = _k_from_directions(sig, yp if c >= 1e-12 else np.zeros(sig.p),
                            yq if s >= 1e-12 else np.zeros(sig.q))
    return k0, c, s


def k_act_product(sig: Signature, k, x: ProductSpherePoint) -> ProductSpherePoint:
    k1, k2 = _split_K(sig, k)
    return standard_K_act(k1, k2, x)


# --- rank-one projectors and the trace equation ------------------------------------

def _ab(f) -> tuple:
    if isinstance(f, cf.ProjectivePoint):
        return f.a, f.b
    if isinstance(f, tuple):
        return float(f[0]), float(f[1])
    return float(f), 1.0


@dataclass(frozen=True, eq=False)
class RankOneProjector:
    sig: Signature
    f: object
    mat: np.ndarray


def datum_vector(sig: Signature, f) -> np.ndarray:
    """Unit vector along a e1 + b eps1 for f = [a:b] (a real f means [f:1])."""
    a, b = _ab(f)
    r = math.hypot(a, b)
    w = np.zeros(sig.n)
    w[0], w[sig.p] = a / r, b / r
    return w


def projector(sig: Signature, f) -> RankOneProjector:
    w = datum_vector(sig, f)
    return RankOneProjector(sig, f, np.outer(w, w))


def _s_parts(f):
    """(1+s, 1-s) for s = 2ab/(a^2+b^2), computed without cancellation."""
    a, b = _ab(f)
    r2 = a * a + b * b
    return (a + b) ** 2 / r2, (a - b) ** 2 / r2


def lambda_scale(theta: float, f) -> float:
    onep, onem = _s_parts(f)
    s = 0.5 * (onep - onem)
    return math.cosh(2 * theta) + s * math.sinh(2 * theta)


def lambda_min(f) -> float:
    onep, onem = _s_parts(f)
    return math.sqrt(onep * onem)


@dataclass(frozen=True)
class ThetaRoots:
    thetas: tuple
    boundary: bool
    gap: float  # T - min lambda


def solve_theta(T: float, f, boundary_tol: float = 1e-6) -> ThetaRoots:
    """theta with lambda(theta, f) = T, larger root first."""
    onep, onem = _s_parts(f)
    lmin = math.sqrt(onep * onem)
    gap = T - lmin
    if gap < -boundary_tol * max(1.0, T):
        raise NoRealRoot(f"T = {T:.6g} is below the minimum {lmin:.6g}")
    D = math.sqrt(max(0.0, gap) * (T + lmin))
    out = []
    for u in ((T + D) / onep if onep > 0 else math.inf, onem / (T + D)):
        if math.isfinite(u) and u > 0:
            out.append(0.5 * math.log(u))
    return ThetaRoots(tuple(out), gap <= boundary_tol, gap)


def transport_value(theta: float, f: float) -> float:
    t = math.tanh(theta)
    return (f + t) / (1 + f * t)


# --- factorization g = k m(theta) u --------------------------------------------------

@dataclass
class DecompositionResult:
    k: np.ndarray
    theta: float
    u: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def decompose(sig: Signature, g, f, tol: Tolerances = DEFAULT_TOL) -> DecompositionResult:
    """Factor g = k m(theta) u with u in the identity component of Stab(a e1 + b eps1).

    Candidates come from both roots of the trace equation and both signs of the
    rank-one direction; k is fixed by kappa1 e1 = sigma r_p/|r_p|,
    kappa2 eps1 = sigma r_q/|r_q| for r = g w/|g w|, which singles out the
    factorization whose transported datum has both coordinates of one sign.
    """
    G = as_matrix(g)
    w = datum_vector(sig, f)
    y = G @ w
    T = float(y @ y)
    roots = solve_theta(T, f)
    diag = {"T": T, "gap": roots.gap, "roots": list(roots.thetas), "candidates": []}
    if roots.boundary:
        raise OutsideWPlus(f"trace equation has a double root (gap {roots.gap:.3e})")
    r = y / math.sqrt(T)
    best = []
    for th in roots.thetas:
        for sigma in (1.0, -1.0):
            k = _k_from_directions(sig, sigma * r[:sig.p], sigma * r[sig.p:])
            u = boost(sig, -th) @ k.T @ G
            res = float(np.linalg.norm(u @ w - w)) / max(1.0, float(np.linalg.norm(u, 2)))
            ok = res <= tol.action and stabilizer_identity_component_test(sig, u, w, tol)
            diag["candidates"].append({"theta": th, "sigma": sigma, "residual": res, "accepted": bool(ok)})
            best.append((res, ok, th, k, u))
    accepted = [b for b in best if b[1]]
    ranked = sorted(best, key=lambda b: b[0])
    diag["runner_up_residual"] = ranked[1][0]
    if not accepted:
        raise OutsideWPlus("no branch stabilizes the slice datum")
    if len(accepted) > 1:
        a0, a1 = sorted(accepted, key=lambda b: b[0])[:2]
        if a1[0] < 10 * max(a0[0], 1e-300):
            raise NumericalAmbiguity(f"two branches accepted ({a0[0]:.2e}, {a1[0]:.2e})")
    res, _, th, k, u = min(accepted, key=lambda b: b[0])
    diag["residual"] = res
    diag["accepted_count"] = len(accepted)
    diag["reconstruction"] = float(np.linalg.norm(k @ boost(sig, th) @ u - G) / max(1.0, np.linalg.norm(G)))
    return DecompositionResult(k, th, u, diag)


def conjugation_identity_check(sig: Signature, theta: float, f: float, pair=None,
                               tol: Tolerances = DEFAULT_TOL) -> dict:
    """Residuals of the boost/projector identity and of the isotropy transport.

    m P(f) m = lambda P(f') with f' the transported value, and
    m(theta) h_f m(-theta) = h_{f'} (checked on a basis of h_f).  The reverse
    orientation m(-theta) h_f m(theta) is reported for comparison; it is not
    contained in h_{f'} for theta != 0.
    """
    if pair is None:
        f2 = transport_value(theta, f)
    else:
        flow = _flow_of(pair)
        c, s = cf.inverse_f_cs(flow, 0, f)
        c2, s2 = flow.flow_cs(theta, c, s)
        f2 = cf.f_cs(flow, c2, s2)
    m = boost(sig, theta)
    minv = boost(sig, -theta)
    lhs = m @ projector(sig, f).mat @ m
    rhs = lambda_scale(theta, f) * projector(sig, f2).mat
    w2 = datum_vector(sig, f2)
    basis = stabilizer_algebra(sig, datum_vector(sig, f), tol).matrices()
    fwd = max(float(np.linalg.norm((m @ X @ minv) @ w2)) for X in basis)
    rev = max(float(np.linalg.norm((minv @ X @ m) @ w2)) for X in basis)
    return {"projector": float(np.linalg.norm(lhs - rhs)), "isotropy": fwd,
            "isotropy_reverse_orientation": rev, "f_transported": f2}


# --- even-function fits for the chart maps -------------------------------------------

@dataclass(frozen=True, eq=False)
class EvenFit:
    """Chebyshev fit of an even function h(r) in the variable r^2 on [0, radius]."""
    poly: Chebyshev
    radius: float
    residual: float

    def __call__(self, r: float) -> float:
        return float(self.poly(r * r))


def _even_fit(func, radius: float = FIT_RADIUS, degree: int = FIT_DEGREE,
              target: float = FIT_TARGET) -> EvenFit:
    """Fit on the largest radius in a halving schedule whose residual meets target."""
    best = None
    while radius >= 1e-3:
        k = np.arange(4 * degree)
        nodes = radius * np.cos(0.5 * math.pi * (k + 0.5) / len(k))  # strictly inside (0, radius]
        vals = np.array([func(float(r)) for r in nodes])
        poly = Chebyshev.fit(nodes ** 2, vals, degree, domain=[0.0, radius ** 2])
        check = np.linspace(radius / 50, radius, 41)
        resid = float(max(abs(poly(r * r) - func(float(r))) for r in check))
        best = EvenFit(poly, radius, resid)
        if resid <= target:
            break
        radius *= 0.5
    return best


@lru_cache(maxsize=256)
def _fits(kind: str, n: int, a: float, arc: int):
    """Fits of the even ratios used near the arc center.

    forward(c) = f / c on the slice (for F0);
    inverse(r) = (odd coordinate of the point with f = r) / r (for F1).
    """
    flow = CircleFlow(kind, n, a)
    if kind == BASIC_J1:
        sgn = 1.0 if arc == 0 else -1.0
        fwd = lambda c: cf.f_cs(flow, c, sgn * math.sqrt(1 - c * c)) / c  # noqa: E731
        inv = lambda r: flow.point_at_clock_cs(arc, math.atanh(r))[0] / r  # noqa: E731
        return _even_fit(fwd), _even_fit(inv)
    odd = 0 if arc in (1, 3) else 1
    inv = lambda r: flow.point_at_clock_cs(arc, math.atanh(r))[odd] / r  # noqa: E731
    return None, _even_fit(inv)


def chart_fit_residuals(pair) -> dict:
    """Fit residual and radius of every even-function fit used by the charts."""
    flow = _flow_of(pair)
    out = {}
    for arc in (0, 1):
        fwd, inv = _fits(flow.kind, flow.n, flow.a, arc)
        if fwd is not None:
            out[f"forward_arc{arc}"] = (fwd.residual, fwd.radius)
        out[f"inverse_arc{arc}"] = (inv.residual, inv.radius)
    return out


def _forward_ratio(flow: CircleFlow, arc: int, c: float, s: float) -> float:
    """f / c at slice point (c, s)."""
    fit = _fits(flow.kind, flow.n, flow.a, arc)[0]
    if c >= fit.radius:
        return cf.f_cs(flow, c, s) / c
    return fit(c)


def _inverse_ratio(flow: CircleFlow, arc: int, r: float, tau: float) -> tuple:
    """(odd coordinate / r, even coordinate) of the arc point with companion value r."""
    c, s = flow.point_at_clock_cs(arc, tau)
    if flow.kind == BASIC_J1:
        odd, even = c, s
    else:
        odd, even = (c, s) if arc in (1, 3) else (s, c)
    fit = _fits(flow.kind, flow.n, flow.a, arc)[1]
    if r >= fit.radius:
        return odd / r, even
    return fit(r), even


def _atanh_ratio(num: float, den: float, qform: float | None) -> float:
    """atanh(num/den) for 0 <= num < den; qform = den^2 - num^2 if known more accurately."""
    if qform is None:
        qform = (den - num) * (den + num)
    if qform <= 0:
        raise OutsideDomain("point is not strictly inside the chart")
    return 0.5 * math.log((den + num) ** 2 / qform)


# --- product-sphere action ------------------------------------------------------------

def _slice_arc(s: float) -> int:
    return 0 if s > 0 else 1


def chart_F0(sig: Signature, x: ProductSpherePoint, pair) -> SpherePoint:
    """(f v0/|v0| + w)/sqrt(1 + f^2) for x off the closed orbit."""
    flow = _flow_of(pair)
    _need(flow, BASIC_J1)
    s = float(x.v[sig.p])
    v0 = x.v[:sig.p]
    c = float(np.linalg.norm(v0))
    if s == 0.0 or cf.f_cs(flow, c, s) >= 1.0:
        raise OutsideDomain("F0 is defined off the closed orbit")
    f = cf.f_cs(flow, c, s)
    G = _forward_ratio(flow, _slice_arc(s), c, s)
    y = np.concatenate([G * v0, x.w]) / math.sqrt(1 + f * f)
    return SpherePoint(y)


def chart_F1(sig: Signature, y: SpherePoint, pair, arc: int = 0, qform: float | None = None) -> ProductSpherePoint:
    """Inverse of F0 on O^1 = {|y_p| < |y_q|}; arc 1 lands on the mirrored orbit."""
    flow = _flow_of(pair)
    _need(flow, BASIC_J1)
    yp, yq = y.y[:sig.p], y.y[sig.p:]
    a, b = float(np.linalg.norm(yp)), float(np.linalg.norm(yq))
    if not a < b:
        raise OutsideDomain("F1 needs |x-part| < |y-part|")
    r = a / b
    tau = _atanh_ratio(a, b, qform)
    H, even = _inverse_ratio(flow, arc, r, tau)
    v = np.concatenate([H * yp / b, [even]])
    return ProductSpherePoint(v, yq / b)


def projective_act(g, y: SpherePoint) -> SpherePoint:
    z = as_matrix(g) @ y.y
    return SpherePoint(z / np.linalg.norm(z))


def act_via_chart(sig: Signature, g, x: ProductSpherePoint, pair) -> ProductSpherePoint:
    """F1(g . F0(x)) with the form value carried exactly through the linear step."""
    flow = _flow_of(pair)
    s = float(x.v[sig.p])
    if s == 0.0:
        raise OutsideDomain("closed orbit is not covered by the charts")
    c = float(np.linalg.norm(x.v[:sig.p]))
    arc, ell = flow.locate_cs(c, s)
    if arc is None:
        raise OutsideDomain("closed orbit is not covered by the charts")
    tau = flow.clock_from_ell(arc, ell)
    y0 = chart_F0(sig, x, pair)
    gy = as_matrix(g) @ y0.y
    nrm2 = float(gy @ gy)
    # form value of F0(x) is (1 - f^2)/(1 + f^2) = 1/cosh(2 tau)
    q = 1.0 / (math.cosh(2 * tau) * nrm2)
    return chart_F1(sig, SpherePoint(gy / math.sqrt(nrm2)), pair, arc, qform=q)


def _closed_orbit_act(sig: Signature, g, k0, sign_c: float) -> ProductSpherePoint:
    y = as_matrix(g) @ k0 @ datum_vector(sig, sign_c)
    yp, yq = y[:sig.p], y[sig.p:]
    v = np.concatenate([yp / np.linalg.norm(yp), [0.0]])
    return ProductSpherePoint(v, yq / np.linalg.norm(yq))


def act_product(sig: Signature, g, x: ProductSpherePoint, pair, tol: Tolerances = DEFAULT_TOL,
                route: str = "auto") -> ProductSpherePoint:
    """g * x on S^p x S^{q-1}: factor g k0 = k m(theta) u and return k * Phi_theta(z)."""
    flow = _flow_of(pair)
    _need(flow, BASIC_J1)
    k0, c, s = point_to_slice(sig, x)
    if route == "chart":
        return act_via_chart(sig, g, x, pair)
    f = cf.f_cs(flow, c, s)
    try:
        dec = decompose(sig, as_matrix(g) @ k0, f, tol)
    except (OutsideWPlus, NumericalAmbiguity):
        if route == "decompose":
            raise
        arc, _ = flow.locate_cs(c, s)
        if arc is not None:
            return act_via_chart(sig, g, x, pair)
        if abs(f) == 1.0:
            return _closed_orbit_act(sig, g, k0, f)
        raise Unreachable("neither the factorization nor the charts apply")
    c2, s2 = flow.flow_cs(dec.theta, c, s)
    return k_act_product(sig, dec.k, slice_point(sig, c2, s2))


# --- sphere action from a four-fixed-point flow -----------------------------------------

def _sphere_datum(flow: CircleFlow, c: float, s: float):
    """Representative (a, b) of the companion value with the sign convention of its arc."""
    arc, ell = flow.locate_cs(c, s)
    if arc is None:
        return None, (1.0 if c * s > 0 else -1.0, 1.0)
    t = math.tanh(flow.clock_from_ell(arc, ell))
    return arc, ((t, 1.0) if arc in (1, 3) else (1.0, t))


def act_sphere(sig: Signature, g, y: SpherePoint, pair, tol: Tolerances = DEFAULT_TOL,
               route: str = "auto") -> SpherePoint:
    flow = _flow_of(pair)
    _need(flow, BASIC_J1J2)
    k0, c, s = point_to_sphere_slice(sig, y)
    if route == "direct":
        return act_sphere_direct(sig, g, y, pair)
    _, ab = _sphere_datum(flow, c, s)
    try:
        dec = decompose(sig, as_matrix(g) @ k0, ab, tol)
    except (OutsideWPlus, NumericalAmbiguity):
        if route == "decompose":
            raise
        return act_sphere_direct(sig, g, y, pair)
    c2, s2 = flow.flow_cs(dec.theta, c, s)
    z = np.zeros(sig.n)
    z[0], z[sig.p] = c2, s2
    return SpherePoint(dec.k @ z)


def act_sphere_direct(sig: Signature, g, y: SpherePoint, pair) -> SpherePoint:
    """Factorization-free route: transport the datum linearly and read the point off the clock."""
    flow = _flow_of(pair)
    _need(flow, BASIC_J1J2)
    yp, yq = y.y[:sig.p], y.y[sig.p:]
    c, s = float(np.linalg.norm(yp)), float(np.linalg.norm(yq))
    arc, ab = _sphere_datum(flow, c, s)
    # k0 (a e1 + b eps1) written without dividing by a vanishing block norm
    if arc is None:
        datum = np.concatenate([yp / c, yq / s])
    elif arc in (1, 3):
        datum = np.concatenate([(ab[0] / c if c > 0 else 0.0) * yp, yq / s])
    else:
        datum = np.concatenate([yp / c, (ab[1] / s if s > 0 else 0.0) * yq])
    z = as_matrix(g) @ datum
    zp, zq = z[:sig.p], z[sig.p:]
    A, B = float(np.linalg.norm(zp)), float(np.linalg.norm(zq))
    if arc is None:
        return SpherePoint(np.concatenate([zp / A, zq / B]) / math.sqrt(2))
    # the form value of the datum is preserved by g
    q0 = (datum[sig.p:] @ datum[sig.p:]) - (datum[:sig.p] @ datum[:sig.p])
    if arc in (1, 3):
        tau = _atanh_ratio(A, B, q0)
        H, even = _inverse_ratio(flow, 1, A / B, tau)
        out = np.concatenate([H * zp / B, even * zq / B])
    else:
        tau = _atanh_ratio(B, A, -q0)
        H, even = _inverse_ratio(flow, 0, B / A, tau)
        out = np.concatenate([even * zp / A, H * zq / A])
    return SpherePoint(out)


# --- twisted product G x_P S^1 ---------------------------------------------------------

def null_datum(sig: Signature) -> np.ndarray:
    v = np.zeros(sig.n)
    v[0] = v[sig.p] = 1.0
    return v


def bundle_pi(sig: Signature, pelem, tol: Tolerances = DEFAULT_TOL) -> float:
    """log |c| where pelem (e1 + eps1) = c (e1 + eps1)."""
    P = as_matrix(pelem)
    v = null_datum(sig)
    y = P @ v
    c = 0.5 * float(y @ v)
    if not abs(c) > 0 or np.linalg.norm(y - c * v) > tol.algebraic * max(1.0, np.linalg.norm(y)):
        raise NotInP("element does not preserve the null line R(e1 + eps1)")
    idx = 0 if abs(y[0]) >= abs(y[sig.p]) else sig.p
    return math.log(abs(float(y[idx])))


@dataclass(frozen=True, eq=False)
class BundlePoint:
    g: np.ndarray
    phi: float


def _bundle_reduce(sig: Signature, g):
    """(y_p/|y_p|, y_q/|y_q|, theta) for y = g (e1 + eps1); sign fixed on y_p."""
    G = as_matrix(g)
    y = G @ null_datum(sig)
    yp, yq = y[:sig.p], y[sig.p:]
    a, b = float(np.linalg.norm(yp)), float(np.linalg.norm(yq))
    if a == 0.0 or abs(a - b) > 1e-8 * max(a, b):
        raise CanonicalizationFailure("g does not map the null datum to a null vector")
    dp, dq = yp / a, yq / b
    j = int(np.argmax(np.abs(dp) > 1e-12))
    if dp[j] < 0:
        dp, dq = -dp, -dq
    return dp, dq, 0.5 * (math.log(a) + math.log(b))


def bundle_canonical(sig: Signature, pt: BundlePoint, flow: CircleFlow) -> BundlePoint:
    """[g, phi] = [k, Phi_{pi(p)}(phi)] for g = k p, k in K, p in P."""
    dp, dq, theta = _bundle_reduce(sig, pt.g)
    k = _k_from_directions(sig, dp, dq)
    return BundlePoint(k, flow.flow_map(theta, pt.phi))


def bundle_act(sig: Signature, g, pt: BundlePoint, flow: CircleFlow) -> BundlePoint:
    return bundle_canonical(sig, BundlePoint(as_matrix(g) @ pt.g, pt.phi), flow)


def bundle_eq(sig: Signature, pt1: BundlePoint, pt2: BundlePoint, flow: CircleFlow,
              tol: Tolerances = DEFAULT_TOL) -> bool:
    h = group_inverse(sig, pt2.g) @ pt1.g
    try:
        th = bundle_pi(sig, h, Tolerances(algebraic=1e-8))
    except NotInP:
        return False
    return cf.angle_dist(flow.flow_map(th, pt1.phi), pt2.phi) <= tol.ode


def bundle_embed(sig: Signature, pt: BundlePoint, flow: CircleFlow) -> np.ndarray:
    """Injective coordinates (vec(dp dq^T), cos phi', sin phi') of a bundle point."""
    dp, dq, theta = _bundle_reduce(sig, pt.g)
    phi = flow.flow_map(theta, pt.phi)
    return np.concatenate([np.outer(dp, dq).ravel(), [math.cos(phi), math.sin(phi)]])


# --- swapped roles ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SwapAdapter:
    """Runs the product construction for SO°(q,p) on S^q x S^{p-1} in SO°(p,q) coordinates.

    The block swap Pi sends the form diag(-I_p, I_q) to diag(I_q, -I_p) = -I_{q,p};
    the overall sign does not change the group, so g -> Pi g Pi^T maps SO°(p,q)
    onto SO°(q,p).
    """
    sig: Signature
    swapped: Signature
    perm: np.ndarray
    form_sign: int = -1

    def conj(self, g) -> np.ndarray:
        return self.perm @ as_matrix(g) @ self.perm.T

    def act(self, g, w, v, pair):
        """Act on (w, v) in S^{p-1} x S^q; returns the image pair."""
        x = ProductSpherePoint(np.asarray(v, float), np.asarray(w, float))
        out = act_product(self.swapped, self.conj(g), x, pair)
        return out.w, out.v


def swap_roles_adapter(sig: Signature) -> SwapAdapter:
    n, p = sig.n, sig.p
    order = list(range(p, n)) + list(range(p))
    perm = np.eye(n)[order]
    return SwapAdapter(sig, Signature(sig.q, sig.p), perm)


def form_value(sig: Signature, y) -> float:
    return form(sig, np.asarray(y, float))
