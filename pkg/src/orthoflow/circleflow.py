"""Analytic flows on the circle with hyperbolic fixed points.

Two parametric families are provided:

* ``BasicJ1``   g(phi) = -(2/n) sin(phi) (1 + a sin(phi)), zeros {0, pi}
* ``BasicJ1J2`` g(phi) = (1/n) cos(2 phi) (1 + a cos(2 phi)), zeros {pi/4 + k pi/2}

Both fields have a closed-form antiderivative of 1/g on every open arc
between consecutive zeros.  That antiderivative (the *clock* of the arc,
normalized to vanish at the arc's center) conjugates the flow to a
translation, so ``flow_map`` is exact up to the inversion of one monotone
scalar equation.  An adaptive Runge-Kutta integrator is kept as an
independent route and as a test oracle.

Points near the ends of an arc are handled in the log-coordinate
``ell = atanh(sin(m * delta))`` where delta is the offset from the arc
center (m = 1 or 2); (cos, sin) of the point are recovered from ell with
hyperbolic functions, which keeps relative accuracy close to fixed points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import scipy.integrate

from .errors import (AtFixedPoint, BadInputFlow, BadParameters, DifferentArcs,
                     IntegrationFailure, KindMismatch, NonCancellingResidues, WrongKind)
from .numkit import DEFAULT_TOL, Tolerances

BASIC_J1 = "BasicJ1"
BASIC_J1J2 = "BasicJ1J2"
KINDS = (BASIC_J1, BASIC_J1J2)

TWO_PI = 2.0 * math.pi
_SNAP = 1e-14  # angle inputs this close to a zero are treated as the zero


def wrap(phi: float) -> float:
    """Angle reduced to [0, 2 pi)."""
    out = math.fmod(phi, TWO_PI)
    if out < 0:
        out += TWO_PI
    if out >= TWO_PI:
        out -= TWO_PI
    return out


def angle_dist(x: float, y: float) -> float:
    d = abs(wrap(x) - wrap(y))
    return min(d, TWO_PI - d)


def _atanh_robust(x: float, one_minus_absx: float) -> float:
    """atanh(x) given an accurately computed 1 - |x|."""
    if abs(x) <= 0.5:
        return math.atanh(x)
    if one_minus_absx <= 0.0:
        return math.copysign(math.inf, x)
    return math.copysign(0.5 * math.log((1.0 + abs(x)) / one_minus_absx), x)


def _sech(x: float) -> float:
    ax = abs(x)
    if ax > 700:
        return 2.0 * math.exp(-ax) if ax < 745 else 0.0
    return 1.0 / math.cosh(x)


@dataclass(frozen=True)
class ProjectivePoint:
    """Point [a:b] of RP^1 with canonical unit representative (b > 0, or b = 0 and a > 0)."""
    a: float
    b: float

    @staticmethod
    def of(a: float, b: float) -> "ProjectivePoint":
        r = math.hypot(a, b)
        if r == 0.0 or not math.isfinite(r):
            raise ValueError("[0:0] is not a projective point")
        a, b = a / r, b / r
        if b < 0 or (b == 0 and a < 0):
            a, b = -a, -b
        return ProjectivePoint(a + 0.0, b + 0.0)

    @staticmethod
    def from_angle(psi: float) -> "ProjectivePoint":
        return ProjectivePoint.of(math.cos(psi), math.sin(psi))

    @property
    def angle(self) -> float:
        """Parameter in [0, pi) with [cos : sin] = self."""
        t = math.atan2(self.b, self.a)
        return t if t < math.pi else t - math.pi

    def distance(self, other: "ProjectivePoint") -> float:
        d = abs(self.angle - other.angle)
        return min(d, math.pi - d)

    def transport(self, theta: float) -> "ProjectivePoint":
        """Hyperbolic transport [a ch + b sh : a sh + b ch]."""
        ch, sh = math.cosh(theta), math.sinh(theta)
        return ProjectivePoint.of(self.a * ch + self.b * sh, self.a * sh + self.b * ch)

    def __iter__(self):
        yield self.a
        yield self.b


@dataclass(frozen=True)
class Arc:
    index: int
    center: float
    lower: float  # fixed point reached as the local offset decreases
    upper: float
    sign: int     # the field near the center is c_J * sign * cos(m delta) (...)

    def contains(self, phi: float) -> bool:
        lo = self.lower
        d = wrap(phi - lo)
        return 0.0 < d < wrap(self.upper - lo) or (self.upper == lo + TWO_PI and 0 < d)


def _kepler(y: float, sin_y: float, cos_y: float, b: float) -> float:
    """E(y) with dE/dy = sqrt(1-b^2)/(1 + b cos y), E(0) = 0, continuous."""
    if b == 0.0:
        return y
    beta = b / (1.0 + math.sqrt(1.0 - b * b))
    return y - 2.0 * math.atan(beta * sin_y / (1.0 + beta * cos_y))


@dataclass(frozen=True)
class CircleFlow:
    kind: str
    n: int
    a: float
    report: dict = field(default_factory=dict, compare=False, repr=False)

    # --- vector field -----------------------------------------------------
    @property
    def _m(self) -> int:
        return 1 if self.kind == BASIC_J1 else 2

    @property
    def _cj(self) -> float:
        return -2.0 / self.n if self.kind == BASIC_J1 else 1.0 / self.n

    def field(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == BASIC_J1:
            s = np.sin(phi)
            out = -(2.0 / self.n) * s * (1.0 + self.a * s)
        else:
            c2 = np.cos(2.0 * phi)
            out = (1.0 / self.n) * c2 * (1.0 + self.a * c2)
        return float(out) if out.ndim == 0 else out

    def field_derivative(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.kind == BASIC_J1:
            s, c = np.sin(phi), np.cos(phi)
            out = -(2.0 / self.n) * c * (1.0 + 2.0 * self.a * s)
        else:
            c2, s2 = np.cos(2.0 * phi), np.sin(2.0 * phi)
            out = -(2.0 / self.n) * s2 * (1.0 + 2.0 * self.a * c2)
        return float(out) if out.ndim == 0 else out

    def fixed_points(self) -> tuple:
        if self.kind == BASIC_J1:
            return (0.0, math.pi)
        return tuple(math.pi / 4 + k * math.pi / 2 for k in range(4))

    def jacobians(self) -> tuple:
        return tuple(float(self.field_derivative(z)) for z in self.fixed_points())

    def arcs(self) -> tuple:
        if self.kind == BASIC_J1:
            return (Arc(0, math.pi / 2, math.pi, 0.0, +1),
                    Arc(1, 3 * math.pi / 2, TWO_PI, math.pi, -1))
        q = math.pi / 4
        return (Arc(0, 0.0, -q + TWO_PI, q, +1),
                Arc(1, math.pi / 2, 3 * q, q, -1),
                Arc(2, math.pi, 3 * q, 5 * q, +1),
                Arc(3, 3 * math.pi / 2, 7 * q, 5 * q, -1))

    # --- local coordinates --------------------------------------------------
    def locate_cs(self, c: float, s: float):
        """Return (arc index, ell) for the unit vector (c, s); arc None at a zero."""
        r = math.hypot(c, s)
        c, s = c / r, s / r
        if self.kind == BASIC_J1:
            if abs(s) <= _SNAP:
                return None, (math.inf if c > 0 else -math.inf)
            if s > 0:
                return 0, _atanh_robust(-c, s * s / (1.0 + abs(c)))
            return 1, _atanh_robust(c, s * s / (1.0 + abs(c)))
        c2 = (c - s) * (c + s)
        if abs(c2) <= _SNAP:
            return None, 0.0
        if c2 > 0:
            idx, eps = (0, 1) if c > 0 else (2, 1)
        else:
            idx, eps = (1, -1) if s > 0 else (3, -1)
        x = eps * 2.0 * c * s
        return idx, _atanh_robust(x, (abs(c) - abs(s)) ** 2)

    def cs_from_ell(self, arc: int, ell: float):
        t = math.tanh(ell)
        h = _sech(ell)
        if self.kind == BASIC_J1:
            return (-t, h) if arc == 0 else (t, -h)
        cd = math.sqrt(0.5 * (1.0 + h))
        sd = t / (2.0 * cd)
        return [(cd, sd), (-sd, cd), (-cd, -sd), (sd, -cd)][arc]

    def clock_from_ell(self, arc: int, ell: float) -> float:
        if math.isinf(ell):
            sign = self.arcs()[arc].sign
            return math.copysign(math.inf, ell / (self._cj * sign))
        sign = self.arcs()[arc].sign
        b = self.a * sign
        t = math.tanh(ell)
        h = _sech(ell)
        y = math.atan2(t, h)
        E = _kepler(y, t, h, b)
        val = ell - b * E / math.sqrt(1.0 - b * b)
        return val / (self._cj * sign * self._m)

    def ell_from_clock(self, arc: int, tau: float) -> float:
        sign = self.arcs()[arc].sign
        b = self.a * sign
        target = self._cj * sign * self._m * tau
        if math.isinf(target):
            return target
        rb = math.sqrt(1.0 - b * b)
        spread = abs(b) * math.pi / rb + 1.0
        lo, hi = target - spread, target + spread
        if abs(target) < 1.0:
            ell = target * (1.0 + b)
        else:
            y_end = math.copysign(math.pi / 2, target)
            ell = target + b * _kepler(y_end, math.sin(y_end), 0.0, b) / rb
        ell = min(max(ell, lo), hi)
        for _ in range(200):
            t = math.tanh(ell)
            h = _sech(ell)
            y = math.atan2(t, h)
            r = ell - b * _kepler(y, t, h, b) / rb - target
            if r == 0.0:
                return ell
            if r > 0:
                hi = ell
            else:
                lo = ell
            new = ell - r * (1.0 + b * h)
            if not lo < new < hi:
                new = 0.5 * (lo + hi)
            if abs(new - ell) <= 2e-16 * max(1.0, abs(ell)):
                return new
            ell = new
        return ell

    def center_slope(self, arc: int) -> float:
        """d(clock)/d(ell) at the center of an arc."""
        sign = self.arcs()[arc].sign
        return 1.0 / ((1.0 + self.a * sign) * self._cj * sign * self._m)

    # --- clocks and flow --------------------------------------------------
    def clock_cs(self, c: float, s: float):
        """(arc index, clock) of a point; (None, +-inf) at a zero."""
        arc, ell = self.locate_cs(c, s)
        if arc is None:
            return None, ell
        return arc, self.clock_from_ell(arc, ell)

    def clock(self, phi: float):
        z = self._snap(phi)
        if z is not None:
            return None, self._fixed_f_sign(z) * math.inf
        return self.clock_cs(math.cos(phi), math.sin(phi))

    def point_at_clock_cs(self, arc: int, tau: float):
        return self.cs_from_ell(arc, self.ell_from_clock(arc, tau))

    def point_at_clock(self, arc: int, tau: float) -> float:
        c, s = self.point_at_clock_cs(arc, tau)
        return wrap(math.atan2(s, c))

    def _snap(self, phi: float):
        for z in self.fixed_points():
            if angle_dist(phi, z) <= _SNAP:
                return z
        return None

    def _fixed_f_sign(self, z: float) -> float:
        if self.kind == BASIC_J1:
            return 1.0 if math.cos(z) > 0 else -1.0
        return 1.0 if math.sin(2 * z) > 0 else -1.0

    def flow_cs(self, theta: float, c: float, s: float):
        arc, ell = self.locate_cs(c, s)
        if arc is None or theta == 0.0:
            r = math.hypot(c, s)
            return c / r, s / r
        tau = self.clock_from_ell(arc, ell)
        return self.point_at_clock_cs(arc, tau + theta)

    def flow_map(self, theta: float, phi: float, method: str = "clock",
                 tol: Tolerances = DEFAULT_TOL) -> float:
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise BadParameters("flow_map needs finite inputs")
        if self._snap(phi) is not None or theta == 0.0:
            return wrap(phi)
        if method == "ode":
            return wrap(integrate_field(self.field, theta, phi, tol.ode))
        if method != "clock":
            raise ValueError(f"unknown method {method!r}")
        c, s = self.flow_cs(theta, math.cos(phi), math.sin(phi))
        return wrap(math.atan2(s, c))


def make_flow(kind: str, n: int = 1, a: float = 0.0) -> CircleFlow:
    """Build and validate a member of one of the two families."""
    if kind not in KINDS:
        raise BadParameters(f"kind must be one of {KINDS}")
    if int(n) != n or n < 1:
        raise BadParameters("n must be a positive integer")
    if not (math.isfinite(a) and abs(a) < 1):
        raise BadParameters("need |a| < 1")
    flow = CircleFlow(kind, int(n), float(a))
    return replace(flow, report=validate_flow(flow))


def validate_flow(flow: CircleFlow, samples: int = 720) -> dict:
    """Numerical validation of the family invariants."""
    phis = np.linspace(0.0, TWO_PI, samples, endpoint=False) + 1e-3
    g = flow.field(phis)
    zeros = flow.fixed_points()
    expected = 2.0 / flow.n
    jac = flow.jacobians()
    # sign changes of g on a fine grid locate the zeros
    sc = int(np.sum(np.sign(g) != np.sign(np.roll(g, 1))))
    sym = [float(np.max(np.abs(flow.field(math.pi - phis) - g)))]
    if flow.kind == BASIC_J1J2:
        sym.append(float(np.max(np.abs(flow.field(-phis) - g))))
    avoid = max(abs(float(flow.field(math.pi / 2))), abs(float(flow.field(3 * math.pi / 2))))
    rep = {
        "zeros": list(zeros),
        "zero_count_from_sign_changes": sc,
        "jacobians": list(jac),
        "jacobian_magnitude_error": max(abs(abs(j) - expected) for j in jac),
        "symmetry_residual": max(sym),
        "nonzero_at_poles": avoid > 0 if flow.kind == BASIC_J1 else True,
    }
    rep["ok"] = (sc == len(zeros) and rep["jacobian_magnitude_error"] < 1e-12
                 and rep["symmetry_residual"] < 1e-12 and rep["nonzero_at_poles"])
    return rep


# --- independent ODE route ---------------------------------------------------

def _rk4(fun, y, h):
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0


def integrate_field(fun: Callable[[float], float], theta: float, phi: float,
                    tol: float = 1e-8, max_steps: int = 200000) -> float:
    """Integrate dphi/dtheta = fun(phi) by RK4 with step doubling.

    The local error target is tol/10 per unit of theta; the accepted value
    is the locally extrapolated one.  Rest points (|fun| < 1e-14) are clamped.
    """
    fun_f = lambda y: float(fun(y))  # noqa: E731
    y = float(phi)
    if abs(fun_f(y)) < 1e-14:
        return y
    direction = 1.0 if theta > 0 else -1.0
    remaining = abs(theta)
    h = min(0.05, remaining)
    target = tol / 10.0
    steps = 0
    while remaining > 0:
        h = min(h, remaining)
        full = _rk4(fun_f, y, direction * h)
        half = _rk4(fun_f, _rk4(fun_f, y, direction * h / 2), direction * h / 2)
        err = abs(half - full) / 15.0
        allowed = target * h
        if err <= allowed or h < 1e-12:
            y = half + (half - full) / 15.0
            remaining -= h
            if abs(fun_f(y)) < 1e-14:
                return y
        fac = 4.0 if err == 0 else min(4.0, max(0.1, 0.9 * (allowed / err) ** 0.2))
        h = h * fac
        steps += 1
        if steps > max_steps:
            raise IntegrationFailure("step budget exhausted")
    return y


# --- companion functions -----------------------------------------------------

def f_cs(flow: CircleFlow, c: float, s: float) -> float:
    """f on the slice for a BasicJ1 flow, evaluated at the unit vector (c, s)."""
    if flow.kind != BASIC_J1:
        raise WrongKind("f_of needs a BasicJ1 flow")
    arc, ell = flow.locate_cs(c, s)
    if arc is None:
        return 1.0 if c > 0 else -1.0
    return math.tanh(flow.clock_from_ell(arc, ell))


def f_of(flow: CircleFlow, phi: float) -> float:
    if flow.kind != BASIC_J1:
        raise WrongKind("f_of needs a BasicJ1 flow")
    z = flow._snap(phi)
    if z is not None:
        return flow._fixed_f_sign(z)
    return f_cs(flow, math.cos(phi), math.sin(phi))


def f_tilde_cs(flow: CircleFlow, c: float, s: float) -> ProjectivePoint:
    if flow.kind != BASIC_J1J2:
        raise WrongKind("f_tilde_of needs a BasicJ1J2 flow")
    arc, ell = flow.locate_cs(c, s)
    if arc is None:
        return ProjectivePoint.of(1.0 if c * s > 0 else -1.0, 1.0)
    t = math.tanh(flow.clock_from_ell(arc, ell))
    # arcs centered at +-eps_1 carry [t : 1], arcs centered at +-e_1 carry [1 : t]
    return ProjectivePoint.of(t, 1.0) if arc in (1, 3) else ProjectivePoint.of(1.0, t)


def f_tilde_of(flow: CircleFlow, phi: float) -> ProjectivePoint:
    if flow.kind != BASIC_J1J2:
        raise WrongKind("f_tilde_of needs a BasicJ1J2 flow")
    z = flow._snap(phi)
    if z is not None:
        return ProjectivePoint.of(flow._fixed_f_sign(z), 1.0)
    return f_tilde_cs(flow, math.cos(phi), math.sin(phi))


def inverse_f_cs(flow: CircleFlow, arc: int, value: float):
    """Point on the given arc where f equals value (|value| < 1)."""
    if not abs(value) < 1:
        raise ValueError("f takes values in (-1, 1) on an open arc")
    return flow.point_at_clock_cs(arc, math.atanh(value))


def transit_time(flow, phi_from: float, phi_to: float) -> float:
    """theta with Phi_theta(phi_from) = phi_to; +-inf when phi_to ends the arc."""
    if angle_dist(phi_from, phi_to) == 0.0:
        return 0.0
    arc1, t1 = flow.clock(phi_from)
    if arc1 is None:
        raise AtFixedPoint("phi_from is a fixed point")
    arc2, t2 = flow.clock(phi_to)
    if arc2 is None:
        ar = flow.arcs()[arc1]
        if angle_dist(phi_to, ar.lower) <= _SNAP or angle_dist(phi_to, ar.upper) <= _SNAP:
            # approaching the end of the arc takes infinite time in the direction of the flow
            g_mid = float(flow.field(0.5 * (phi_from + phi_to)))
            return math.inf if (g_mid > 0) == (wrap(phi_to - phi_from) < math.pi) else -math.inf
        raise DifferentArcs("phi_to is a fixed point not bounding the arc of phi_from")
    if arc1 != arc2:
        raise DifferentArcs(f"arc {arc1} vs arc {arc2}")
    return t2 - t1


# --- principal-value invariant -----------------------------------------------

def _neville_at_zero(xs, ys) -> float:
    xs = list(xs)
    P = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            P[i] = ((0 - xs[i + k]) * P[i] + (xs[i] - 0) * P[i + 1]) / (xs[i] - xs[i + k])
    return P[0]


def pv_excised(flow, eps: float) -> float:
    """Integral of 1/g over the circle minus symmetric eps-windows around the zeros."""
    zeros = sorted(flow.fixed_points())
    total = 0.0
    inv = lambda x: 1.0 / float(flow.field(x))  # noqa: E731
    for i, z in enumerate(zeros):
        z_next = zeros[i + 1] if i + 1 < len(zeros) else zeros[0] + TWO_PI
        val, _ = scipy.integrate.quad(inv, z + eps, z_next - eps, epsabs=1e-13,
                                      epsrel=1e-13, limit=500)
        total += val
    return total


def pv_global_invariant(flow, schedule=(1e-2, 1e-3, 1e-4)) -> float:
    """Symmetric principal value of the loop integral of dphi/g, eps -> 0."""
    residues = [1.0 / float(flow.field_derivative(z)) for z in flow.fixed_points()]
    if abs(sum(residues)) > 1e-9 * sum(abs(r) for r in residues):
        raise NonCancellingResidues(f"residue sum {sum(residues):.3e}")
    vals = [pv_excised(flow, e) for e in schedule]
    return float(_neville_at_zero(schedule, vals))


# --- conjugacy -----------------------------------------------------------------

@dataclass
class ConjugacyResult:
    success: bool
    certificate: str | None
    defect: float
    derivative_gaps: list
    psi: Callable[[float], float]
    jacobians: tuple = ()


def _signed_offset(phi: float, z: float) -> float:
    d = wrap(phi - z)
    return d if d <= math.pi else d - TWO_PI


def conjugacy_map(flow_a, flow_b, thetas=None, per_arc: int = 12,
                  tol: Tolerances = DEFAULT_TOL) -> ConjugacyResult:
    """Arcwise conjugacy Psi = clock_B^{-1} o clock_A between two flows of one kind."""
    if flow_a.kind != flow_b.kind:
        raise KindMismatch(f"{flow_a.kind} vs {flow_b.kind}")
    arcs_a = flow_a.arcs()

    def psi(phi: float) -> float:
        arc, tau = flow_a.clock(phi)
        if arc is None:
            za = flow_a._snap(phi)
            idx = list(flow_a.fixed_points()).index(za)
            return flow_b.fixed_points()[idx]
        return flow_b.point_at_clock(arc, tau)

    ja, jb = flow_a.jacobians(), flow_b.jacobians()
    for x, y in zip(ja, jb):
        if abs(x - y) > 1e-9:
            return ConjugacyResult(False, f"Jacobian mismatch {x:g} vs {y:g}", math.nan, [], psi, (ja, jb))

    thetas = np.linspace(-2.0, 2.0, 9) if thetas is None else thetas
    defect = 0.0
    for ar in arcs_a:
        width = wrap(ar.upper - ar.lower) if ar.upper != ar.lower else TWO_PI
        for k in range(1, per_arc + 1):
            phi = wrap(ar.lower + width * k / (per_arc + 1))
            p0 = psi(phi)
            for th in thetas:
                lhs = psi(flow_a.flow_map(float(th), phi))
                rhs = flow_b.flow_map(float(th), p0)
                defect = max(defect, angle_dist(lhs, rhs))

    gaps = []
    steps = (1e-2, 1e-3, 1e-4)
    for za, zb in zip(flow_a.fixed_points(), flow_b.fixed_points()):
        sides = []
        for sgn in (+1.0, -1.0):
            ds = [_signed_offset(psi(wrap(za + sgn * h)), zb) / (sgn * h) for h in steps]
            sides.append(_neville_at_zero(steps, ds))
        gaps.append((za, sides[0], sides[1]))
    worst = max(abs(r - l) for _, r, l in gaps)
    if defect > tol.action:
        return ConjugacyResult(False, f"conjugacy defect {defect:.3e} exceeds {tol.action:g}",
                               defect, gaps, psi, (ja, jb))
    if worst > 1e-3:
        z, r, l = max(gaps, key=lambda t: abs(t[1] - t[2]))
        return ConjugacyResult(False, f"one-sided derivatives disagree at {z:.6f}: {r:.6g} vs {l:.6g}",
                               defect, gaps, psi, (ja, jb))
    return ConjugacyResult(True, None, defect, gaps, psi, (ja, jb))


# --- RP^1 flows and the double-cover lift -----------------------------------------

@dataclass(frozen=True)
class ProjectiveFlow:
    """A flow on RP^1 = R / pi Z, given by a pi-periodic field."""
    field: Callable[[float], float]
    base: CircleFlow | None = None

    def flow_map(self, theta: float, t: float, tol: Tolerances = DEFAULT_TOL) -> float:
        if self.base is not None:
            out = self.base.flow_map(theta, t)
        else:
            out = integrate_field(self.field, theta, t, tol.ode / 10)
        return math.fmod(math.fmod(out, math.pi) + math.pi, math.pi)

    def fixed_points(self, grid: int = 4096) -> tuple:
        ts = np.linspace(0.0, math.pi, grid, endpoint=False)
        g = np.array([float(self.field(t)) for t in ts])
        out = []
        for i in range(grid):
            j = (i + 1) % grid
            if g[i] == 0.0:
                out.append(float(ts[i]))
            elif g[i] * g[j] < 0:
                lo, hi = ts[i], ts[i] + math.pi / grid
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    if float(self.field(lo)) * float(self.field(mid)) <= 0:
                        hi = mid
                    else:
                        lo = mid
                out.append(math.fmod(0.5 * (lo + hi), math.pi))
        return tuple(sorted(out))


def project_to_rp1(flow: CircleFlow) -> ProjectiveFlow:
    if flow.kind != BASIC_J1J2:
        raise BadInputFlow("only antipodally symmetric (BasicJ1J2) flows descend to RP^1")
    return ProjectiveFlow(field=flow.field, base=flow)


@dataclass(frozen=True)
class LiftedFlow:
    """The flow on S^1 obtained from a flow on RP^1 with two fixed points.

    On the component S1 of S^1 minus the preimages {z1, z3} of the first
    fixed point that contains z2, the flow is (pi|S1)^{-1} o Phi' o pi; on the
    other component it is conjugated by the antipodal map.
    """
    base: ProjectiveFlow
    z: tuple            # (z1, z2, z3, z4)
    s1_start: float     # S1 = (s1_start, s1_start + pi)
    kind: str = BASIC_J1J2

    def field(self, phi):
        phi = np.asarray(phi, dtype=float)
        out = np.vectorize(lambda x: float(self.base.field(math.fmod(x, math.pi))))(phi)
        return float(out) if out.ndim == 0 else out

    def field_derivative(self, phi, h: float = 1e-5):
        if self.base.base is not None:
            return self.base.base.field_derivative(phi)
        return (self.field(np.asarray(phi) + h) - self.field(np.asarray(phi) - h)) / (2 * h)

    def fixed_points(self) -> tuple:
        return tuple(sorted(wrap(z) for z in self.z))

    def jacobians(self) -> tuple:
        return tuple(float(self.field_derivative(z)) for z in self.fixed_points())

    def _in_s1(self, phi: float) -> bool:
        d = wrap(phi - self.s1_start)
        return 0.0 < d < math.pi

    def _snap(self, phi: float):
        for z in self.fixed_points():
            if angle_dist(phi, z) <= _SNAP:
                return z
        return None

    def flow_map(self, theta: float, phi: float, tol: Tolerances = DEFAULT_TOL) -> float:
        phi = wrap(phi)
        if self._snap(phi) is not None or theta == 0.0:
            return phi
        if not self._in_s1(phi):
            return wrap(self.flow_map(theta, phi + math.pi, tol) + math.pi)
        t = self.base.flow_map(theta, math.fmod(phi, math.pi), tol)
        # the unique preimage of t inside S1 (closure, for limits at the ends)
        cand = wrap(t)
        if not self._in_s1(cand):
            cand = wrap(t + math.pi)
        if not self._in_s1(cand):
            ends = (self.s1_start, wrap(self.s1_start + math.pi))
            cand = min(ends, key=lambda e: angle_dist(e, phi))
        return cand

    def arcs(self) -> tuple:
        fps = self.fixed_points()
        out = []
        for i, c in enumerate((0.0, math.pi / 2, math.pi, 3 * math.pi / 2)):
            lower = max((z for z in fps if wrap(c - z) < math.pi and wrap(c - z) > 0),
                        key=lambda z: -wrap(c - z))
            upper = min((z for z in fps if 0 < wrap(z - c) < math.pi), key=lambda z: wrap(z - c))
            out.append(Arc(i, c, lower, upper, +1 if i % 2 == 0 else -1))
        return tuple(out)

    def clock(self, phi: float):
        if self._snap(phi) is not None:
            return None, math.inf
        for ar in self.arcs():
            lo = wrap(ar.lower)
            if 0 < wrap(phi - lo) < wrap(ar.upper - lo):
                d = _signed_offset(phi, ar.center)
                val, _ = scipy.integrate.quad(lambda x: 1.0 / float(self.field(ar.center + x)),
                                              0.0, d, epsabs=1e-13, epsrel=1e-13, limit=500)
                return ar.index, val
        raise DifferentArcs("point not on any arc")

    def point_at_clock(self, arc: int, tau: float) -> float:
        return self.flow_map(tau, self.arcs()[arc].center)


def lift_double_cover(flow_rp1: ProjectiveFlow, grid: int = 720) -> LiftedFlow:
    fps = flow_rp1.fixed_points()
    if len(fps) != 2:
        raise BadInputFlow(f"expected 2 fixed points on RP^1, found {len(fps)}")
    ts = np.linspace(0.0, math.pi, grid, endpoint=False) + 1e-3
    eq = max(abs(float(flow_rp1.field(math.pi - t)) - float(flow_rp1.field(t))) for t in ts)
    if eq > 1e-9:
        raise BadInputFlow(f"field is not reversed by [a:b] -> [-a:b] (residual {eq:.2e})")
    z1 = fps[0]
    z2 = wrap(-z1)
    z3 = wrap(z1 + math.pi)
    z4 = wrap(math.pi - z1)
    start = z1 if 0 < wrap(z2 - z1) < math.pi else z3
    return LiftedFlow(base=flow_rp1, z=(z1, z2, z3, z4), s1_start=start)


# --- flow/function pairs -----------------------------------------------------------

@dataclass(frozen=True)
class FlowFunctionPair:
    """A flow on the slice together with its companion function.

    Points of F = S u j2*S are given as (phi, component) where component -1
    labels the j2-image of the slice (the copy with w = -eps_1).
    """
    flow: CircleFlow
    extended: bool = False

    def _check(self, component: int):
        if component not in (1, -1):
            raise ValueError("component must be +1 or -1")
        if component == -1 and not self.extended:
            raise ValueError("pair is not extended to the j2 component")

    def f(self, phi: float, component: int = 1) -> float:
        self._check(component)
        return component * f_of(self.flow, phi)

    def f_cs(self, c: float, s: float, component: int = 1) -> float:
        self._check(component)
        return component * f_cs(self.flow, c, s)

    def f_tilde(self, phi: float) -> ProjectivePoint:
        return f_tilde_of(self.flow, phi)

    def flow_map(self, theta: float, phi: float, component: int = 1) -> float:
        self._check(component)
        return self.flow.flow_map(component * theta, phi)


def make_pair(flow: CircleFlow) -> FlowFunctionPair:
    return FlowFunctionPair(flow)


def extend_to_F(pair: FlowFunctionPair) -> FlowFunctionPair:
    if pair.flow.kind != BASIC_J1:
        raise WrongKind("extension to F is defined for BasicJ1 pairs")
    return replace(pair, extended=True)
