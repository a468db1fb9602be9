"""Numerical orbit analysis for the constructed actions.

Orbit dimensions come from the rank of the infinitesimal generator fields
(central differences with one Richardson step), isotropy algebras from their
kernel, and the companion value [a:b] at a slice point from the unique
stabilizer algebra h_[a:b] contained in the isotropy algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import scipy.optimize

from . import action_engine as ae
from .circleflow import ProjectivePoint
from .errors import EvaluatorFailure, IllConditioned, NoContainment, OrthoflowError, UnknownOrbit
from .numkit import DEFAULT_TOL, Tolerances, containment_angle, matrix_exp, null_space, rank_report
from .sopq import (Signature, Subalgebra, algebra_basis, embed_K, form, involution, random_so,
                   stabilizer_algebra)

PRODUCT, SPHERE, BUNDLE = "ProductSphere", "Sphere", "Bundle"

OPEN, CLOSED_PNULL, NULLCONE, UNKNOWN = "Open", "ClosedPnull", "Nullcone", "Unknown"
STAB_SOPQ1, STAB_SOP1Q = "StabSOpq1", "StabSOp1q"


@dataclass(frozen=True)
class ActionHandle:
    evaluator: Callable[[np.ndarray, Any], Any]
    point_space: str
    sig: Signature
    embed: Callable[[Any], np.ndarray]
    slice_point: Callable[[float], Any]


def product_action(sig: Signature, pair) -> ActionHandle:
    return ActionHandle(lambda g, x: ae.act_product(sig, g, x, pair), PRODUCT, sig,
                        lambda x: x.as_vector(), lambda phi: ae.slice_point_at(sig, phi))


def sphere_action(sig: Signature, pair) -> ActionHandle:
    return ActionHandle(lambda g, y: ae.act_sphere(sig, g, y, pair), SPHERE, sig,
                        lambda y: y.as_vector(),
                        lambda phi: ae.sphere_slice_point(sig, math.cos(phi), math.sin(phi)))


def bundle_action(sig: Signature, flow) -> ActionHandle:
    return ActionHandle(lambda g, pt: ae.bundle_act(sig, g, pt, flow), BUNDLE, sig,
                        lambda pt: ae.bundle_embed(sig, pt, flow),
                        lambda phi: ae.BundlePoint(np.eye(sig.n), phi))


def generator_fields(action: ActionHandle, x, h: float = 1e-4) -> np.ndarray:
    """Rows V_i(x) = d/dt action(exp(t X_i), x) at t = 0, one Richardson step on (h, h/2)."""
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("step must lie in [1e-6, 1e-3]")
    basis = algebra_basis(action.sig)

    def central(X, step):
        try:
            plus = action.embed(action.evaluator(matrix_exp(step * X), x))
            minus = action.embed(action.evaluator(matrix_exp(-step * X), x))
        except OrthoflowError as exc:
            raise EvaluatorFailure(f"action evaluation failed: {exc}") from exc
        return (plus - minus) / (2 * step)

    rows = []
    for X in basis:
        d1 = central(X, h)
        d2 = central(X, h / 2)
        rows.append((4 * d2 - d1) / 3)
    return np.array(rows)


@dataclass(frozen=True)
class DimensionReport:
    dimension: int
    gap: float
    singular_values: np.ndarray


def orbit_dimension_report(action: ActionHandle, x, tol: Tolerances = DEFAULT_TOL,
                           h: float = 1e-4) -> DimensionReport:
    V = generator_fields(action, x, h)
    rep = rank_report(V, tol)
    if rep.gap < 10:
        raise IllConditioned(f"singular-value gap {rep.gap:.3g} below 10")
    return DimensionReport(rep.rank, rep.gap, rep.singular_values)


def orbit_dimension(action: ActionHandle, x, tol: Tolerances = DEFAULT_TOL) -> int:
    return orbit_dimension_report(action, x, tol).dimension


def isotropy_algebra(action: ActionHandle, x, tol: Tolerances = DEFAULT_TOL) -> Subalgebra:
    V = generator_fields(action, x)
    rep = rank_report(V, tol)
    if rep.gap < 10:
        raise IllConditioned(f"singular-value gap {rep.gap:.3g} below 10")
    # kernel of c -> sum c_i V_i, i.e. of V^T
    _, _, Wt = np.linalg.svd(V.T)
    return Subalgebra(action.sig, Wt[rep.rank:].copy())


@dataclass(frozen=True)
class FTildeResult:
    point: ProjectivePoint
    residual: float
    excess_dim: int


def _stab_columns(sig: Signature, psi: float) -> np.ndarray:
    v = np.zeros(sig.n)
    v[0], v[sig.p] = math.cos(psi), math.sin(psi)
    return stabilizer_algebra(sig, v).coeffs.T


def f_tilde_search(action: ActionHandle, z, iso: Subalgebra | None = None,
                   grid: int = 180, restarts: int = 3) -> FTildeResult:
    """Minimize the containment angle of h_[cos psi : sin psi] in the isotropy algebra."""
    sig = action.sig
    iso = isotropy_algebra(action, z) if iso is None else iso
    B = iso.coeffs.T
    obj = lambda psi: containment_angle(_stab_columns(sig, psi), B)  # noqa: E731
    psis = np.linspace(0.0, math.pi, grid, endpoint=False)
    vals = np.array([obj(t) for t in psis])
    # local minima of the periodic grid, best first
    mins = [i for i in range(grid) if vals[i] <= vals[i - 1] and vals[i] <= vals[(i + 1) % grid]]
    mins = sorted(mins, key=lambda i: vals[i])[:restarts]
    step = math.pi / grid
    best_psi, best_val = None, math.inf
    for i in mins:
        res = scipy.optimize.minimize_scalar(obj, bounds=(psis[i] - step, psis[i] + step),
                                             method="bounded", options={"xatol": 1e-12})
        if res.fun < best_val:
            best_psi, best_val = float(res.x), float(res.fun)
    stab_dim = _stab_columns(sig, best_psi).shape[1]
    return FTildeResult(ProjectivePoint.from_angle(best_psi), best_val, iso.dim - stab_dim)


def extract_f_tilde(action: ActionHandle, z, tol: float = 1e-3) -> ProjectivePoint:
    res = f_tilde_search(action, z)
    if res.residual > tol:
        raise NoContainment(f"best containment angle {res.residual:.3e}")
    return res.point


@dataclass(frozen=True)
class OrbitReport:
    dimension: int
    isotropy_dim: int
    f_tilde: ProjectivePoint | None
    orbit_type: str
    stabilizer_label: str | None = None
    details: dict = field(default_factory=dict)


def _common_kernel(sig: Signature, iso: Subalgebra, rel_tol: float = 1e-7) -> np.ndarray:
    mats = iso.matrices()
    if len(mats) == 0:
        return np.eye(sig.n)
    return null_space(mats.reshape(-1, sig.n), rel_tol)


def classify_orbit(action: ActionHandle, x, tol: Tolerances = DEFAULT_TOL,
                   with_f_tilde: bool = True) -> OrbitReport:
    sig = action.sig
    V = generator_fields(action, x)
    rep = rank_report(V, tol)
    if rep.gap < 10:
        raise IllConditioned(f"singular-value gap {rep.gap:.3g} below 10")
    _, _, Wt = np.linalg.svd(V.T)
    iso = Subalgebra(sig, Wt[rep.rank:].copy())
    dim = rep.rank
    ker = _common_kernel(sig, iso)
    details = {"gap": rep.gap, "kernel_dim": ker.shape[1]}
    ft = None
    if with_f_tilde and action.point_space != BUNDLE:
        try:
            r = f_tilde_search(action, x, iso)
            if r.residual <= 1e-3:
                ft = r.point
                details["f_tilde_excess_dim"] = r.excess_dim
        except OrthoflowError:
            ft = None
    if dim == sig.n - 2:
        return OrbitReport(dim, iso.dim, ft, CLOSED_PNULL, None, details)
    if dim == sig.n - 1 and ker.shape[1] == 1:
        v = ker[:, 0]
        qv = form(sig, v)
        details["form_value"] = qv
        if abs(qv) <= 1e-6:
            return OrbitReport(dim, iso.dim, ft, NULLCONE, None, details)
        label = STAB_SOPQ1 if qv > 0 else STAB_SOP1Q
        return OrbitReport(dim, iso.dim, ft, OPEN, label, details)
    raise UnknownOrbit(f"dimension {dim} with {ker.shape[1]}-dimensional common kernel")


def _subgroup_generators(sig: Signature, subgroup: str, rng: np.random.Generator) -> list:
    p, q = sig.p, sig.q
    if subgroup == "SOp":
        gens = [embed_K(random_so(p, rng), np.eye(q)) for _ in range(2)]
        return gens + [involution(sig, 1)]
    if subgroup == "SOq":
        gens = [embed_K(np.eye(p), random_so(q, rng)) for _ in range(2)]
        return gens + [involution(sig, 2)]
    if subgroup == "H":
        out = []
        for _ in range(2):
            k1 = np.eye(p)
            k1[1:, 1:] = random_so(p - 1, rng)
            k2 = np.eye(q)
            k2[1:, 1:] = random_so(q - 1, rng)
            out.append(embed_K(k1, k2))
        return out
    raise ValueError("subgroup must be 'SOp', 'SOq' or 'H'")


def fixed_set_scan(action: ActionHandle, subgroup: str, gridsize: int = 64, seed: int = 0,
                   tol: Tolerances = DEFAULT_TOL) -> list:
    """Slice angles (multiples of 2 pi / gridsize) whose point is fixed by the subgroup."""
    if gridsize % 4:
        raise ValueError("gridsize must be a multiple of 4 so the slice poles are sampled")
    gens = _subgroup_generators(action.sig, subgroup, np.random.default_rng(seed))
    out = []
    for j in range(gridsize):
        phi = 2 * math.pi * j / gridsize
        z = action.slice_point(phi)
        ez = action.embed(z)
        if all(np.linalg.norm(action.embed(action.evaluator(k, z)) - ez) <= tol.action for k in gens):
            out.append(phi)
    return out
