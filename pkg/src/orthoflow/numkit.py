"""Small dense linear-algebra toolkit used by the rest of the package.

Decompositions are delegated to numpy/scipy; this module adds the
project-specific pieces (deterministic rotation completion, rank-one
extraction with sign canonicalization, rank decisions with a gap report).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionTooSmall, NonUnitInput, NotRankOne, Overflow


@dataclass(frozen=True)
class Tolerances:
    algebraic: float = 1e-9
    ode: float = 1e-8
    rank: float = 1e-7
    action: float = 1e-6

    def __post_init__(self):
        for name in ("algebraic", "ode", "rank", "action"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")
        if self.algebraic > self.action:
            raise ValueError("algebraic tolerance must not exceed action tolerance")


DEFAULT_TOL = Tolerances()


def _plane_rotation(u: np.ndarray, w: np.ndarray, cos_t: float, sin_t: float) -> np.ndarray:
    """Rotation by angle t in the oriented plane (u, w); identity on its complement."""
    n = u.shape[0]
    return (np.eye(n) + (cos_t - 1.0) * (np.outer(u, u) + np.outer(w, w))
            + sin_t * (np.outer(w, u) - np.outer(u, w)))


def rotation_sending(a, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Return R in SO(n) with R a = b, rotating only in span{a, b}.

    For b = -a the rotation is taken in the plane spanned by a and the
    standard basis vector least aligned with a (smallest index on ties).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    if abs(np.linalg.norm(a) - 1.0) > tol.algebraic or abs(np.linalg.norm(b) - 1.0) > tol.algebraic:
        raise NonUnitInput("rotation_sending expects unit vectors")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    c = float(a @ b)
    perp = b - c * a
    s = float(np.linalg.norm(perp))
    if s > 0.0:
        # R a = c a + perp regardless of how well perp/s is resolved,
        # so re-orthogonalizing the in-plane direction keeps R exact
        w = perp / s
        w -= (w @ a) * a
        w /= np.linalg.norm(w)
        return _plane_rotation(a, w, c, s)
    if c > 0:
        return np.eye(n)
    if n < 2:
        raise DimensionTooSmall("no rotation sends a to -a in dimension 1")
    idx = int(np.argmin(np.abs(a)))
    helper = np.zeros(n)
    helper[idx] = 1.0
    helper -= (helper @ a) * a
    helper /= np.linalg.norm(helper)
    return _plane_rotation(a, helper, -1.0, 0.0)


def canonical_sign(u: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Flip u so that its first component with |u_i| > eps is positive."""
    for x in u:
        if abs(x) > eps:
            return u if x > 0 else -u
    return u


def rank_one_factor(Q, tol: Tolerances = DEFAULT_TOL):
    """Write a PSD rank-one matrix as scale * u u^T with scale = trace(Q)."""
    Q = np.asarray(Q, dtype=float)
    Qs = 0.5 * (Q + Q.T)
    w, V = np.linalg.eigh(Qs)
    scale = float(np.trace(Qs))
    u = canonical_sign(V[:, -1].copy())
    if Q.shape[0] > 1 and abs(w[-2]) > tol.rank * max(abs(scale), 1e-300):
        raise NotRankOne(f"second eigenvalue {w[-2]:.3e} vs trace {scale:.3e}")
    resid = np.linalg.norm(Qs - scale * np.outer(u, u))
    if resid > tol.rank * max(np.linalg.norm(Qs), 1e-300):
        raise NotRankOne(f"rank-one residual {resid:.3e}")
    return scale, u


@dataclass(frozen=True)
class RankReport:
    rank: int
    singular_values: np.ndarray
    gap: float  # sigma_rank / sigma_{rank+1}; inf when nothing is dropped


def rank_report(M, tol: Tolerances = DEFAULT_TOL) -> RankReport:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return RankReport(0, np.zeros(0), math.inf)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0.0:
        return RankReport(0, sv, math.inf)
    r = int(np.sum(sv > tol.rank * sv[0]))
    if r < len(sv):
        gap = sv[r - 1] / sv[r] if sv[r] > 0 else math.inf
    else:
        gap = math.inf
    return RankReport(r, sv, float(gap))


def numerical_rank(M, tol: Tolerances = DEFAULT_TOL) -> int:
    return rank_report(M, tol).rank


def matrix_exp(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise Overflow("non-finite input to matrix_exp")
    if np.linalg.norm(A, 1) > 700.0:
        raise Overflow("matrix_exp argument too large for float64")
    E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise Overflow("matrix_exp overflowed")
    return E


def null_space(M, rel_tol: float) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of M."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, sv, Vt = np.linalg.svd(M)
    top = sv[0] if sv.size else 0.0
    r = int(np.sum(sv > rel_tol * top)) if top > 0 else 0
    return Vt[r:].T.copy()


def containment_angle(A: np.ndarray, B: np.ndarray) -> float:
    """Largest principal angle between col(A) and its projection onto col(B).

    Zero iff col(A) is contained in col(B).  A and B need not be orthonormal.
    """
    if A.shape[1] == 0:
        return 0.0
    if B.shape[1] == 0:
        return math.pi / 2
    Qa = scipy.linalg.orth(A)
    Qb = scipy.linalg.orth(B)
    s = np.linalg.svd(Qb.T @ Qa, compute_uv=False)
    if s.size < Qa.shape[1]:
        return math.pi / 2
    # arcsin of the residual norm is accurate for tiny angles
    resid = Qa - Qb @ (Qb.T @ Qa)
    sin_max = np.linalg.norm(resid, 2)
    return float(math.asin(min(1.0, sin_max)))


def chordal(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))
