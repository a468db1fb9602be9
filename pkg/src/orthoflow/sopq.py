"""The indefinite orthogonal group SO°(p,q) and its Lie algebra.

Ambient coordinates are ordered (e_1..e_p, eps_1..eps_q); the preserved
form is diag(-I_p, I_q).  Indices in code are 0-based, so e_1 is index 0
and eps_1 is index p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BadSignature, NotAStabilizer, NotSpecialOrthogonal, WrongSize, ZeroVector
from .numkit import DEFAULT_TOL, Tolerances, matrix_exp, null_space


@dataclass(frozen=True)
class Signature:
    p: int
    q: int

    def __post_init__(self):
        if int(self.p) != self.p or int(self.q) != self.q or self.p < 3 or self.q < 3:
            raise BadSignature(f"need integers p, q >= 3, got ({self.p}, {self.q})")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def dim(self) -> int:
        """Dimension of so(p,q)."""
        return self.n * (self.n - 1) // 2

    def e(self, i: int) -> np.ndarray:
        """Ambient basis vector e_{i+1} of the p-block."""
        v = np.zeros(self.n)
        v[i] = 1.0
        return v

    def eps(self, k: int) -> np.ndarray:
        """Ambient basis vector eps_{k+1} of the q-block."""
        v = np.zeros(self.n)
        v[self.p + k] = 1.0
        return v


def gram(sig: Signature) -> np.ndarray:
    return np.diag(np.r_[-np.ones(sig.p), np.ones(sig.q)])


def form(sig: Signature, x, y=None) -> float:
    """The (p,q) quadratic form Q(x) or its polarization B(x, y)."""
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    return float(-x[:sig.p] @ y[:sig.p] + x[sig.p:] @ y[sig.p:])


def as_matrix(g) -> np.ndarray:
    return np.asarray(g.mat if isinstance(g, GroupElement) else g, dtype=float)


@dataclass(frozen=True, eq=False)
class GroupElement:
    sig: Signature
    mat: np.ndarray = field(repr=False)

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            return GroupElement(self.sig, self.mat @ other.mat)
        return self.mat @ np.asarray(other)

    def inv(self) -> "GroupElement":
        return GroupElement(self.sig, group_inverse(self.sig, self.mat))


def group_inverse(sig: Signature, X) -> np.ndarray:
    """X^{-1} = I X^T I for X preserving the form."""
    d = np.r_[-np.ones(sig.p), np.ones(sig.q)]
    X = np.asarray(X, dtype=float)
    return (d[:, None] * X.T) * d[None, :]


@dataclass(frozen=True)
class MembershipReport:
    accepted: bool
    failed_check: str | None
    residual: float
    element: GroupElement | None = None


def is_in_group(X, sig: Signature, tol: Tolerances = DEFAULT_TOL) -> MembershipReport:
    """Certify X in SO°(p,q): form relation, unit determinant, and the
    orientation of the negative-definite block (det of the p x p block > 0)."""
    X = np.asarray(X, dtype=float)
    if X.shape != (sig.n, sig.n):
        raise WrongSize(f"expected {sig.n}x{sig.n}, got {X.shape}")
    I = gram(sig)
    res = float(np.linalg.norm(X @ I @ X.T - I))
    if not np.isfinite(res) or res > tol.algebraic * max(1.0, np.linalg.norm(X) ** 2):
        return MembershipReport(False, "form", res)
    det = float(np.linalg.det(X))
    if abs(det - 1.0) > tol.algebraic * max(1.0, abs(det)):
        return MembershipReport(False, "determinant", abs(det - 1.0))
    dp = float(np.linalg.det(X[:sig.p, :sig.p]))
    if not dp > 0:
        return MembershipReport(False, "component", dp)
    return MembershipReport(True, None, res, GroupElement(sig, X))


def certify(X, sig: Signature, tol: Tolerances = DEFAULT_TOL) -> GroupElement:
    rep = is_in_group(X, sig, tol)
    if not rep.accepted:
        raise ValueError(f"not in SO°(p,q): {rep.failed_check} check failed ({rep.residual:.3e})")
    return rep.element


def boost(sig: Signature, theta: float) -> np.ndarray:
    """The hyperbolic rotation m(theta) in the (e_1, eps_1) plane."""
    if abs(theta) > 700:
        raise OverflowError("boost parameter too large")
    M = np.eye(sig.n)
    ch, sh = np.cosh(theta), np.sinh(theta)
    M[0, 0] = M[sig.p, sig.p] = ch
    M[0, sig.p] = M[sig.p, 0] = sh
    return M


def involution(sig: Signature, which: int) -> np.ndarray:
    """j1 flips e_1, e_2; j2 flips eps_1, eps_2."""
    d = np.ones(sig.n)
    if which == 1:
        d[[0, 1]] = -1.0
    elif which == 2:
        d[[sig.p, sig.p + 1]] = -1.0
    else:
        raise ValueError("which must be 1 or 2")
    return np.diag(d)


def _check_so(k: np.ndarray, tol: Tolerances, label: str):
    m = k.shape[0]
    if k.shape != (m, m) or np.linalg.norm(k.T @ k - np.eye(m)) > tol.algebraic \
            or abs(np.linalg.det(k) - 1.0) > tol.algebraic:
        raise NotSpecialOrthogonal(f"{label} is not in SO({m})")


def embed_K(kappa1, kappa2, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    k1 = np.asarray(kappa1, dtype=float)
    k2 = np.asarray(kappa2, dtype=float)
    _check_so(k1, tol, "kappa1")
    _check_so(k2, tol, "kappa2")
    p, q = k1.shape[0], k2.shape[0]
    K = np.zeros((p + q, p + q))
    K[:p, :p] = k1
    K[p:, p:] = k2
    return K


def embed_SOp_plus1(kappa1) -> np.ndarray:
    """kappa1 acting on R^{p+1}, fixing the last coordinate (the pole N)."""
    k1 = np.asarray(kappa1, dtype=float)
    p = k1.shape[0]
    out = np.eye(p + 1)
    out[:p, :p] = k1
    return out


@lru_cache(maxsize=None)
def _basis_cached(p: int, q: int) -> np.ndarray:
    n = p + q
    mats = []
    for i in range(p):
        for j in range(i + 1, p):
            X = np.zeros((n, n))
            X[i, j], X[j, i] = 1.0, -1.0
            mats.append(X)
    for i in range(q):
        for j in range(i + 1, q):
            X = np.zeros((n, n))
            X[p + i, p + j], X[p + j, p + i] = 1.0, -1.0
            mats.append(X)
    for i in range(p):
        for k in range(q):
            X = np.zeros((n, n))
            X[i, p + k] = X[p + k, i] = 1.0
            mats.append(X)
    out = np.array(mats)
    out.setflags(write=False)
    return out


def algebra_basis(sig: Signature) -> np.ndarray:
    """Basis of so(p,q) as an array of shape (dim, n, n).

    Order: p-block rotations, q-block rotations, boosts E_{i,p+k} + E_{p+k,i}.
    All elements are Frobenius-orthogonal with equal norm sqrt(2), so the
    Euclidean geometry of coefficient vectors is the Frobenius geometry.
    """
    return _basis_cached(sig.p, sig.q)


def algebra_element(sig: Signature, coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (sig.dim,):
        raise WrongSize(f"need {sig.dim} coefficients")
    return np.tensordot(c, algebra_basis(sig), axes=1)


def algebra_coefficients(sig: Signature, X) -> np.ndarray:
    B = algebra_basis(sig)
    return np.tensordot(B, np.asarray(X, dtype=float), axes=([1, 2], [0, 1])) / 2.0


def in_algebra_residual(sig: Signature, X) -> float:
    I = gram(sig)
    X = np.asarray(X, dtype=float)
    return float(np.linalg.norm(X @ I + I @ X.T))


def exp_algebra(sig: Signature, coeffs) -> np.ndarray:
    return matrix_exp(algebra_element(sig, coeffs))


def random_algebra_coeffs(sig: Signature, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=sig.dim)


def random_so(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random element of SO(m)."""
    Z = rng.standard_normal((m, m))
    Qm, R = np.linalg.qr(Z)
    Qm = Qm * np.sign(np.diag(R))
    if np.linalg.det(Qm) < 0:
        Qm[:, 0] = -Qm[:, 0]
    return Qm


@dataclass(frozen=True)
class Subalgebra:
    """A subalgebra given by orthonormal coefficient vectors (rows)."""
    sig: Signature
    coeffs: np.ndarray

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def matrices(self) -> np.ndarray:
        return np.tensordot(self.coeffs, algebra_basis(self.sig), axes=1)


def _action_on_vector(sig: Signature, v: np.ndarray) -> np.ndarray:
    """Matrix of the linear map (coefficients) -> X v."""
    return np.einsum("dij,j->id", algebra_basis(sig), v)


def stabilizer_algebra(sig: Signature, v, tol: Tolerances = DEFAULT_TOL) -> Subalgebra:
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ZeroVector("stabilizer of a (near) zero vector requested")
    A = _action_on_vector(sig, v / nv)
    N = null_space(A, 1e-10)
    return Subalgebra(sig, N.T.copy())


def _form_orthonormal(sig: Signature, B: np.ndarray):
    """Re-express the columns of B as a form-orthonormal basis, negatives first."""
    G = B.T @ gram(sig) @ B
    w, V = np.linalg.eigh(0.5 * (G + G.T))
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    Bn = B @ V / np.sqrt(np.abs(w))[None, :]
    signs = np.sign(w)
    return Bn, signs


def _two_determinant(M: np.ndarray, n_neg: int) -> bool:
    return bool(np.linalg.det(M) > 0 and (n_neg == 0 or np.linalg.det(M[:n_neg, :n_neg]) > 0))


def stabilizer_identity_component_test(sig: Signature, u, v, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Decide whether u lies in the identity component of the stabilizer of v.

    Non-null v: restrict u to the form-complement of v in a form-orthonormal
    basis and apply the two-determinant criterion there.  Null v: u induces a
    map on v^perp / Rv, a space of signature (p-1, q-1), and the unipotent
    radical is connected, so the same criterion on that quotient decides.
    """
    U = as_matrix(u)
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        raise ZeroVector("zero vector")
    v = v / nv
    if np.linalg.norm(U @ v - v) > tol.action * max(1.0, np.linalg.norm(U)):
        raise NotAStabilizer("u does not fix v")
    I = gram(sig)
    Iv = I @ v
    qv = float(v @ Iv)
    if abs(qv) > tol.algebraic:
        perp = null_space(Iv[None, :], 1e-12)
        Bn, signs = _form_orthonormal(sig, perp)
        M = (signs[:, None] * Bn.T) @ I @ U @ Bn
        return _two_determinant(M, int(np.sum(signs < 0)))
    # null vector: pick a complementary null vector v' with B(v, v') = 1
    vp = np.zeros(sig.n)
    vp[:sig.p] = -v[:sig.p]
    vp[sig.p:] = v[sig.p:]
    vp = vp / float(vp @ I @ v)
    vp = vp - 0.5 * float(vp @ I @ vp) * v
    W = null_space(np.vstack([Iv, I @ vp]), 1e-12)
    Bn, signs = _form_orthonormal(sig, W)
    UW = U @ Bn
    # drop the component along v (detected by pairing with v')
    UW = UW - np.outer(v, vp @ I @ UW)
    M = (signs[:, None] * Bn.T) @ I @ UW
    return _two_determinant(M, int(np.sum(signs < 0)))
