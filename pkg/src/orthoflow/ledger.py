"""Integer bookkeeping: parabolic subgroup dimensions and the table of SO(p)-orbits on spheres.

Parabolic dimensions are computed twice: from closed-form polynomials and by
enumerating the restricted roots of so(p,q) (p >= q: roots +-f_i +- f_j with
multiplicity 1, +-f_i with multiplicity p - q, m = so(p - q), a of dimension q)
and splitting them according to the simple roots kept in the Levi factor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BadSignature

NULL_LINE = "NullLine"
MAX_ISOTROPIC = "MaxIsotropic"


@dataclass(frozen=True)
class ParabolicDims:
    kind: str
    p: int
    q: int
    dimM: int
    dimA: int
    dimNplusTheta: int   # positive roots inside the Levi factor (with multiplicity)
    dimNTheta: int       # nilradical
    dimPTheta: int
    codim: int


def _so(k: int) -> int:
    return k * (k - 1) // 2


def restricted_roots(p: int, q: int):
    """Positive restricted roots of so(p,q), p >= q, as (coefficient vector, multiplicity)."""
    roots = []
    for i in range(q):
        for j in range(i + 1, q):
            for sgn in (-1, 1):
                v = np.zeros(q, dtype=int)
                v[i], v[j] = 1, sgn
                roots.append((v, 1))
        if p > q:
            v = np.zeros(q, dtype=int)
            v[i] = 1
            roots.append((v, p - q))
    return roots


def simple_roots(p: int, q: int) -> np.ndarray:
    rows = []
    for i in range(q - 1):
        v = np.zeros(q, dtype=int)
        v[i], v[i + 1] = 1, -1
        rows.append(v)
    v = np.zeros(q, dtype=int)
    if p > q:
        v[q - 1] = 1
    else:
        v[q - 2] = v[q - 1] = 1
    rows.append(v)
    return np.array(rows)


def _expand(root: np.ndarray, simple: np.ndarray) -> np.ndarray:
    coeffs, *_ = np.linalg.lstsq(simple.T.astype(float), root.astype(float), rcond=None)
    out = np.rint(coeffs).astype(int)
    if not np.array_equal(out @ simple, root) or (out < 0).any():
        raise ArithmeticError(f"root {root} is not a non-negative integer combination")
    return out


def _excluded_simple(kind: str, p: int, q: int) -> int:
    if kind == NULL_LINE:
        return 0
    return q - 1


def parabolic_by_roots(kind: str, p: int, q: int) -> ParabolicDims:
    if p < q:
        p, q = q, p
    simple = simple_roots(p, q)
    drop = _excluded_simple(kind, p, q)
    inside = nil = total = 0
    for v, mult in restricted_roots(p, q):
        total += mult
        if _expand(v, simple)[drop] == 0:
            inside += mult
        else:
            nil += mult
    dim_m = _so(p - q)
    dimP = dim_m + q + nil + 2 * inside
    dim_g = _so(p + q)
    if dim_m + q + 2 * total != dim_g:
        raise ArithmeticError("restricted root partition does not add up")
    return ParabolicDims(kind, p, q, dim_m, q, inside, nil, dimP, dim_g - dimP)


def parabolic_closed_form(kind: str, p: int, q: int) -> int:
    """dim P in closed form (p >= q)."""
    if kind == NULL_LINE:
        if p == q:
            return 2 * p * p - 3 * p + 2
        val = Fraction(p * p + q * q, 2) + p * q - Fraction(3, 2) * (p + q) + 2
    elif kind == MAX_ISOTROPIC:
        val = Fraction(3 * p * p - p, 2) if p == q else Fraction(p * p + 2 * q * q - p, 2)
    else:
        raise ValueError(f"unknown parabolic kind {kind!r}")
    if val.denominator != 1:
        raise ArithmeticError("closed form is not an integer")
    return int(val)


def parabolic_dims(kind: str, p: int, q: int) -> ParabolicDims:
    if min(p, q) < 3:
        raise BadSignature("need p, q >= 3")
    if kind not in (NULL_LINE, MAX_ISOTROPIC):
        raise ValueError(f"unknown parabolic kind {kind!r}")
    if p < q:
        p, q = q, p
    by_roots = parabolic_by_roots(kind, p, q)
    closed = parabolic_closed_form(kind, p, q)
    if closed != by_roots.dimPTheta:
        raise ArithmeticError(f"closed form {closed} != root count {by_roots.dimPTheta}")
    return by_roots


# --- orbit table ---------------------------------------------------------------------

# (p, subgroup, printed dim of orbit, printed bound on dim M, printed q range); "p" rows are generic
PRINTED_TABLE1 = [
    ("p", "SO(p-2)", "2p-3", "2p-1", ("p-2", "p")),
    ("p", "SO(p-2)xSO(2)", "2p-4", "2p-1", ("p-3", "p")),
    (9, "Spin(7)", 15, 17, (7, 9)),
    (8, "G2", 14, 15, (7, 8)),
    (8, "U4", 12, 15, (5, 8)),
    (8, "SU4", 13, 15, (6, 8)),
    (7, "G2", 7, 13, (3, 7)),
    (7, "U3", 12, 13, (6, 7)),
    (7, "SO(3)xSO(4)", 12, 13, (6, 7)),
    (6, "SO(3)xSO(3)", 9, 11, (4, 6)),
    (6, "U3", 6, 11, (3, 6)),
    (6, "SU3", 7, 11, (3, 6)),
    (6, "U2xU1", 10, 11, (5, 6)),
    (5, "U2", 6, 9, (3, 5)),
    (5, "SU2", 7, 9, (3, 5)),
    (5, "U1xU1", 8, 9, (4, 5)),
    (5, "SO(3)", 7, 9, (3, 5)),
    (3, "{1}", 3, 5, (3, 3)),
    ("p", "SO(p-1)", "p-1", "2p-1", (3, "p")),
    (8, "Spin(7)", 7, 15, (3, 8)),
    (4, "SU2", 3, 7, (3, 4)),
    (4, "U2", 2, 7, (3, 4)),
]
BOTTOM_PART_START = 18

_EXCEPTIONAL = {"Spin(7)": 21, "G2": 14, "{1}": 0}


def _eval_linear(expr, p: int) -> int:
    """Evaluate an integer or an expression like '2p-3', 'p-1', 'p'."""
    if isinstance(expr, int):
        return expr
    m = re.fullmatch(r"(\d*)p([+-]\d+)?", expr.replace(" ", ""))
    if not m:
        raise ValueError(f"cannot parse {expr!r}")
    a = int(m.group(1)) if m.group(1) else 1
    b = int(m.group(2)) if m.group(2) else 0
    return a * p + b


def subgroup_dim(name: str, p: int | None = None) -> int:
    """Dimension of a product of SO(k), U_k, SU_k, Spin(7), G2, {1}."""
    total = 0
    for part in name.split("x"):
        part = part.strip()
        if part in _EXCEPTIONAL:
            total += _EXCEPTIONAL[part]
            continue
        m = re.fullmatch(r"SO\((.+)\)", part)
        if m:
            total += _so(_eval_linear(m.group(1) if not m.group(1).isdigit() else int(m.group(1)), p))
            continue
        m = re.fullmatch(r"SU(\d+)", part)
        if m:
            total += int(m.group(1)) ** 2 - 1
            continue
        m = re.fullmatch(r"U(\d+)", part)
        if m:
            total += int(m.group(1)) ** 2
            continue
        raise ValueError(f"unknown subgroup {part!r}")
    return total


@dataclass(frozen=True)
class OrbitRow:
    p: int
    subgroupName: str
    dimOrbit: int
    dimBound: int
    qRange: tuple
    printedDimOrbit: int
    bottom: bool = False

    @property
    def matches_printed(self) -> bool:
        return self.dimOrbit == self.printedDimOrbit


def _row(entry, p: int, bottom: bool) -> OrbitRow:
    _, name, dim_printed, bound_printed, (qlo, qhi) = entry
    dim = _so(p) - subgroup_dim(name, p)
    # the q range follows from dim O^p <= p + q - 1, q <= p and q >= 3
    q_lo = max(3, dim - p + 1)
    return OrbitRow(p, name, dim, 2 * p - 1, (q_lo, p), _eval_linear(dim_printed, p), bottom)


def table1_rows(generic_p=(3, 4, 5, 6, 7, 8, 9)) -> list:
    """Rows recomputed from subgroup dimensions; generic rows instantiated at each p given."""
    out = []
    for idx, entry in enumerate(PRINTED_TABLE1):
        bottom = idx >= BOTTOM_PART_START
        ps = generic_p if entry[0] == "p" else (entry[0],)
        for p in ps:
            lo_needed = 4 if "SO(p-2)" in entry[1] else 3
            if p < lo_needed:
                continue
            out.append(_row(entry, p, bottom))
    return out


def printed_row_checks(generic_p=(4, 5, 6, 7, 8, 9)) -> list:
    """(row, ok) comparing every recomputed column with the printed one."""
    out = []
    for idx, entry in enumerate(PRINTED_TABLE1):
        ps = generic_p if entry[0] == "p" else (entry[0],)
        for p in ps:
            row = _row(entry, p, idx >= BOTTOM_PART_START)
            qlo, qhi = (_eval_linear(e, p) for e in entry[4])
            ok = (row.dimOrbit == _eval_linear(entry[2], p)
                  and row.dimBound == _eval_linear(entry[3], p)
                  and row.qRange == (max(3, qlo), qhi))
            out.append((row, ok))
    return out


# --- the dimension filter --------------------------------------------------------------

ANNOTATIONS = {
    "one-dimensional-q-orbit": "an SO(q)-orbit cannot be one-dimensional",
    "q-fixed-point": "SO(q) cannot fix the point when dim M - dim O^p <= q - 1",
    "dimension-squeeze": "codimension of O^p too small while O^p forces q >= 5",
    "K-transitive": "K would act transitively, which never extends",
    "U2-U2-not-effective": "SO(4)/U2 x SO(4)/U2 on a 7-manifold is not locally effective",
    "U2-fixed-not-effective": "SO(4)/U2 with SO(q) fixing the point is not locally effective",
    "U2-small-complement": "SO(4)/U2 with complement of dimension <= 2 is not locally effective",
    "Spin7-9-7-not-effective": "SO(9)/Spin(7) filling a 15-manifold is not locally effective",
    "minus-identity-no-open-orbit": "-I_p in the isotropy forbids an open orbit; the closed case is excluded",
}


@dataclass(frozen=True)
class FilterResult:
    arithmetic_feasible: bool
    annotations: tuple = field(default_factory=tuple)

    @property
    def feasible(self) -> bool:
        return self.arithmetic_feasible and not self.annotations

    def messages(self) -> list:
        return [ANNOTATIONS[a] for a in self.annotations]


def dimension_filter(p: int, q: int, dimOp: int, dimOq: int, deltaV: int,
                     subgroup_p: str | None = None, subgroup_q: str | None = None) -> FilterResult:
    if deltaV not in (0, 1):
        raise ValueError("deltaV must be 0 or 1")
    dim_m = p + q - 1
    arith = dimOq <= dim_m - dimOp + deltaV and dimOp <= dim_m and q <= p
    notes = []
    if dimOq == 1:
        notes.append("one-dimensional-q-orbit")
    if dimOq == 0 and dim_m - dimOp <= q - 1:
        notes.append("q-fixed-point")
    if (2 * p - 1) - dimOp <= 3 - deltaV and dimOp + 1 - p >= 5:
        notes.append("dimension-squeeze")
    if dimOp + dimOq >= dim_m:
        notes.append("K-transitive")
    if p == 4 and subgroup_p == "U2":
        if q == 4 and subgroup_q == "U2":
            notes.append("U2-U2-not-effective")
        if dimOq == 0:
            notes.append("U2-fixed-not-effective")
        if dim_m - dimOq - dimOp <= 2:
            notes.append("U2-small-complement")
    if p == 9 and q == 7 and subgroup_p == "Spin(7)":
        notes.append("Spin7-9-7-not-effective")
    if dimOp == p - 1 and dimOq == q - 1 and (p, subgroup_p) in ((8, "Spin(7)"), (4, "SU2")):
        notes.append("minus-identity-no-open-orbit")
    return FilterResult(arith, tuple(dict.fromkeys(notes)))
