"""Exact rational arithmetic helpers: parsing, linear solves and a small LP.

Everything here works on :class:`fractions.Fraction`; nothing is ever rounded.
The LP solver is a dense two-phase simplex method with Bland's rule, which is
plenty for the tiny fiber-product polytopes the shadow predicates produce.
It pivots on GMP rationals internally (much faster than ``Fraction``) and
hands ``Fraction`` values back.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

Rational = Fraction
Point = tuple  # tuple of Fractions

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value) -> Fraction:
    """Coerce ``value`` (int, Fraction, ``"a/b"`` string) to a reduced Fraction.

    Unreduced strings such as ``"2/4"`` are normalized, never rejected.
    Floats are refused: they would smuggle rounding into exact code.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass an exact rational")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def point(coords: Iterable) -> Point:
    return tuple(rat(c) for c in coords)


def fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def fmt_point(p: Sequence[Fraction]) -> list[str]:
    return [fmt(c) for c in p]


def add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def scale(s, p):
    return tuple(s * a for a in p)


def lerp(p, q, s):
    """Point ``p + s (q - p)``."""
    return tuple(a + s * (b - a) for a, b in zip(p, q))


def combo(weights: Sequence[Fraction], pts: Sequence[Sequence[Fraction]]) -> Point:
    dim = len(pts[0])
    out = [ZERO] * dim
    for w, p in zip(weights, pts):
        if w:
            for k in range(dim):
                out[k] += w * p[k]
    return tuple(out)


def barycenter(pts: Sequence[Sequence[Fraction]]) -> Point:
    w = Fraction(1, len(pts))
    return combo([w] * len(pts), pts)


def max_dist(p, q) -> Fraction:
    return max((abs(a - b) for a, b in zip(p, q)), default=ZERO)


# -- linear algebra --------------------------------------------------------

def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    m = [[Fraction(a) for a in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / pv
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def affinely_independent(pts: Sequence[Sequence[Fraction]]) -> bool:
    if len(pts) <= 1:
        return True
    if len(set(pts)) != len(pts):
        return False
    base = pts[0]
    return rank([sub(p, base) for p in pts[1:]]) == len(pts) - 1


def solve(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Solve ``A x = b`` exactly.

    Returns the unique solution, or ``None`` when the system is inconsistent.
    Raises ``ValueError`` if the solution is not unique.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    m = [[Fraction(a) for a in A[i]] + [Fraction(b[i])] for i in range(nrows)]
    where = [-1] * ncols
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [a / pv for a in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * bb for a, bb in zip(m[i], m[r])]
        where[c] = r
        r += 1
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    if -1 in where:
        raise ValueError("underdetermined system")
    return tuple(m[where[c]][ncols] for c in range(ncols))


def barycentric_coords(x: Sequence[Fraction], verts: Sequence[Sequence[Fraction]]):
    """Barycentric coordinates of ``x`` in the affine hull of ``verts``.

    ``None`` if ``x`` is off the hull. Coordinates may be negative.
    """
    k = len(verts)
    d = len(x)
    A = [[verts[j][i] for j in range(k)] for i in range(d)] + [[ONE] * k]
    return solve(A, list(x) + [ONE])


# -- linear programming ----------------------------------------------------

class LPResult:
    __slots__ = ("status", "value", "x")

    def __init__(self, status, value=None, x=None):
        self.status = status
        self.value = value
        self.x = x

    @property
    def feasible(self):
        return self.status != "infeasible"

    def __repr__(self):
        return f"LPResult({self.status!r}, value={self.value})"


def _pivot(T, r, c):
    pv = T[r][c]
    if pv != 1:
        T[r] = [a / pv for a in T[r]]
    row = T[r]
    for i in range(len(T)):
        if i != r:
            f = T[i][c]
            if f:
                Ti = T[i]
                T[i] = [a - f * b if b else a for a, b in zip(Ti, row)]


def _simplex(T, basis, ncols, allowed):
    """Maximize the objective stored in the last row (as reduced costs).

    The last row holds ``-c`` style reduced costs: we pivot on the first
    allowed column with a negative entry (Bland's rule).
    """
    obj = T[-1]
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if allowed[j] and obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(len(T) - 1):
            a = T[i][col]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(T, r, col)
        basis[r] = col


def linprog_max(c, A_eq=(), b_eq=(), A_ub=(), b_ub=()) -> LPResult:
    """Maximize ``c.x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``.

    All data must be exact rationals (ints are fine).
    """
    n = len(c)
    Z, O = mpq(0), mpq(1)
    rows = [[_q(a) for a in r] + [Z] * len(A_ub) for r in A_eq]
    rhs = [_q(v) for v in b_eq]
    for k, (r, v) in enumerate(zip(A_ub, b_ub)):
        slack = [Z] * len(A_ub)
        slack[k] = O
        rows.append([_q(a) for a in r] + slack)
        rhs.append(_q(v))
    nv = n + len(A_ub)
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-a for a in rows[i]]
            rhs[i] = -rhs[i]
    m = len(rows)
    if m == 0:
        if any(ci > 0 for ci in c):
            return LPResult("unbounded")
        return LPResult("optimal", ZERO, (ZERO,) * n)
    # phase 1: artificial variables n_v .. n_v+m-1
    ncols = nv + m
    T = []
    for i in range(m):
        art = [Z] * m
        art[i] = O
        T.append(rows[i] + art + [rhs[i]])
    basis = [nv + i for i in range(m)]
    # objective: maximize -sum(art) -> reduced cost row = -(sum of rows) on real cols
    obj = [Z] * (ncols + 1)
    for i in range(m):
        for j in range(nv):
            obj[j] -= T[i][j]
        obj[-1] -= T[i][-1]
    T.append(obj)
    allowed = [True] * nv + [False] * m
    _simplex(T, basis, ncols, allowed)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    # drive artificials out of the basis
    keep = []
    for i in range(m):
        if basis[i] >= nv:
            col = next((j for j in range(nv) if T[i][j] != 0), None)
            if col is None:
                continue  # redundant row
            _pivot(T, i, col)
            basis[i] = col
        keep.append(i)
    T2 = [T[i][:nv] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    # phase 2 objective row: -c reduced by basis
    cc = [_q(v) for v in c] + [Z] * len(A_ub)
    obj = [-v for v in cc] + [Z]
    for i, bcol in enumerate(basis):
        cb = cc[bcol]
        if cb:
            obj = [a + cb * b for a, b in zip(obj, T2[i])]
    T2.append(obj)
    status = _simplex(T2, basis, nv, [True] * nv)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Z] * nv
    for i, bcol in enumerate(basis):
        x[bcol] = T2[i][-1]
    return LPResult("optimal", _f(T2[-1][-1]), tuple(_f(v) for v in x[:n]))


def _q(v):
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def _f(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))
