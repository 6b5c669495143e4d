"""Derived subdivisions, the lagging second derived subdivision and derived
neighborhoods.

A derived subdivision replaces every simplex by the cone, from a chosen
interior point, over the already subdivided boundary.  Its simplexes are
exactly the chains ``A_0 < A_1 < ... < A_k`` of the face poset, which is how
they are enumerated here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .complex import Complex, Subcomplex, closure, faces
from .errors import DerivationPointOutsideInterior, NonPositiveCenterValue, NotSubcomplex, PointOutsideComplex
from .exact import ZERO, barycentric_coords, combo, lerp, point

DEFAULT_SHIFT = Fraction(1, 100)


@dataclass
class DerivedComplex:
    """A subdivision of ``original`` with every result vertex's carrier.

    ``vertex_carrier[w]`` is the smallest original simplex containing result
    vertex ``w``.  ``center_value`` is filled in for lagging subdivisions.
    """

    original: Complex
    result: Complex
    vertex_carrier: tuple
    center_value: dict = field(default_factory=dict)
    shift: Fraction | None = None

    def carrier(self, s) -> tuple:
        """Smallest original simplex containing result simplex ``s``."""
        best = ()
        for w in s:
            c = self.vertex_carrier[w]
            if len(c) > len(best):
                best = c
        return best

    def carried_by(self, A) -> list:
        A = tuple(A)
        return [s for s in self.result.ordered if self.carrier(s) == A]

    def induced(self, L) -> set:
        """Result simplexes lying in the original subcomplex ``L``."""
        L = set(L)
        return {s for s in self.result.simplexes if self.carrier(s) in L}

    def height(self, A, x) -> Fraction:
        """The join-linear function ``f_A`` at a point ``x`` of ``A``."""
        return height_value(self, A, x)


def _chains(K: Complex) -> dict:
    """Map each simplex to the list of face-poset chains ending at it."""
    out = {}
    for s in sorted(K.simplexes, key=lambda s: (len(s), s)):
        ch = [(s,)]
        for f in faces(s, include_self=False):
            ch.extend(c + (s,) for c in out[f])
        out[s] = ch
    return out


def _order(K: Complex) -> list:
    # increasing dimension, lexicographic ties
    return sorted(K.simplexes, key=lambda s: (len(s), s))


def derived(K: Complex, sched: dict | None = None, check: bool = True) -> DerivedComplex:
    """Derived subdivision of ``K`` using the derivation points in ``sched``.

    ``sched`` maps simplexes of dimension >= 1 to points; missing entries
    default to barycenters, vertices derive to themselves.
    """
    sched = sched or {}
    order = _order(K)
    index = {}
    verts = []
    carriers = []
    for s in order:
        if len(s) == 1:
            p = K.vertices[s[0]]
        elif s in sched:
            p = point(sched[s])
            if check:
                lam = barycentric_coords(p, K.points(s))
                if lam is None or min(lam) <= 0:
                    raise DerivationPointOutsideInterior(f"derivation point of {s} is not interior")
        else:
            p = K.barycenter(s)
        index[s] = len(verts)
        verts.append(p)
        carriers.append(s)
    simp = set()
    for s, chs in _chains(K).items():
        for c in chs:
            simp.add(tuple(sorted(index[a] for a in c)))
    result = Complex(verts, simp, K.ambient_dim)
    return DerivedComplex(K, result, tuple(carriers))


def barycentric(K: Complex) -> DerivedComplex:
    return derived(K, None, check=False)


def center_values(K: Complex, F, shift=DEFAULT_SHIFT) -> dict:
    """``Pi F(a) + shift`` at the barycenter ``a`` of every simplex."""
    shift = Fraction(shift)
    out = {}
    for s in K.simplexes:
        hs = [F.height(v) for v in s]
        c = sum(hs, ZERO) / len(hs) + shift
        if c <= 0:
            raise NonPositiveCenterValue(f"center value {c} of {s} is not positive")
        out[s] = c
    return out


def lagging_second_derived(K: Complex, F, shift=DEFAULT_SHIFT) -> DerivedComplex:
    """Second derived subdivision whose derivation points lag behind heights.

    ``K'`` is barycentric; the derivation point of a ``K'``-simplex
    ``a_j * B`` sits on the segment from ``a_j`` to ``b`` where the
    join-linear ``f_{A_j}`` (``-1`` on the boundary, ``Pi F(a_j) + shift`` at
    ``a_j``) vanishes.  The result's carriers refer to ``K`` itself.
    """
    shift = Fraction(shift)
    if shift <= 0:
        raise NonPositiveCenterValue("shift must be positive")
    cv = center_values(K, F, shift)
    Kp = barycentric(K)
    R = Kp.result
    sched = {}
    # K'-simplexes in increasing dimension: b is always defined first
    for s in sorted(R.simplexes, key=lambda s: (len(s), s)):
        if len(s) == 1:
            continue
        top = max(s, key=lambda w: len(Kp.vertex_carrier[w]))
        rest = tuple(w for w in s if w != top)
        b = R.vertices[rest[0]] if len(rest) == 1 else sched[rest]
        c = cv[Kp.vertex_carrier[top]]
        sched[s] = lerp(R.vertices[top], b, c / (c + 1))
    Kpp = derived(R, sched, check=False)
    # compose carriers down to K
    vc = tuple(Kp.carrier(s) for s in Kpp.vertex_carrier)
    return DerivedComplex(K, Kpp.result, vc, cv, shift)


def derived_neighborhood(Kpp: DerivedComplex, L) -> Subcomplex:
    """Closed simplicial neighborhood of ``L''`` in the derived complex."""
    Ls = set(L.simplexes if isinstance(L, Subcomplex) else L)
    if not Ls <= Kpp.original.simplexes:
        raise NotSubcomplex("L is not a subcomplex of the original complex")
    if closure(Ls) != Ls:
        raise NotSubcomplex("L is not closed under faces")
    hit = {w for w, c in enumerate(Kpp.vertex_carrier) if c in Ls}
    touching = set()
    for w in hit:
        touching.update(Kpp.result.vertex_star.get(w, ()))
    return Subcomplex(Kpp.result, closure(touching), check=False)


# -- the membership criterion ---------------------------------------------

class Region(Enum):
    IN_L = "IN_L"
    IN_N_MINUS_L = "IN_N_MINUS_L"
    IN_INT_N_MINUS_L = "IN_INT_N_MINUS_L"
    OUTSIDE = "OUTSIDE"


def height_value(Kpp: DerivedComplex, A, x) -> Fraction:
    """Join-linear ``f_A(x)``: ``-1`` on the boundary of ``A``, ``c_A`` at its barycenter."""
    K = Kpp.original
    lam = barycentric_coords(x, K.points(A))
    if lam is None or min(lam) < 0:
        raise PointOutsideComplex(f"{x} is not in simplex {A}")
    k = len(A)
    t = 1 - k * min(lam)  # x = a + t (p - a) with p on the boundary
    c = Kpp.center_value[tuple(A)]
    return (1 - t) * c - t


def classify_point(x, L, Kpp: DerivedComplex) -> Region:
    """Locate ``x`` relative to ``L`` and its lagging derived neighborhood.

    Uses the radial recursion: ``x`` lies in ``N \\ L`` iff ``x`` is not in
    ``L``, the radial boundary point ``p_x`` lies in ``N`` and the height
    function of the carrier of ``x`` is ``<= 0`` there (``< 0`` for the
    interior).
    """
    Ls = set(L.simplexes if isinstance(L, Subcomplex) else L)
    K = Kpp.original
    C, lam = K.locate(point(x))
    return _classify(point(x), C, lam, Ls, Kpp)


def _classify(x, C, lam, Ls, Kpp):
    K = Kpp.original
    if C in Ls:
        return Region.IN_L
    k = len(C)
    if k == 1:
        return Region.OUTSIDE
    m = min(lam)
    t = 1 - k * m
    if t == 0:
        return Region.OUTSIDE  # the barycenter, where f is positive
    c = Kpp.center_value[C]
    f = (1 - t) * c - t
    if f > 0:
        return Region.OUTSIDE
    # p = a + (x - a)/t, in barycentric coordinates of C
    a = Fraction(1, k)
    mu = [a + (l - a) / t for l in lam]
    keep = [i for i, v in enumerate(mu) if v > 0]
    pC = tuple(C[i] for i in keep)
    pl = tuple(mu[i] for i in keep)
    px = combo(pl, K.points(pC))
    sub = _classify(px, pC, pl, Ls, Kpp)
    if sub is Region.OUTSIDE:
        return Region.OUTSIDE
    if f < 0 and sub in (Region.IN_L, Region.IN_INT_N_MINUS_L):
        return Region.IN_INT_N_MINUS_L
    return Region.IN_N_MINUS_L


def point_region_direct(x, L, Kpp: DerivedComplex) -> Region:
    """Oracle: classify ``x`` by locating it in the derived complex itself."""
    Ls = set(L.simplexes if isinstance(L, Subcomplex) else L)
    R = Kpp.result
    s, _ = R.locate(point(x))
    if Kpp.carrier(s) in Ls:
        return Region.IN_L
    N = derived_neighborhood(Kpp, Ls).simplexes
    if s not in N:
        return Region.OUTSIDE
    star = [t for t in R.vertex_star[s[0]] if set(s) <= set(t)]
    if all(t in N for t in star):
        return Region.IN_INT_N_MINUS_L
    return Region.IN_N_MINUS_L
