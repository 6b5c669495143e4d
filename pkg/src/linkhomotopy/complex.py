"""Finite simplicial complexes with exact rational coordinates.

Simplexes are sorted tuples of vertex indices.  A :class:`Complex` is
immutable; algorithms that need to delete simplexes copy the simplex set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateSimplex, NotSubcomplex, OverlappingInteriors, PointOutsideComplex, SimplexNotFound
from .exact import ONE, ZERO, affinely_independent, barycentric_coords, linprog_max, point

Simplex = tuple


def faces(s: Simplex, include_self=True):
    """All nonempty faces of ``s``."""
    n = len(s)
    for k in range(n if include_self else n - 1, 0, -1):
        yield from combinations(s, k)


def boundary(s: Simplex):
    return [s[:i] + s[i + 1:] for i in range(len(s))] if len(s) > 1 else []


def closure(simplexes: Iterable[Simplex]) -> set:
    out = set()
    for s in simplexes:
        if s in out:
            continue
        out.update(faces(s))
    return out


def dim(s: Simplex) -> int:
    return len(s) - 1


def simplex_key(s):
    return (len(s), s)


class Complex:
    """A finite geometric simplicial complex.

    ``vertices`` holds exact coordinates; ``simplexes`` is closed under faces.
    Use :func:`build_complex` for validated construction.
    """

    def __init__(self, vertices: Sequence, simplexes: Iterable[Simplex], ambient_dim: int | None = None):
        self.vertices = tuple(vertices)
        self.simplexes = frozenset(simplexes)
        if ambient_dim is None:
            ambient_dim = len(self.vertices[0]) if self.vertices else 0
        self.ambient_dim = ambient_dim

    def __contains__(self, s):
        return s in self.simplexes

    def __len__(self):
        return len(self.simplexes)

    def __iter__(self):
        return iter(self.ordered)

    def __repr__(self):
        return f"<Complex dim={self.dim} f={self.f_vector}>"

    @cached_property
    def ordered(self) -> tuple:
        return tuple(sorted(self.simplexes, key=simplex_key))

    @cached_property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplexes), default=-1)

    @cached_property
    def f_vector(self) -> tuple:
        counts = [0] * (self.dim + 1)
        for s in self.simplexes:
            counts[len(s) - 1] += 1
        return tuple(counts)

    def of_dim(self, d: int) -> list:
        return [s for s in self.ordered if len(s) == d + 1]

    @cached_property
    def facets(self) -> tuple:
        cof = self.cofaces
        return tuple(s for s in self.ordered if not cof[s])

    @cached_property
    def cofaces(self) -> dict:
        """Codimension-one cofaces of every simplex."""
        cof = {s: [] for s in self.simplexes}
        for s in self.ordered:
            for f in boundary(s):
                cof[f].append(s)
        return {s: tuple(v) for s, v in cof.items()}

    @cached_property
    def vertex_star(self) -> dict:
        """vertex -> all simplexes containing it."""
        st = {}
        for s in self.ordered:
            for v in s:
                st.setdefault(v, []).append(s)
        return st

    def points(self, s: Simplex) -> list:
        return [self.vertices[v] for v in s]

    def barycenter(self, s: Simplex):
        from .exact import barycenter
        return barycenter(self.points(s))

    @cached_property
    def _float_coords(self) -> np.ndarray:
        return np.array([[float(c) for c in v] for v in self.vertices], dtype=float).reshape(len(self.vertices), -1)

    def float_box(self, s: Simplex):
        pts = self._float_coords[list(s)]
        return pts.min(axis=0), pts.max(axis=0)

    def locate(self, x) -> tuple:
        """Return ``(simplex, coords)`` with ``x`` in the relative interior of ``simplex``.

        ``coords`` are the (strictly positive) barycentric coordinates.
        """
        x = point(x)
        xf = np.array([float(c) for c in x])
        tol = 1e-9 * (1 + np.abs(xf))
        for s in self.facets:
            lo, hi = self.float_box(s)
            if np.any(xf < lo - tol) or np.any(xf > hi + tol):
                continue
            lam = barycentric_coords(x, self.points(s))
            if lam is None or any(c < 0 for c in lam):
                continue
            keep = [i for i, c in enumerate(lam) if c > 0]
            return tuple(s[i] for i in keep), tuple(lam[i] for i in keep)
        raise PointOutsideComplex(f"point {x} is not in the complex")

    def contains_point(self, x) -> bool:
        try:
            self.locate(x)
            return True
        except PointOutsideComplex:
            return False

    def components(self) -> list:
        """Vertex label (0-based connected-component index) per vertex."""
        parent = list(range(len(self.vertices)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for s in self.of_dim(1):
            ra, rb = find(s[0]), find(s[1])
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = {}
        return [roots.setdefault(find(v), len(roots)) for v in range(len(self.vertices))]

    def facet_list(self) -> list:
        return [list(s) for s in self.facets]


def _open_overlap(pa, pb) -> bool:
    """Do the relative interiors of two geometric simplexes meet?"""
    na, nb = len(pa), len(pb)
    d = len(pa[0])
    # variables alpha (na), beta (nb), t ; maximize t with alpha_i, beta_j >= t
    nvar = na + nb + 1
    A_eq = []
    b_eq = []
    for k in range(d):
        A_eq.append([pa[i][k] for i in range(na)] + [-pb[j][k] for j in range(nb)] + [ZERO])
        b_eq.append(ZERO)
    A_eq.append([ONE] * na + [ZERO] * nb + [ZERO])
    b_eq.append(ONE)
    A_eq.append([ZERO] * na + [ONE] * nb + [ZERO])
    b_eq.append(ONE)
    A_ub = []
    b_ub = []
    for i in range(na + nb):
        row = [ZERO] * nvar
        row[i] = -ONE
        row[-1] = ONE
        A_ub.append(row)
        b_ub.append(ZERO)
    c = [ZERO] * (nvar - 1) + [ONE]
    A_ub.append(c)
    b_ub.append(ONE)
    res = linprog_max(c, A_eq, b_eq, A_ub, b_ub)
    return res.status == "optimal" and res.value > 0


def check_disjoint_interiors(K: Complex) -> None:
    """Raise :class:`OverlappingInteriors` if two simplexes' interiors meet."""
    simplexes = K.ordered
    boxes = [K.float_box(s) for s in simplexes]
    for i in range(len(simplexes)):
        for j in range(i + 1, len(simplexes)):
            a, b = simplexes[i], simplexes[j]
            (la, ha), (lb, hb) = boxes[i], boxes[j]
            if np.any(ha < lb - 1e-9) or np.any(hb < la - 1e-9):
                continue
            if _open_overlap(K.points(a), K.points(b)):
                raise OverlappingInteriors(f"simplexes {a} and {b} overlap")


def build_complex(vertex_coords, facets, check_overlap: bool = False, ambient_dim: int | None = None) -> Complex:
    """Validated constructor: closes ``facets`` under faces."""
    verts = [point(v) for v in vertex_coords]
    if ambient_dim is None:
        ambient_dim = len(verts[0]) if verts else 0
    for v in verts:
        if len(v) != ambient_dim:
            raise ValueError(f"vertex {v} does not have dimension {ambient_dim}")
    simp = []
    for f in facets:
        f = list(f)
        if len(set(f)) != len(f):
            raise DegenerateSimplex(f"repeated vertex in {f}")
        for v in f:
            if not 0 <= v < len(verts):
                raise IndexError(f"vertex index {v} out of range")
        s = tuple(sorted(f))
        if not affinely_independent([verts[v] for v in s]):
            raise DegenerateSimplex(f"vertices of {s} are affinely dependent")
        simp.append(s)
    K = Complex(verts, closure(simp), ambient_dim)
    if check_overlap:
        check_disjoint_interiors(K)
    return K


class Subcomplex:
    """A face-closed subset of a parent complex's simplexes."""

    def __init__(self, parent: Complex, simplexes: Iterable[Simplex], check: bool = True):
        self.parent = parent
        self.simplexes = frozenset(simplexes)
        if check:
            for s in self.simplexes:
                if s not in parent.simplexes:
                    raise NotSubcomplex(f"{s} is not a simplex of the parent")
                for f in boundary(s):
                    if f not in self.simplexes:
                        raise NotSubcomplex(f"face {f} of {s} missing")

    def __contains__(self, s):
        return s in self.simplexes

    def __len__(self):
        return len(self.simplexes)

    def __iter__(self):
        return iter(sorted(self.simplexes, key=simplex_key))

    def __eq__(self, other):
        if isinstance(other, Subcomplex):
            return self.simplexes == other.simplexes
        return NotImplemented

    def __hash__(self):
        return hash(self.simplexes)

    def __repr__(self):
        return f"<Subcomplex {len(self.simplexes)} simplexes>"

    @property
    def vertices(self):
        return sorted(s[0] for s in self.simplexes if len(s) == 1)

    def as_complex(self) -> Complex:
        return Complex(self.parent.vertices, self.simplexes, self.parent.ambient_dim)

    def facets(self):
        out = []
        for s in self:
            if not any(c in self.simplexes for c in self.parent.cofaces[s]):
                out.append(s)
        return out


def star_link(K: Complex, s: Simplex):
    s = tuple(sorted(s))
    if s not in K:
        raise SimplexNotFound(f"{s} not in complex")
    containing = [t for t in K.vertex_star[s[0]] if set(s) <= set(t)]
    star = closure(containing)
    ss = set(s)
    link = {t for t in star if not ss & set(t)}
    return Subcomplex(K, star, check=False), Subcomplex(K, link, check=False)


def skeleton(K: Complex, d: int) -> Subcomplex:
    return Subcomplex(K, [s for s in K.simplexes if len(s) - 1 <= d], check=False)


def simplex_volume_ratio(piece_pts, orig_pts) -> Fraction:
    """Volume of ``piece`` relative to ``orig`` (same dimension, piece inside orig's hull)."""
    rows = []
    for p in piece_pts:
        lam = barycentric_coords(p, orig_pts)
        if lam is None:
            raise PointOutsideComplex("piece vertex off the original simplex's hull")
        rows.append(list(lam))
    return abs(_det(rows))


def _det(M) -> Fraction:
    M = [list(r) for r in M]
    n = len(M)
    det = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        pv = M[c][c]
        det *= pv
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] / pv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return det


# -- products -------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Component label (1..k) for every vertex of a base complex."""

    labels: tuple
    k: int

    @classmethod
    def from_labels(cls, labels):
        labels = tuple(int(x) for x in labels)
        return cls(labels, max(labels, default=0))

    @classmethod
    def of_components(cls, K: Complex):
        return cls.from_labels([c + 1 for c in K.components()])

    def check(self, K: Complex):
        if len(self.labels) != len(K.vertices):
            raise ValueError("partition does not cover every vertex")
        for s in K.of_dim(1):
            if self.labels[s[0]] != self.labels[s[1]]:
                raise ValueError(f"edge {s} joins two components")

    def of(self, s: Simplex) -> int:
        return self.labels[s[0]]


@dataclass
class ProductComplex:
    """A triangulation of ``base x [0, 1]`` with staircase simplexes.

    ``base_vertex[w]`` and ``level_index[w]`` recover the pair (v, t) of a
    total vertex ``w``; ``levels`` is the increasing list of I-coordinates.
    """

    base: Complex
    total: Complex
    levels: tuple
    base_vertex: tuple
    level_index: tuple
    index_of: dict = field(repr=False)

    def level(self, w: int) -> Fraction:
        return self.levels[self.level_index[w]]

    def vertex(self, v: int, j: int) -> int:
        return self.index_of[(v, j)]

    def _at_level(self, j) -> Subcomplex:
        return Subcomplex(self.total, [s for s in self.total.simplexes
                                       if all(self.level_index[w] == j for w in s)], check=False)

    @cached_property
    def bottom(self) -> Subcomplex:
        return self._at_level(0)

    @cached_property
    def top(self) -> Subcomplex:
        return self._at_level(len(self.levels) - 1)

    @cached_property
    def proj(self):
        from .maps import SimplicialMap
        return SimplicialMap(self.total, self.base, self.base_vertex)

    def lift(self, labels: Partition) -> tuple:
        """Component labels of the total complex's vertices."""
        return tuple(labels.labels[v] for v in self.base_vertex)


def staircase_product(K: Complex, levels=(0, 1)) -> ProductComplex:
    """Triangulate ``K x I`` by monotone staircase chains.

    Base simplexes are ordered by vertex index; with ``levels`` of length
    ``L+1`` every d-simplex yields ``L (d+1)`` top simplexes.
    """
    if not K.vertices:
        raise ValueError("cannot take the product of an empty complex")
    levels = tuple(sorted(point(levels)))
    if levels[0] != 0 or levels[-1] != 1 or len(set(levels)) != len(levels):
        raise ValueError("levels must be increasing from 0 to 1")
    nv = len(K.vertices)
    verts, base_vertex, level_index, index_of = [], [], [], {}
    for j, t in enumerate(levels):
        for v in range(nv):
            index_of[(v, j)] = len(verts)
            verts.append(K.vertices[v] + (t,))
            base_vertex.append(v)
            level_index.append(j)
    tops = []
    for s in K.facets:
        d = len(s) - 1
        for j in range(len(levels) - 1):
            for i in range(d + 1):
                chain = [index_of[(v, j)] for v in s[: i + 1]] + [index_of[(v, j + 1)] for v in s[i:]]
                tops.append(tuple(sorted(chain)))
    total = Complex(verts, closure(tops), K.ambient_dim + 1)
    return ProductComplex(K, total, levels, tuple(base_vertex), tuple(level_index), index_of)
