"""Deterministic example concordances.

Every generator takes a seed and returns a :class:`Concordance`; the same
seed always gives the same fixture.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .complex import Complex, Partition, ProductComplex, build_complex, closure, staircase_product
from .errors import UnknownExample
from .maps import SimplicialMap, gp_report, is_doodle, is_link_map, singular_simplexes


@dataclass
class Concordance:
    """A map ``F: X x I -> Q x I`` with its triangulations and partition."""

    name: str
    seed: int
    X: Complex
    part: Partition
    Xp: ProductComplex
    F: SimplicialMap
    Q: Complex
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.Q.ambient_dim

    @property
    def n(self) -> int:
        return self.X.dim

    @property
    def labels(self) -> tuple:
        return self.Xp.lift(self.part)


def cube(d: int, side=1) -> Complex:
    """Staircase (Freudenthal) triangulation of ``[0, side]^d``."""
    side = Fraction(side)
    corners = [tuple(side * ((i >> k) & 1) for k in range(d)) for i in range(2 ** d)]
    index = {c: i for i, c in enumerate(corners)}
    tops = []
    for perm in permutations(range(d)):
        cur = [Fraction(0)] * d
        chain = [index[tuple(cur)]]
        for k in perm:
            cur[k] = side
            chain.append(index[tuple(cur)])
        tops.append(tuple(sorted(chain)))
    return Complex(corners, closure(tops), d)


def _rq(rng, lo, hi, den=16) -> Fraction:
    return Fraction(rng.randint(int(lo * den) + 1, int(hi * den) - 1), den)


def _concordance(name, seed, X, labels, levels, image_of, Q, meta=None) -> Concordance:
    Xp = staircase_product(X, levels)
    imgs = [image_of(Xp.base_vertex[w], Xp.level_index[w]) for w in range(len(Xp.total.vertices))]
    F = SimplicialMap.from_images(Xp.total, imgs)
    return Concordance(name, seed, X, Partition.from_labels(labels), Xp, F, Q, meta or {})


def two_points_3cube(seed: int) -> Concordance:
    """Two point components whose arcs swap places inside ``[0,3]^3``.

    Interior-level heights wander off their level, so the concordance is
    not level-preserving.
    """
    rng = random.Random(seed)
    Q = cube(3, 3)
    levels = (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1)
    X = build_complex([(0,), (1,)], [(0,), (1,)])
    for _ in range(1000):
        a = [tuple(_rq(rng, 0, 3) for _ in range(3)) for _ in range(2)]
        mid = [[tuple(_rq(rng, 0, 3) for _ in range(3)) for _ in range(3)] for _ in range(2)]
        hts = [[_rq(rng, 0, 1) for _ in range(3)] for _ in range(2)]
        off = tuple(_rq(rng, -Fraction(1, 4), Fraction(1, 4)) for _ in range(3))

        def image_of(v, j):
            if j == 0:
                return a[v] + (Fraction(0),)
            if j == 4:
                # braid: the endpoints (nearly) swap
                return tuple(p + o for p, o in zip(a[1 - v], off)) + (Fraction(1),)
            return mid[v][j - 1] + (hts[v][j - 1],)

        c = _concordance("two-points-3cube", seed, X, [1, 2], levels, image_of, Q)
        inside = all(0 < q < 3 for img in c.F.images for q in img[:-1])
        if inside and is_link_map(c.F, c.labels)[0] and gp_report(c.Xp.total, c.F.images, 0, 3).ok:
            return c
    raise RuntimeError("could not generate a fixture")  # pragma: no cover


def doodle_3arcs(seed: int) -> Concordance:
    """Three point components; each pair of arcs meets once at an interior vertex."""
    rng = random.Random(seed)
    Q = cube(3, 3)
    levels = (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1)
    X = build_complex([(0,), (1,), (2,)], [(0,), (1,), (2,)])
    pairs = [(0, 1), (0, 2), (1, 2)]
    for _ in range(1000):
        pts = {(v, j): tuple(_rq(rng, 0, 3) for _ in range(3)) + (Fraction(j, 4) if j in (0, 4) else _rq(rng, 0, 1),)
               for v in range(3) for j in range(5)}
        # pair k crosses at level k+1: the second arc passes through the first's vertex
        for k, (u, v) in enumerate(pairs):
            pts[(v, k + 1)] = pts[(u, k + 1)]
        c = _concordance("doodle-3arcs", seed, X, [1, 2, 3], levels, lambda v, j: pts[(v, j)], Q,
                         {"crossings": [[u, v, k + 1] for k, (u, v) in enumerate(pairs)]})
        ok3 = is_doodle(c.F, c.labels, 3)[0]
        # each pair meets exactly at its crossing vertex and nowhere else
        ok2 = all(_pair_meets_once(c, u, v, k + 1) for k, (u, v) in enumerate(pairs))
        if ok3 and ok2:
            return c
    raise RuntimeError("could not generate a fixture")  # pragma: no cover


def _pair_meets_once(c: Concordance, u: int, v: int, j: int) -> bool:
    T = c.Xp.total
    keep = [s for s in T.simplexes if all(c.Xp.base_vertex[w] in (u, v) for w in s)]
    sub = Complex(T.vertices, keep, T.ambient_dim)
    S = singular_simplexes(sub, c.F.images)
    return S == {(c.Xp.vertex(u, j),), (c.Xp.vertex(v, j),)}


def eps_embedding(seed: int, eps=Fraction(1, 4), pieces: int = 10) -> Concordance:
    """A fine path in ``R^4 x I`` whose vertical projection is injective.

    The mesh of X is ``1/pieces`` which must stay below ``eps / 2``.
    """
    rng = random.Random(seed)
    eps = Fraction(eps)
    if Fraction(1, pieces) >= eps / 2:
        raise ValueError("mesh must be below eps/2")
    Q = cube(4, 2)
    X = build_complex([(Fraction(i, pieces),) for i in range(pieces + 1)],
                      [(i, i + 1) for i in range(pieces)])
    levels = (0, Fraction(1, 2), 1)
    for _ in range(1000):
        pts = {}
        for v in range(pieces + 1):
            x = X.vertices[v][0]
            for j, t in enumerate(levels):
                h = t if j != 1 else _rq(rng, Fraction(1, 4), Fraction(3, 4))
                pts[(v, j)] = (x + _rq(rng, 0, Fraction(1, 8), 64), t + _rq(rng, 0, Fraction(1, 8), 64),
                               _rq(rng, 0, 1), _rq(rng, 0, 1), h)
        c = _concordance("eps-embedding", seed, X, [1] * (pieces + 1), levels, lambda v, j: pts[(v, j)], Q,
                         {"eps": eps})
        if not gp_report(c.Xp.total, c.F.images, 1, 4).singular_set.simplexes:
            return c
    raise RuntimeError("could not generate a fixture")  # pragma: no cover


def two_circles_4cube(seed: int) -> Concordance:
    """Two triangle boundaries in ``[0,4]^4 x I`` with one vertical double point.

    Vertices ``w1`` (first circle) and ``w2`` (second) at level 1/2 share
    their Q-image with ``w1`` higher, so ``w1`` overshadows ``w2``.  The
    first circle lies in ``a + b >= 2`` and the second in ``a + b < 2``
    except at ``w2``, which keeps the singular set exactly ``{w1, w2}``.
    """
    rng = random.Random(seed)
    Q = cube(4, 4)
    X = build_complex([(0, 0), (1, 0), (0, 1), (3, 0), (4, 0), (3, 1)],
                      [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    levels = (0, Fraction(1, 2), 1)
    base = [(1, 1), (2, 1), (1, 2), (Fraction(1, 2), Fraction(1, 2)), (Fraction(-1, 2), Fraction(1, 2)),
            (Fraction(1, 2), Fraction(-1, 2))]
    y1, y2 = 0, 3
    for _ in range(1000):
        pts = {}
        for v in range(6):
            c = Fraction(0)
            for j, t in enumerate(levels):
                c += _rq(rng, Fraction(1, 4), 1)  # increasing along every vertical line
                h = Fraction(t) if j != 1 else _rq(rng, Fraction(1, 4), Fraction(3, 4))
                # the first circle only moves away from a + b = 2, the second only below it
                da = _rq(rng, 0, Fraction(1, 8), 64) * (1 if v < 3 else -1) if v != y1 else Fraction(0)
                db = _rq(rng, 0, Fraction(1, 8), 64) * (1 if v < 3 else -1) if v != y1 else Fraction(0)
                pts[(v, j)] = (base[v][0] + 1 + da, base[v][1] + 1 + db, c, 1 + _rq(rng, 0, 2), h)
        hi, lo = sorted([pts[(y1, 1)][-1], pts[(y2, 1)][-1]], reverse=True)
        if hi == lo:
            continue
        pts[(y1, 1)] = pts[(y1, 1)][:-1] + (hi,)
        pts[(y2, 1)] = pts[(y1, 1)][:-1] + (lo,)
        c = _concordance("two-circles-4cube", seed, X, [1, 1, 1, 2, 2, 2], levels, lambda v, j: pts[(v, j)], Q)
        w1, w2 = c.Xp.vertex(y1, 1), c.Xp.vertex(y2, 1)
        c.meta.update({"w1": w1, "w2": w2})
        rep = gp_report(c.Xp.total, c.F.images, 1, 4)
        if rep.ok and rep.singular_set.simplexes == {(w1,), (w2,)} and is_link_map(c.F, c.labels)[0]:
            return c
    raise RuntimeError("could not generate a fixture")  # pragma: no cover


EXAMPLES = {
    "two-points-3cube": two_points_3cube,
    "doodle-3arcs": doodle_3arcs,
    "eps-embedding": eps_embedding,
    "two-circles-4cube": two_circles_4cube,
}


def generate(name: str, seed: int) -> Concordance:
    try:
        gen = EXAMPLES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(sorted(EXAMPLES))}") from None
    return gen(seed)
