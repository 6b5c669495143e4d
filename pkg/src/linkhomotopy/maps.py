"""Simplicial maps, singular sets, link-map predicates and general position."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .complex import Complex, Partition, ProductComplex, Subcomplex, closure
from .errors import PerturbationFailed
from .exact import ONE, ZERO, combo, linprog_max, point, rank, sub


class SimplicialMap:
    """Vertex assignment ``source -> target`` extended barycentrically."""

    def __init__(self, source: Complex, target: Complex, vertex_map, check: bool = True):
        self.source = source
        self.target = target
        self.vertex_map = tuple(int(v) for v in vertex_map)
        if len(self.vertex_map) != len(source.vertices):
            raise ValueError("vertex_map must cover every source vertex")
        if check:
            for s in source.simplexes:
                img = tuple(sorted({self.vertex_map[v] for v in s}))
                if img not in target.simplexes:
                    raise ValueError(f"image of {s} is not a simplex of the target")

    @classmethod
    def from_images(cls, source: Complex, images) -> "SimplicialMap":
        """Map whose target is the image complex spanned by ``images``."""
        images = [point(q) for q in images]
        index = {}
        tverts = []
        vmap = []
        for q in images:
            if q not in index:
                index[q] = len(tverts)
                tverts.append(q)
            vmap.append(index[q])
        simp = closure(tuple(sorted({vmap[v] for v in s})) for s in source.facets)
        target = Complex(tverts, simp, len(tverts[0]) if tverts else 0)
        return cls(source, target, vmap, check=False)

    @property
    def images(self) -> list:
        tv = self.target.vertices
        return [tv[w] for w in self.vertex_map]

    def image_points(self, s) -> list:
        tv = self.target.vertices
        return [tv[self.vertex_map[v]] for v in s]

    def project(self) -> "SimplicialMap":
        """Compose with the vertical projection ``P: Q x I -> Q`` (drop the height)."""
        return SimplicialMap.from_images(self.source, [q[:-1] for q in self.images])

    def height(self, v) -> Fraction:
        return self.target.vertices[self.vertex_map[v]][-1]

    def restrict_level(self, prod: ProductComplex, j: int) -> "SimplicialMap":
        """The map ``x -> P F(x, t_j)`` on the base complex."""
        imgs = [self.images[prod.vertex(v, j)][:-1] for v in range(len(prod.base.vertices))]
        return SimplicialMap.from_images(prod.base, imgs)


def evaluate(f: SimplicialMap, x):
    s, lam = f.source.locate(x)
    return combo(lam, f.image_points(s))


# -- intersection kernels -------------------------------------------------

def common_point(groups, strict=None):
    """Find a common point of several convex hulls.

    ``groups`` is a list of vertex-point lists.  ``strict[g]`` asks for a
    point in the relative interior of hull ``g``.  Returns the list of
    barycentric weight vectors, or ``None``.
    """
    strict = strict or [False] * len(groups)
    sizes = [len(g) for g in groups]
    offs = np.cumsum([0] + sizes).tolist()
    nvar = offs[-1] + 1
    d = len(groups[0][0])
    A_eq, b_eq = [], []
    for g in range(1, len(groups)):
        for k in range(d):
            row = [ZERO] * nvar
            for i, p in enumerate(groups[0]):
                row[offs[0] + i] = p[k]
            for i, p in enumerate(groups[g]):
                row[offs[g] + i] = -p[k]
            A_eq.append(row)
            b_eq.append(ZERO)
    for g in range(len(groups)):
        row = [ZERO] * nvar
        for i in range(sizes[g]):
            row[offs[g] + i] = ONE
        A_eq.append(row)
        b_eq.append(ONE)
    A_ub, b_ub = [], []
    any_strict = any(strict)
    for g in range(len(groups)):
        if strict[g]:
            for i in range(sizes[g]):
                row = [ZERO] * nvar
                row[offs[g] + i] = -ONE
                row[-1] = ONE
                A_ub.append(row)
                b_ub.append(ZERO)
    c = [ZERO] * nvar
    if any_strict:
        c[-1] = ONE
        row = [ZERO] * nvar
        row[-1] = ONE
        A_ub.append(row)
        b_ub.append(ONE)
    res = linprog_max(c, A_eq, b_eq, A_ub, b_ub)
    if res.status != "optimal" or (any_strict and res.value <= 0):
        return None
    return [res.x[offs[g]:offs[g + 1]] for g in range(len(groups))]


def _float_boxes(pts_list):
    lo = np.array([[float(min(p[k] for p in pts)) for k in range(len(pts[0]))] for pts in pts_list])
    hi = np.array([[float(max(p[k] for p in pts)) for k in range(len(pts[0]))] for pts in pts_list])
    pad = 1e-9 * (1 + np.maximum(np.abs(lo), np.abs(hi)))
    return lo - pad, hi + pad


def box_overlap_pairs(boxes_a, boxes_b):
    """Index pairs ``(i, j)`` whose (padded) boxes overlap.  Conservative."""
    lo_a, hi_a = boxes_a
    lo_b, hi_b = boxes_b
    if len(lo_a) == 0 or len(lo_b) == 0:
        return []
    ok = np.all((lo_a[:, None, :] <= hi_b[None, :, :]) & (lo_b[None, :, :] <= hi_a[:, None, :]), axis=2)
    return list(zip(*np.nonzero(ok)))


# -- singular set ---------------------------------------------------------

def _degenerate(pts) -> bool:
    if len(pts) <= 1:
        return False
    if len(set(pts)) != len(pts):
        return True
    return rank([sub(p, pts[0]) for p in pts[1:]]) < len(pts) - 1


def singular_simplexes(K: Complex, images) -> set:
    """Simplexes carrying non-injectivity of the PL map given by vertex ``images``."""
    simp = K.ordered
    pts = [[images[v] for v in s] for s in simp]
    marked = {s for s, p in zip(simp, pts) if _degenerate(p)}
    boxes = _float_boxes(pts)
    for i, j in box_overlap_pairs(boxes, boxes):
        if i >= j:
            continue
        a, b = simp[i], simp[j]
        if a in marked and b in marked:
            continue
        if common_point([pts[i], pts[j]], [True, True]) is not None:
            marked.add(a)
            marked.add(b)
    return closure(marked)


def singular_set(g: SimplicialMap) -> Subcomplex:
    return Subcomplex(g.source, singular_simplexes(g.source, g.images), check=False)


# -- link maps / doodles --------------------------------------------------

@dataclass
class Witness:
    simplexes: tuple
    source_points: tuple
    image: tuple


def _labels_of(part, K):
    labels = part.labels if isinstance(part, Partition) else tuple(part)
    if len(labels) != len(K.vertices):
        raise ValueError("partition does not cover the source")
    return labels


def is_doodle(f: SimplicialMap, part, l: int = 3):
    """``(True, None)`` iff no ``l`` distinct components share an image point."""
    if l < 2:
        raise ValueError("l must be at least 2")
    K = f.source
    labels = _labels_of(part, K)
    by_comp = {}
    for s in K.facets:
        by_comp.setdefault(labels[s[0]], []).append(s)
    comps = sorted(by_comp)
    for combo_ in combinations(comps, l):
        lists = [by_comp[c] for c in combo_]
        boxes = [_float_boxes([f.image_points(s) for s in lst]) for lst in lists]
        # prune with pairwise box overlap against the first component
        for tup in product(*[range(len(lst)) for lst in lists]):
            lo = np.max([boxes[g][0][tup[g]] for g in range(l)], axis=0)
            hi = np.min([boxes[g][1][tup[g]] for g in range(l)], axis=0)
            if np.any(lo > hi):
                continue
            simps = [lists[g][tup[g]] for g in range(l)]
            groups = [f.image_points(s) for s in simps]
            sol = common_point(groups)
            if sol is not None:
                src = tuple(combo(w, K.points(s)) for w, s in zip(sol, simps))
                return False, Witness(tuple(simps), src, combo(sol[0], groups[0]))
    return True, None


def is_link_map(f: SimplicialMap, part):
    return is_doodle(f, part, 2)


# -- general position -----------------------------------------------------

@dataclass
class GPReport:
    singular_set: Subcomplex
    codim_ok: bool
    nondegenerate_ok: bool
    offending_simplexes: list = field(default_factory=list)
    m: int = 0
    n: int = 0

    @property
    def ok(self) -> bool:
        return self.codim_ok and self.nondegenerate_ok


def gp_report(K: Complex, images, n: int, m: int) -> GPReport:
    """General-position report for a map of ``K`` (a triangulated X x I) into Q x I."""
    S = singular_simplexes(K, [q[:-1] for q in images])
    need = m - n - 1
    codim_ok, nondeg_ok = True, True
    offending = []
    for s in sorted(S, key=lambda s: (len(s), s)):
        d = len(s) - 1
        bad = False
        if not any(len(t) - 1 >= d + need for t in K.vertex_star[s[0]] if set(s) <= set(t)):
            codim_ok = False
            bad = True
        if _degenerate([K.vertices[v][:-1] for v in s]):
            nondeg_ok = False
            bad = True
        if bad:
            offending.append(s)
    return GPReport(Subcomplex(K, S, check=False), codim_ok, nondeg_ok, offending, m, n)


def check_general_position(F: SimplicialMap, X_prod: ProductComplex, Q_prod: ProductComplex) -> GPReport:
    return gp_report(F.source, F.images, X_prod.base.dim, Q_prod.base.dim)


def perturb_general_position(F: SimplicialMap, X_prod: ProductComplex, Q_prod: ProductComplex,
                             magnitude, seed: int, retry_budget: int = 32, movable=None,
                             denominator: int = 997) -> SimplicialMap:
    """Las Vegas perturbation of the Q-coordinates of vertex images.

    Heights are never touched, so level preimages stay exactly the same.
    ``movable`` restricts which source vertices may move (default: all).
    """
    magnitude = Fraction(magnitude)
    report = check_general_position(F, X_prod, Q_prod)
    if report.ok:
        return F
    if magnitude <= 0:
        raise PerturbationFailed("map is not in general position and the perturbation magnitude is 0", report)
    rng = random.Random(seed)
    if movable is None:
        movable = range(len(F.source.vertices))
    movable = sorted(set(movable))
    base = F.images
    for _ in range(retry_budget):
        imgs = list(base)
        for v in movable:
            q = imgs[v]
            disp = [magnitude * Fraction(rng.randint(-denominator, denominator), denominator) for _ in range(len(q) - 1)]
            imgs[v] = tuple(a + b for a, b in zip(q[:-1], disp)) + (q[-1],)
        G = SimplicialMap.from_images(F.source, imgs)
        report = check_general_position(G, X_prod, Q_prod)
        if report.ok:
            return G
    raise PerturbationFailed(f"no general-position perturbation within {retry_budget} attempts", report)
