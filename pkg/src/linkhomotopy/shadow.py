"""Exact overshadowing predicates and sunny / stable collapse certificates.

Heights are the last coordinate of Q x I and the vertical projection P drops
it.  ``A`` overshadows ``B`` when some ``a`` in ``A`` and ``b`` in ``B`` have
``P F(a) = P F(b)`` and ``height F(a) > height F(b)``.  The decision is the
sign of the maximal height gap over the fiber-product polytope, computed by
exact LP.  Shadows are never materialized as point sets.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .complex import Complex, Subcomplex, closure, simplex_key
from .errors import NotSubcomplexPair, OvershadowCycle
from .exact import ONE, ZERO, barycentric_coords, combo, fmt, linprog_max, max_dist
from .maps import SimplicialMap


@dataclass(frozen=True)
class Mode:
    """Which shadow to use: ``plain``, ``link`` or ``eps`` (with its radius)."""

    kind: str = "link"
    eps: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("plain", "link", "eps"):
            raise ValueError(f"unknown shadow mode {self.kind!r}")
        if self.kind == "eps" and (self.eps is None or self.eps <= 0):
            raise ValueError("eps mode needs a positive radius")

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        if isinstance(value, dict):
            return cls(value["kind"], Fraction(value["eps"]) if value.get("eps") is not None else None)
        if isinstance(value, str) and value.startswith("eps"):
            _, _, r = value.partition(":")
            return cls("eps", Fraction(r))
        return cls(value)

    def to_json(self):
        return {"kind": self.kind, "eps": fmt(self.eps) if self.eps is not None else None}

    def __str__(self):
        return f"eps:{fmt(self.eps)}" if self.kind == "eps" else self.kind


PLAIN = Mode("plain")
LINK = Mode("link")


@dataclass
class OvershadowFact:
    A: tuple
    B: tuple
    mode: Mode
    verdict: bool
    witness: tuple | None = None
    open_target: bool = False
    reason: str = ""

    def to_json(self):
        return {
            "A": list(self.A), "B": list(self.B), "mode": self.mode.to_json(),
            "verdict": self.verdict, "open_target": self.open_target,
            "witness": None if self.witness is None else [[fmt(c) for c in p] for p in self.witness],
            "reason": self.reason,
        }


@dataclass
class SunnyCertificate:
    step: int
    mode: Mode
    stable: bool
    checked_pairs: list = field(default_factory=list)
    verdict: bool = True

    @property
    def failing(self) -> list:
        return [f for f in self.checked_pairs if f.verdict]

    def to_json(self):
        return {"step": self.step, "mode": self.mode.to_json(), "stable": self.stable,
                "verdict": self.verdict, "checked_pairs": [f.to_json() for f in self.checked_pairs]}


def _labels(part, K):
    if part is None:
        return None
    labels = getattr(part, "labels", part)
    return tuple(labels)


def _lp_gap(K: Complex, F: SimplicialMap, A, B, open_target: bool, side=None):
    """Maximize ``min(gap, beta_j)`` (or just the gap) over the fiber product.

    ``side = (k, sign, eps)`` adds ``sign * (p(a)_k - p(b)_k) >= eps``.
    Returns ``(value, alpha, beta)`` or ``None`` when infeasible.
    """
    na, nb = len(A), len(B)
    pa = F.image_points(A)
    pb = F.image_points(B)
    m = len(pa[0]) - 1
    nvar = na + nb + 1
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for k in range(m):
        A_eq.append([pa[i][k] for i in range(na)] + [-pb[j][k] for j in range(nb)] + [ZERO])
        b_eq.append(ZERO)
    A_eq.append([ONE] * na + [ZERO] * (nb + 1))
    b_eq.append(ONE)
    A_eq.append([ZERO] * na + [ONE] * nb + [ZERO])
    b_eq.append(ONE)
    # t - gap <= 0
    A_ub.append([-pa[i][-1] for i in range(na)] + [pb[j][-1] for j in range(nb)] + [ONE])
    b_ub.append(ZERO)
    if open_target:
        for j in range(nb):
            row = [ZERO] * nvar
            row[na + j] = -ONE
            row[-1] = ONE
            A_ub.append(row)
            b_ub.append(ZERO)
    if side is not None:
        k, sign, eps = side
        xa = K.points(A)
        xb = K.points(B)
        A_ub.append([-sign * xa[i][k] for i in range(na)] + [sign * xb[j][k] for j in range(nb)] + [ZERO])
        b_ub.append(-eps)
    row = [ZERO] * nvar
    row[-1] = ONE
    A_ub.append(row)
    b_ub.append(ONE)
    res = linprog_max(row, A_eq, b_eq, A_ub, b_ub)
    if res.status != "optimal":
        return None
    return res.value, res.x[:na], res.x[na:na + nb]


def overshadows(F: SimplicialMap, A, B, mode=LINK, part=None, open_target: bool = False) -> OvershadowFact:
    """Decide whether simplex ``A`` (link-/eps-)overshadows simplex ``B``.

    With ``open_target`` the overshadowed point must lie in the relative
    interior of ``B``.  ``part`` gives component labels of source vertices.
    """
    mode = Mode.parse(mode)
    K = F.source
    A = tuple(sorted(A))
    B = tuple(sorted(B))
    labels = _labels(part, K)
    if mode.kind == "link":
        if labels is None:
            raise ValueError("link mode needs a partition")
        if labels[A[0]] == labels[B[0]]:
            return OvershadowFact(A, B, mode, False, None, open_target, "same component")
    sides = [None]
    if mode.kind == "eps":
        dx = K.ambient_dim - 1
        sides = [(k, s, mode.eps) for k in range(dx) for s in (ONE, -ONE)]
    for side in sides:
        out = _lp_gap(K, F, A, B, open_target, side)
        if out is None:
            continue
        value, alpha, beta = out
        if value > 0:
            a = combo(alpha, K.points(A))
            b = combo(beta, K.points(B))
            return OvershadowFact(A, B, mode, True, (a, b), open_target, "")
    return OvershadowFact(A, B, mode, False, None, open_target, "no positive height gap")


def check_fact_witness(F: SimplicialMap, fact: OvershadowFact, part=None) -> bool:
    """Re-evaluate a positive fact's witness exactly."""
    if not fact.verdict or fact.witness is None:
        return False
    K = F.source
    a, b = fact.witness
    la = barycentric_coords(a, K.points(fact.A))
    lb = barycentric_coords(b, K.points(fact.B))
    if la is None or lb is None or min(la) < 0 or min(lb) < 0:
        return False
    if fact.open_target and min(lb) <= 0:
        return False
    fa = combo(la, F.image_points(fact.A))
    fb = combo(lb, F.image_points(fact.B))
    if fa[:-1] != fb[:-1] or not fa[-1] > fb[-1]:
        return False
    if fact.mode.kind == "link":
        labels = _labels(part, K)
        if labels[fact.A[0]] == labels[fact.B[0]]:
            return False
    if fact.mode.kind == "eps" and max_dist(a[:-1], b[:-1]) < fact.mode.eps:
        return False
    return True


class ShadowOracle:
    """Cached overshadow decisions over one source complex.

    Candidate pairs are screened with conservative float boxes (padded so
    that a rejected pair is rejected in exact arithmetic as well); every
    surviving pair is decided by the exact LP.
    """

    def __init__(self, F: SimplicialMap, part=None, mode=LINK):
        self.F = F
        self.K = F.source
        self.mode = Mode.parse(mode)
        self.labels = _labels(part, self.K)
        if self.mode.kind == "link" and self.labels is None:
            raise ValueError("link mode needs a partition")
        self.cache = {}
        imgs = F.images
        self._img = np.array([[float(c) for c in q] for q in imgs])
        self._src = self.K._float_coords

    def fact(self, A, B, open_target=False) -> OvershadowFact:
        key = (A, B, open_target)
        f = self.cache.get(key)
        if f is None:
            f = overshadows(self.F, A, B, self.mode, self.labels, open_target)
            self.cache[key] = f
        return f

    def _boxes(self, simps):
        lo = np.array([self._img[list(s)].min(axis=0) for s in simps])
        hi = np.array([self._img[list(s)].max(axis=0) for s in simps])
        pad = 1e-9 * (1 + np.maximum(np.abs(lo), np.abs(hi)))
        return lo - pad, hi + pad

    def candidates(self, As, Bs):
        """Pairs (A, B) that might overshadow; all others certainly do not."""
        As = list(As)
        Bs = list(Bs)
        if not As or not Bs:
            return []
        loA, hiA = self._boxes(As)
        loB, hiB = self._boxes(Bs)
        # P-boxes overlap and max height of A above min height of B
        ok = np.all((loA[:, None, :-1] <= hiB[None, :, :-1]) & (loB[None, :, :-1] <= hiA[:, None, :-1]), axis=2)
        ok &= hiA[:, None, -1] > loB[None, :, -1]
        if self.mode.kind == "link":
            la = np.array([self.labels[s[0]] for s in As])
            lb = np.array([self.labels[s[0]] for s in Bs])
            ok &= la[:, None] != lb[None, :]
        elif self.mode.kind == "eps":
            sa_lo = np.array([self._src[list(s)][:, :-1].min(axis=0) for s in As])
            sa_hi = np.array([self._src[list(s)][:, :-1].max(axis=0) for s in As])
            sb_lo = np.array([self._src[list(s)][:, :-1].min(axis=0) for s in Bs])
            sb_hi = np.array([self._src[list(s)][:, :-1].max(axis=0) for s in Bs])
            far = np.maximum(sa_hi[:, None, :] - sb_lo[None, :, :], sb_hi[None, :, :] - sa_lo[:, None, :]).max(axis=2)
            eps = float(self.mode.eps)
            ok &= far >= eps - 1e-9 * (1 + eps)
        ii, jj = np.nonzero(ok)
        return [(As[i], Bs[j]) for i, j in zip(ii.tolist(), jj.tolist())]

    def decide(self, As, Bs, open_target=False) -> list:
        return [self.fact(A, B, open_target) for A, B in self.candidates(As, Bs)]


def interior(W: Iterable, ambient: Complex) -> set:
    """Simplexes of ``W`` whose open star in ``ambient`` lies in ``W``."""
    W = set(W)
    outside = [s for s in ambient.simplexes if s not in W]
    return W - closure(outside)


def _maximal(simps: set) -> list:
    out = []
    covered = set()
    for s in sorted(simps, key=lambda s: -len(s)):
        if s in covered:
            continue
        out.append(s)
        covered.update(closure([s]))
    return sorted(out, key=simplex_key)


def certify_step(F: SimplicialMap, V, W, mode=LINK, stable: bool = False, part=None,
                 oracle: ShadowOracle | None = None, step: int = 0, ambient: Complex | None = None) -> SunnyCertificate:
    """Certify one simple collapse ``V -> W`` as (stable) sunny in ``mode``."""
    mode = Mode.parse(mode)
    Vs = set(V.simplexes if isinstance(V, Subcomplex) else V)
    Ws = set(W.simplexes if isinstance(W, Subcomplex) else W)
    if not Ws <= Vs:
        raise NotSubcomplexPair("W is not contained in V")
    if oracle is None:
        oracle = ShadowOracle(F, part, mode)
    elif oracle.mode != mode:
        raise ValueError("oracle mode does not match")
    ambient = ambient or F.source
    if stable:
        targets = Vs - interior(Ws, ambient)
    else:
        targets = Vs - Ws
    targets = sorted(targets, key=simplex_key)
    facts = oracle.decide(_maximal(Vs), targets, open_target=True)
    verdict = not any(f.verdict for f in facts)
    return SunnyCertificate(step, mode, stable, facts, verdict)


def overshadow_order(F: SimplicialMap, simplexes, mode=LINK, part=None, oracle=None) -> list:
    """Order ``simplexes`` so that overshadowing ones come first.

    Ties keep the input order.  Raises :class:`OvershadowCycle` on a cycle.
    """
    simplexes = [tuple(sorted(s)) for s in simplexes]
    oracle = oracle or ShadowOracle(F, part, mode)
    n = len(simplexes)
    succ = {i: [] for i in range(n)}
    indeg = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and oracle.fact(simplexes[i], simplexes[j]).verdict:
                succ[i].append(j)
                indeg[j] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) < n:
        remaining = [i for i in range(n) if i not in set(order)]
        # walk predecessors inside the remaining set to extract a cycle
        rem = set(remaining)
        start = remaining[0]
        path, seen = [start], {start: 0}
        cur = start
        while True:
            nxt = next(j for j in succ[cur] if j in rem and indeg[j] > 0)
            if nxt in seen:
                cyc = path[seen[nxt]:]
                raise OvershadowCycle([simplexes[k] for k in cyc])
            seen[nxt] = len(path)
            path.append(nxt)
            cur = nxt
    return [simplexes[i] for i in order]
