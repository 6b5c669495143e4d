"""From a stable sunny collapse to a level-preserving homotopy.

Each elementary step ``(sigma, tau)`` with ``sigma = tau * v`` becomes a
radial retraction of ``sigma`` onto ``v * d(tau)`` from the point
``o = 2 bary(tau) - v`` beyond the free face.  During its time slot a point
moves along a straight segment inside ``sigma``, and ``F`` is linear on
``sigma``, so for a fixed ``x`` the curve ``t -> Phi(x, t)`` is piecewise
linear with breaks only at slot boundaries.  That is what makes the
one-dimensional verification exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .complex import Complex, Partition, ProductComplex
from .errors import CodimensionTooLow, InvalidSequence, PointOutsideComplex, VerificationFailed
from .exact import ONE, ZERO, barycentric_coords, combo, fmt, lerp, linprog_max, max_dist, point
from .maps import SimplicialMap, evaluate, is_doodle


@dataclass
class Stage:
    coface: tuple
    free_face: tuple
    apex: int
    start: Fraction
    end: Fraction


class PLDeformation:
    """The homotopy ``h_s`` of the ambient complex given by a collapse."""

    def __init__(self, ambient: Complex, stages: list, groups: list):
        self.ambient = ambient
        self.stages = stages
        self.groups = groups
        n = len(stages)
        X = ambient._float_coords
        if n:
            self._lo = np.array([X[list(st.coface)].min(axis=0) for st in stages])
            self._hi = np.array([X[list(st.coface)].max(axis=0) for st in stages])
        else:
            self._lo = self._hi = np.zeros((0, ambient.ambient_dim))

    def _coords(self, k, y):
        """Barycentric coordinates of ``y`` in stage ``k``'s coface, or ``None``."""
        st = self.stages[k]
        lam = barycentric_coords(y, self.ambient.points(st.coface))
        if lam is None or min(lam) < 0:
            return None
        return lam

    def retract(self, k, y, lam=None):
        """Full radial retraction of stage ``k`` applied to ``y``."""
        st = self.stages[k]
        if lam is None:
            lam = self._coords(k, y)
            if lam is None:
                return y
        idx = {v: i for i, v in enumerate(st.coface)}
        kk = len(st.free_face)
        two = Fraction(2, kk)
        s = min(lam[idx[v]] / (two - lam[idx[v]]) for v in st.free_face if lam[idx[v]] < two)
        if s == 0:
            return y
        tau = combo([Fraction(1, kk)] * kk, self.ambient.points(st.free_face))
        o = tuple(2 * a - b for a, b in zip(tau, self.ambient.vertices[st.apex]))
        return tuple(a + s * (a - b) for a, b in zip(y, o))

    def _candidates(self, y, after):
        yf = np.array([float(c) for c in y])
        pad = 1e-9 * (1 + np.abs(yf))
        ok = np.all((self._lo <= yf + pad) & (self._hi >= yf - pad), axis=1)
        ok[:after] = False
        return np.nonzero(ok)[0]

    def track(self, y) -> list:
        """Moves of ``y``: list of ``(stage index, before, after, coords)``."""
        y = point(y)
        out = []
        k = 0
        n = len(self.stages)
        while k < n:
            moved = False
            for j in self._candidates(y, k).tolist():
                lam = self._coords(j, y)
                if lam is None:
                    continue
                z = self.retract(j, y, lam)
                if z != y:
                    out.append((j, y, z, lam))
                    y = z
                    k = j + 1
                    moved = True
                    break
            if not moved:
                break
        return out

    def at(self, y, s) -> tuple:
        """``h_s(y)`` exactly."""
        y = point(y)
        s = Fraction(s)
        for j, before, after, _ in self.track(y):
            st = self.stages[j]
            if s >= st.end:
                y = after
            elif s > st.start:
                u = (s - st.start) / (st.end - st.start)
                return lerp(before, after, u)
            else:
                return before
        return y


def collapse_to_deformation(seq) -> PLDeformation:
    """Stages in sequence order; time divided evenly among simple groups."""
    from .collapse import verify_collapse
    rr = verify_collapse(seq)
    if not rr:
        raise InvalidSequence(rr.reason)
    G = len(seq.groups)
    stages = []
    for g, (a, b) in enumerate(seq.bounds()):
        n = b - a
        for j, st in enumerate(seq.steps[a:b]):
            apex = next(v for v in st.coface if v not in st.free_face)
            start = Fraction(g, G) + Fraction(j, G * n)
            stages.append(Stage(tuple(st.coface), tuple(st.free_face), apex, start, start + Fraction(1, G * n)))
    return PLDeformation(seq.ambient, stages, list(seq.groups))


class Reparametrization:
    """``H(x, t)``: track the top through the collapse, then project it back."""

    def __init__(self, h: PLDeformation):
        self.h = h

    def __call__(self, x, t):
        x = point(x)
        t = Fraction(t)
        if t <= Fraction(1, 2):
            return self.h.at(x + (ONE,), 2 * t)
        y = self.h.at(x + (ONE,), 2 - 2 * t)
        return y[:-1] + (ZERO,)


def reparametrize(h: PLDeformation, Xp: ProductComplex | None = None) -> Reparametrization:
    return Reparametrization(h)


class _Locator:
    """Vectorized point location in a complex (exact final check)."""

    def __init__(self, K: Complex):
        self.K = K
        self.facets = list(K.facets)
        X = K._float_coords
        self.lo = np.array([X[list(s)].min(axis=0) for s in self.facets])
        self.hi = np.array([X[list(s)].max(axis=0) for s in self.facets])

    def locate(self, y):
        yf = np.array([float(c) for c in y])
        pad = 1e-9 * (1 + np.abs(yf))
        for i in np.nonzero(np.all((self.lo <= yf + pad) & (self.hi >= yf - pad), axis=1))[0].tolist():
            s = self.facets[i]
            lam = barycentric_coords(y, self.K.points(s))
            if lam is not None and min(lam) >= 0:
                return s, lam
        raise PointOutsideComplex(f"point {y} is not in the complex")


@dataclass
class Curve:
    """Breakpoints ``(t, value)`` of a curve, linear in between."""

    points: list

    def at(self, t):
        """Value at ``t`` (exact linear interpolation)."""
        pts = self.points
        for (t0, v0), (t1, v1) in zip(pts, pts[1:]):
            if t0 <= t <= t1:
                return v0 if t1 == t0 else lerp(v0, v1, (t - t0) / (t1 - t0))
        return pts[-1][1] if t >= pts[-1][0] else pts[0][1]

    def sweep(self, ts) -> list:
        """Values at an increasing list of times in one pass."""
        pts = self.points
        out, i = [], 0
        for t in ts:
            while i + 2 < len(pts) and pts[i + 1][0] < t:
                i += 1
            (t0, v0), (t1, v1) = pts[i], pts[min(i + 1, len(pts) - 1)]
            if t <= t0 or t1 == t0:
                out.append(v0 if t <= t0 else v1)
            elif t >= t1:
                out.append(v1)
            else:
                out.append(lerp(v0, v1, (t - t0) / (t1 - t0)))
        return out

    def box(self):
        """Float bounding box of ``(t, value)``, padded."""
        arr = np.array([[float(t)] + [float(c) for c in v] for t, v in self.points])
        pad = 1e-9 * (1 + np.abs(arr).max())
        return arr.min(axis=0) - pad, arr.max(axis=0) + pad


class LevelMap:
    """``Phi(x, t) = (P F H(x, 1 - t), t)``, running from ``f_0`` to ``f_1``.

    ``raw`` gives the formula without the time reversal.
    """

    def __init__(self, F: SimplicialMap, H: Reparametrization, Xp: ProductComplex, part,
                 f_start: SimplicialMap, f_end: SimplicialMap, concordance: SimplicialMap | None = None):
        self.F = F
        self.concordance = concordance or F  # F on the unsubdivided X x I, for eps checks
        self.H = H
        self.Xp = Xp
        self.part = part
        self.f_start = f_start  # Phi(., 0) = f_0
        self.f_end = f_end      # Phi(., 1) = f_1
        self._loc = _Locator(F.source)

    def PF(self, y):
        s, lam = self._loc.locate(y)
        return combo(lam, self.F.image_points(s))[:-1]

    def raw(self, x, t):
        t = Fraction(t)
        return self.PF(self.H(x, t)) + (t,)

    def __call__(self, x, t):
        t = Fraction(t)
        return self.raw(x, 1 - t)[:-1] + (t,)

    def _f0p(self, y):
        """``f_0(p(y))`` for a point ``y`` of ``X x I``."""
        return evaluate(self.f_start, y[:-1])

    def second_half_curve(self, x) -> Curve:
        """Exact PL curve ``t -> P F H(x, 1 - t) = f_0 p h_2t(x, 1)`` on ``[0, 1/2]``."""
        h = self.H.h
        y0 = point(x) + (ONE,)
        pts = [(ZERO, self._f0p(y0))]
        for j, before, after, _ in h.track(y0):
            st = h.stages[j]
            pts.append((st.start / 2, self._f0p(before)))
            pts.append((st.end / 2, self._f0p(after)))
        pts.append((Fraction(1, 2), pts[-1][1]))
        return Curve(pts)

    def curve(self, x) -> Curve:
        """The whole track ``t -> P Phi(x, t)`` on ``[0, 1]``, exact."""
        a = self.second_half_curve(x).points
        b = self.first_half_curve(x).points
        if a[-1][1] != b[0][1]:
            raise VerificationFailed(f"the two halves of Phi disagree at t = 1/2 for x = {x}",
                                     {"x": x, "values": (a[-1][1], b[0][1])})
        return Curve(a + b[1:])

    def first_half_curve(self, x) -> Curve:
        """Exact PL curve ``t -> P F H(x, 1 - t)`` on ``t`` in ``[1/2, 1]``."""
        h = self.H.h
        y0 = point(x) + (ONE,)
        pts = [(ZERO, self.PF(y0))]
        for j, before, after, lam in h.track(y0):
            st = h.stages[j]
            imgs = self.F.image_points(st.coface)
            lam2 = barycentric_coords(after, h.ambient.points(st.coface))
            pts.append((st.start / 2, combo(lam, imgs)[:-1]))
            pts.append((st.end / 2, combo(lam2, imgs)[:-1]))
        pts.append((Fraction(1, 2), pts[-1][1]))
        # reverse time: output t = 1 - paper t
        out = [(1 - t, v) for t, v in reversed(pts)]
        return Curve(out)

    def trace(self, x) -> list:
        """Every position ``H(x, t)`` passes through (breakpoints of the track)."""
        y0 = point(x) + (ONE,)
        out = [y0]
        for _, before, after, _ in self.H.h.track(y0):
            out += [before, after]
        return out


def level_shift(F: SimplicialMap, H: Reparametrization, Xp: ProductComplex, part,
                concordance: SimplicialMap | None = None) -> LevelMap:
    """Build ``Phi``; ``F`` must live on the complex ``H`` deforms."""
    f0 = _level_map(F, Xp, 0)
    f1 = _level_map(F, Xp, len(Xp.levels) - 1)
    return LevelMap(F, H, Xp, part, f0, f1, concordance)


def _level_map(F: SimplicialMap, Xp: ProductComplex, j: int) -> SimplicialMap:
    """``x -> P F(x, t_j)`` on the base (vertices of ``X x t_j`` keep their indices)."""
    idx = {v: i for i, v in enumerate(F.source.vertices)}
    imgs = []
    for v in range(len(Xp.base.vertices)):
        w = idx[Xp.base.vertices[v] + (Xp.levels[j],)]
        imgs.append(F.images[w][:-1])
    return SimplicialMap.from_images(Xp.base, imgs)


# -- verification ---------------------------------------------------------

def curves_meet(curves) -> tuple | None:
    """First ``(t, value)`` at which all the PL curves agree, or ``None``.

    Between consecutive breakpoints every curve is linear, so each
    coordinate of each difference is ``d0 + u (d1 - d0)``; the common zeros
    form a point, the whole interval or nothing.
    """
    ts = sorted({t for c in curves for t, _ in c.points})
    vals = [c.sweep(ts) for c in curves]
    if len(ts) == 1:
        ts, vals = ts * 2, [v * 2 for v in vals]
    for i in range(len(ts) - 1):
        lo, hi = ZERO, ONE
        ok = True
        for c in range(1, len(curves)):
            for a0, a1, b0, b1 in zip(vals[0][i], vals[0][i + 1], vals[c][i], vals[c][i + 1]):
                d0, d1 = b0 - a0, b1 - a1
                if d0 == d1:
                    if d0 != 0:
                        ok = False
                        break
                    continue
                u = d0 / (d0 - d1)
                if u < lo or u > hi:
                    ok = False
                    break
                lo = hi = u
            if not ok:
                break
        if ok:
            t = ts[i] + lo * (ts[i + 1] - ts[i])
            return t, curves[0].at(t)
    return None


def _boxes_overlap(boxes) -> bool:
    lo = np.max([b[0] for b in boxes], axis=0)
    hi = np.min([b[1] for b in boxes], axis=0)
    return bool(np.all(lo <= hi))


def sample_points(X: Complex, samples: int, seed: int = 0) -> list:
    """All vertices of ``X`` plus ``samples`` rational points inside each simplex."""
    rng = random.Random(seed)
    out = [tuple(v) for v in X.vertices]
    for s in X.ordered:
        if len(s) < 2:
            continue
        pts = X.points(s)
        for i in range(samples):
            if len(s) == 2:
                w = [Fraction(i + 1, samples + 1)]
                w.append(1 - w[0])
            else:
                raw = [rng.randint(1, 64) for _ in s]
                w = [Fraction(r, sum(raw)) for r in raw]
            out.append(combo(w, pts))
    return out


def _mesh(X: Complex) -> Fraction:
    """Largest max-metric diameter of a simplex (attained on an edge)."""
    return max((max_dist(X.vertices[a], X.vertices[b]) for a, b in X.of_dim(1)), default=ZERO)


def neighborhood_images_meet(F: SimplicialMap, xs, eps) -> tuple | None:
    """Common point of ``F(N_eps(x_i) x I)`` over all ``x_i``, or ``None``.

    ``N_eps`` is the max-metric neighborhood in the coordinates of ``X``;
    decided by one exact LP per tuple of top simplexes (box-filtered).
    """
    K = F.source
    d = K.ambient_dim - 1
    tops = list(K.facets)
    X = K._float_coords
    cand = []
    for x in xs:
        xf = np.array([float(c) for c in x])
        keep = [s for s in tops
                if np.all(X[list(s), :d].min(axis=0) <= xf + float(eps) + 1e-9)
                and np.all(X[list(s), :d].max(axis=0) >= xf - float(eps) - 1e-9)]
        cand.append(keep)
    fb = {s: _float_box_of(F.image_points(s)) for c in cand for s in c}
    for tup in product(*cand):
        if not _boxes_overlap([fb[s] for s in tup]):
            continue
        sol = _nbhd_lp(F, tup, xs, eps)
        if sol is not None:
            return sol
    return None


def _float_box_of(pts):
    arr = np.array([[float(c) for c in p] for p in pts])
    pad = 1e-9 * (1 + np.abs(arr).max())
    return arr.min(axis=0) - pad, arr.max(axis=0) + pad


def _nbhd_lp(F, simps, xs, eps):
    K = F.source
    d = K.ambient_dim - 1
    sizes = [len(s) for s in simps]
    offs = [sum(sizes[:i]) for i in range(len(sizes) + 1)]
    nvar = offs[-1]
    imgs = [F.image_points(s) for s in simps]
    pts = [K.points(s) for s in simps]
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    for g in range(1, len(simps)):
        for k in range(len(imgs[0][0])):
            row = [ZERO] * nvar
            for i, q in enumerate(imgs[0]):
                row[offs[0] + i] += q[k]
            for i, q in enumerate(imgs[g]):
                row[offs[g] + i] -= q[k]
            A_eq.append(row)
            b_eq.append(ZERO)
    for g in range(len(simps)):
        row = [ZERO] * nvar
        for i in range(sizes[g]):
            row[offs[g] + i] = ONE
        A_eq.append(row)
        b_eq.append(ONE)
        for k in range(d):
            for sign in (ONE, -ONE):
                row = [ZERO] * nvar
                for i, p in enumerate(pts[g]):
                    row[offs[g] + i] = sign * p[k]
                A_ub.append(row)
                b_ub.append(sign * xs[g][k] + eps)
    res = linprog_max([ZERO] * nvar, A_eq, b_eq, A_ub, b_ub)
    if res.status != "optimal":
        return None
    return tuple(combo(res.x[offs[g]:offs[g + 1]], pts[g]) for g in range(len(simps)))


@dataclass
class LevelReport:
    """What :func:`verify_level_map` checked and found."""

    mode: str
    l: int
    eps: Fraction | None
    exact: bool
    level_ok: bool = True
    endpoints_ok: bool = True
    second_half_ok: bool = True
    disjoint_ok: bool = True
    locality_ok: bool | None = None
    tuple_ok: bool | None = None
    traced_points: int = 0
    checked_tuples: int = 0
    samples: list = field(default_factory=list)
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return (self.level_ok and self.endpoints_ok and self.second_half_ok and self.disjoint_ok
                and self.locality_ok is not False and self.tuple_ok is not False)

    def to_json(self):
        def enc(v):
            if isinstance(v, Fraction):
                return fmt(v)
            if isinstance(v, (tuple, list)):
                return [enc(c) for c in v]
            if isinstance(v, dict):
                return {k: enc(c) for k, c in v.items()}
            return v
        return {"mode": self.mode, "l": self.l, "eps": enc(self.eps), "exact": self.exact,
                "level_ok": self.level_ok, "endpoints_ok": self.endpoints_ok,
                "second_half_ok": self.second_half_ok, "disjoint_ok": self.disjoint_ok,
                "locality_ok": self.locality_ok, "tuple_ok": self.tuple_ok, "ok": self.ok,
                "traced_points": self.traced_points, "checked_tuples": self.checked_tuples,
                "samples": [{"x": enc(x), "t": enc(t), "value": enc(v)} for x, t, v in self.samples],
                "witness": enc(self.witness)}


def verify_level_map(Phi: LevelMap, mode: str = "link", l: int = 2, eps=None, samples: int = 8,
                     seed: int = 0, strict: bool = True) -> LevelReport:
    """Check that ``Phi`` is a link homotopy, an ``l``-doodle homotopy or an eps-map.

    For ``dim X = 0`` every point of ``X`` is traced, so disjointness is
    decided exactly.  Otherwise the exact checks run on sampled points and
    the guarantee for all other points comes from the stable certificates.
    With ``strict`` a failure raises :class:`VerificationFailed`.
    """
    if mode not in ("link", "doodle", "eps"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "link":
        l = 2
    eps = Fraction(eps) if eps is not None else None
    X = Phi.Xp.base
    labels = Phi.part.labels if isinstance(Phi.part, Partition) else tuple(Phi.part)
    rep = LevelReport(mode, l, eps, exact=X.dim <= 0)
    rng = random.Random(seed)

    def fail(flag, msg, witness):
        setattr(rep, flag, False)
        rep.witness = {"check": flag, "message": msg, **witness}
        if strict:
            raise VerificationFailed(msg, rep.witness)

    # level preservation and spot values at random rational (x, t)
    pts = sample_points(X, samples, seed)
    for _ in range(8):
        x = pts[rng.randrange(len(pts))]
        t = Fraction(rng.randint(0, 96), 96)
        v = Phi(x, t)
        if v[-1] != t:
            fail("level_ok", f"Phi({x}, {t}) is not at level {t}", {"x": x, "t": t, "value": v})
        rep.samples.append((x, t, v))
    # endpoints on vertices, before and after the time reversal
    for i, x in enumerate(X.vertices):
        f0 = Phi.f_start.images[i]
        f1 = Phi.f_end.images[i]
        if Phi(x, 0)[:-1] != f0 or Phi(x, 1)[:-1] != f1 or Phi.raw(x, 0)[:-1] != f1 or Phi.raw(x, 1)[:-1] != f0:
            fail("endpoints_ok", f"endpoint mismatch at vertex {i}", {"vertex": i})
    # t <= 1/2: Phi(X_i x t) lies in f_0(X_i), so f_0 decides
    if mode in ("link", "doodle"):
        good, w = is_doodle(Phi.f_start, labels, l)
        if not good:
            fail("second_half_ok", "f_0 is not a link map / doodle", {"simplexes": w.simplexes, "image": w.image})
    curves = []
    comp = []
    for x in pts:
        curves.append(Phi.curve(x))
        s, _ = X.locate(x)
        comp.append(labels[s[0]])
    rep.traced_points = len(pts)
    boxes = [c.box() for c in curves]
    if mode in ("link", "doodle"):
        byc = {}
        for i, k in enumerate(comp):
            byc.setdefault(k, []).append(i)
        for ks in combinations(sorted(byc), l):
            for tup in product(*[byc[k] for k in ks]):
                if not _boxes_overlap([boxes[i] for i in tup]):
                    continue
                rep.checked_tuples += 1
                hit = curves_meet([curves[i] for i in tup])
                if hit is not None:
                    fail("disjoint_ok", f"components {ks} meet at t = {hit[0]}",
                         {"points": [pts[i] for i in tup], "t": hit[0], "value": hit[1]})
    else:
        if eps is None:
            raise ValueError("eps mode needs eps")
        half = eps / 2
        rep.locality_ok = True
        for x in pts:
            for y in Phi.trace(x):
                if max_dist(y[:-1], x) > half:
                    fail("locality_ok", f"H moves {x} farther than eps/2", {"x": x, "position": y})
                    break
        rep.tuple_ok = True
        F0 = Phi.concordance
        for tup in combinations(range(len(pts)), l):
            if not _boxes_overlap([boxes[i] for i in tup]):
                continue
            rep.checked_tuples += 1
            hit = curves_meet([curves[i] for i in tup])
            if hit is None:
                continue
            xs = [pts[i] for i in tup]
            if neighborhood_images_meet(F0, xs, eps) is None:
                fail("tuple_ok", f"Phi-curves of {xs} meet but their eps-neighborhoods have disjoint F-images",
                     {"points": xs, "t": hit[0], "value": hit[1]})
    return rep


# -- the end-to-end pipeline ----------------------------------------------

@dataclass
class RunConfig:
    """Everything that determines a run; echoed into every bundle."""

    mode: str = "link"
    l: int = 2
    eps: Fraction | None = None
    seed: int = 0
    magnitude: Fraction = Fraction(1, 64)
    shift: Fraction = Fraction(1, 100)
    retry_budget: int = 32
    samples: int = 8
    delta: Fraction = Fraction(1, 4)

    def __post_init__(self):
        if self.mode not in ("link", "doodle", "eps"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self.magnitude = Fraction(self.magnitude)
        self.shift = Fraction(self.shift)
        self.delta = Fraction(self.delta)
        if self.eps is not None:
            self.eps = Fraction(self.eps)
        if self.mode == "link":
            self.l = 2
        if self.mode == "doodle" and self.l < 2:
            raise ValueError("doodle mode needs l >= 2")
        if self.mode == "eps" and (self.eps is None or self.eps <= 0):
            raise ValueError("eps mode needs a positive eps")
        if self.magnitude < 0 or self.shift <= 0 or not 0 < self.delta < Fraction(1, 2):
            raise ValueError("magnitude must be >= 0, shift > 0 and 0 < delta < 1/2")
        if self.retry_budget < 1 or self.samples < 0:
            raise ValueError("retry budget must be positive and samples non-negative")

    @property
    def shadow_mode(self):
        from .shadow import LINK, Mode
        return Mode("eps", self.eps / 2) if self.mode == "eps" else LINK

    def to_json(self) -> dict:
        return {"mode": self.mode, "l": self.l, "eps": fmt(self.eps) if self.eps is not None else None,
                "seed": self.seed, "magnitude": fmt(self.magnitude), "shift": fmt(self.shift),
                "retry_budget": self.retry_budget, "samples": self.samples, "delta": fmt(self.delta)}

    @classmethod
    def from_json(cls, d: dict) -> "RunConfig":
        return cls(d["mode"], int(d["l"]), Fraction(d["eps"]) if d.get("eps") is not None else None,
                   int(d["seed"]), Fraction(d["magnitude"]), Fraction(d["shift"]), int(d["retry_budget"]),
                   int(d["samples"]), Fraction(d.get("delta", "1/4")))


@dataclass
class PipelineResult:
    config: RunConfig
    F_input: SimplicialMap
    F: SimplicialMap  # after perturbation
    gp: object
    attempt: int
    sunny: object
    stable: object
    deformation: PLDeformation
    H: Reparametrization
    Phi: LevelMap
    report: LevelReport


def mode_predicate(F: SimplicialMap, labels, config: RunConfig):
    """``(ok, witness)`` for the input condition the mode needs."""
    if config.mode == "eps":
        return True, None
    return is_doodle(F, labels, config.l)


def pipeline(F: SimplicialMap, Xp: ProductComplex, Qp: ProductComplex | None, part,
             config: RunConfig | None = None) -> PipelineResult:
    """Concordance ``F`` to a verified level-preserving ``Phi``.

    Perturbs the interior-level vertex images into general position (the
    levels 0 and 1 stay fixed, so ``f_0`` and ``f_1`` are untouched), then
    sunny collapse, stabilization, deformation, ``H`` and ``Phi``.  If the
    perturbed map admits no sunny order the next perturbation seed is tried.
    """
    from .collapse import BoundaryConditionViolated, UnsupportedInput, stabilize, sunny_collapse
    from .errors import (GeneralPositionFailed, MeshTooCoarse, ModePreconditionFailed, OvershadowCycle,
                         PerturbationFailed)
    from .maps import gp_report, perturb_general_position

    config = config or RunConfig()
    T = Xp.total
    n = Xp.base.dim
    m = len(F.images[0]) - 1
    if m - n < 3:
        raise CodimensionTooLow(f"codimension m - n = {m - n} < 3")
    top = len(Xp.levels) - 1
    for w in range(len(T.vertices)):
        j = Xp.level_index[w]
        if j in (0, top) and F.height(w) != Xp.levels[j]:
            raise BoundaryConditionViolated(f"vertex {w} at level {Xp.levels[j]} maps to height {F.height(w)}")
    labels = Xp.lift(part)
    ok, w = mode_predicate(F, labels, config)
    if not ok:
        raise ModePreconditionFailed(f"input is not a {'link map' if config.l == 2 else f'{config.l}-doodle'}", w)
    if config.mode == "eps" and _mesh(Xp.base) >= config.eps / 2:
        raise MeshTooCoarse(f"mesh {fmt(_mesh(Xp.base))} of X is not below eps/2 = {fmt(config.eps / 2)}")

    class _Q:  # only the dimension of Q is needed
        base = type("B", (), {"dim": m})()
    Qp = Qp or _Q()
    movable = [v for v in range(len(T.vertices)) if 0 < Xp.level_index[v] < top]
    rng = random.Random(config.seed)
    last = None
    for attempt in range(config.retry_budget):
        try:
            G = perturb_general_position(F, Xp, Qp, config.magnitude, rng.randrange(2 ** 31), 1, movable)
        except PerturbationFailed as e:
            last = e
            continue
        if not mode_predicate(G, labels, config)[0]:
            continue
        try:
            sunny = sunny_collapse(G, Xp, part, config.shadow_mode, config.delta)
        except (OvershadowCycle, GeneralPositionFailed, UnsupportedInput) as e:
            last = e
            if G is F:
                raise
            continue
        break
    else:
        raise PerturbationFailed(f"no usable perturbation within {config.retry_budget} attempts ({last})",
                                 getattr(last, "report", None))
    gp = gp_report(T, G.images, n, m)
    stable = stabilize(None, sunny, mode=config.shadow_mode, shift=config.shift)
    h = collapse_to_deformation(stable)
    H = reparametrize(h, Xp)
    Phi = level_shift(stable.F, H, Xp, part, concordance=G)
    report = verify_level_map(Phi, config.mode, config.l, config.eps, config.samples, config.seed)
    return PipelineResult(config, F, G, gp, attempt, sunny, stable, h, H, Phi, report)
