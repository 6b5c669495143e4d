"""Elementary collapses, sunny collapses with blisters, and stabilization.

A :class:`CollapseSequence` is a list of elementary steps split into simple
groups ``V_0 -> V_1 -> ...``; each group can carry a certificate.  Every
sequence built here is checked by replay before it is returned.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .complex import Complex, ProductComplex, Subcomplex, boundary, closure, faces, simplex_key
from .errors import (CertificationFailed, CodimensionTooLow, CollapseStuck, GeneralPositionFailed,
                     InvalidSourceCollapse, LinkHomotopyError, StabilizationCertificateFailed)
from .exact import barycentric_coords, combo, lerp
from .maps import SimplicialMap, gp_report, singular_simplexes
from .shadow import LINK, Mode, ShadowOracle, certify_step, overshadow_order
from .subdivide import DEFAULT_SHIFT, DerivedComplex, lagging_second_derived


class UnsupportedInput(LinkHomotopyError):
    """The input is outside the cases this implementation constructs."""


class BoundaryConditionViolated(LinkHomotopyError):
    pass


@dataclass(frozen=True)
class ElementaryStep:
    coface: tuple
    free_face: tuple

    def to_json(self):
        return [list(self.coface), list(self.free_face)]


@dataclass
class CollapseSequence:
    """Ordered elementary steps on ``ambient`` starting from ``initial``.

    ``groups`` holds the number of steps in each simple collapse, ``names``
    a label per group.  ``F`` and ``labels`` are the map and component
    labels the certificates refer to.
    """

    ambient: Complex
    initial: frozenset
    steps: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    names: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    F: SimplicialMap | None = None
    labels: tuple | None = None
    meta: dict = field(default_factory=dict)

    def add_group(self, steps, name=""):
        self.steps.extend(steps)
        self.groups.append(len(steps))
        self.names.append(name)

    def bounds(self) -> list:
        out, i = [], 0
        for g in self.groups:
            out.append((i, i + g))
            i += g
        return out

    def states(self) -> list:
        """The filtration ``K_0 > K_1 > ... > K_m`` (one state per group boundary)."""
        cur = set(self.initial)
        out = [frozenset(cur)]
        for a, b in self.bounds():
            for st in self.steps[a:b]:
                cur.discard(st.coface)
                cur.discard(st.free_face)
            out.append(frozenset(cur))
        return out

    @property
    def final(self) -> frozenset:
        return self.states()[-1]


@dataclass
class ReplayResult:
    ok: bool
    index: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def _as_set(x):
    if isinstance(x, Subcomplex):
        return set(x.simplexes)
    if isinstance(x, Complex):
        return set(x.simplexes)
    return set(x)


def verify_collapse(seq: CollapseSequence, from_=None, to=None) -> ReplayResult:
    """Replay ``seq`` step by step; report the first illegal step."""
    cur = _as_set(seq.initial if from_ is None else from_)
    if any(s not in seq.ambient.simplexes for s in cur):
        return ReplayResult(False, None, "start is not a subcomplex of the ambient complex")
    cof = seq.ambient.cofaces
    for i, st in enumerate(seq.steps):
        s, t = tuple(st.coface), tuple(st.free_face)
        if s not in cur or t not in cur:
            return ReplayResult(False, i, f"step {i}: {s} or {t} is not present")
        if len(t) != len(s) - 1 or not set(t) < set(s):
            return ReplayResult(False, i, f"step {i}: {t} is not a codimension-one face of {s}")
        if [c for c in cof.get(t, ()) if c in cur] != [s]:
            return ReplayResult(False, i, f"step {i}: {t} is not a free face of {s}")
        if any(c in cur for c in cof.get(s, ())):
            return ReplayResult(False, i, f"step {i}: {s} is not maximal")
        cur.discard(s)
        cur.discard(t)
    if to is not None and cur != _as_set(to):
        return ReplayResult(False, len(seq.steps), "replay does not end at the declared target")
    return ReplayResult(True)


def greedy_collapse(ambient: Complex, current: set, remove, key: Callable | None = None) -> list:
    """Collapse ``current`` by removing exactly the simplexes in ``remove``.

    Free pairs are taken in order of ``key(coface, free_face)``.  ``current`` is
    updated in place.  Raises :class:`CollapseStuck` if some simplex of
    ``remove`` can not be reached.
    """
    key = key or (lambda s, t: (-len(s),))
    cof = ambient.cofaces
    remove = set(remove) & current
    heap = []

    def push(t):
        if t not in remove:
            return
        cs = [c for c in cof[t] if c in current]
        if len(cs) == 1 and cs[0] in remove and not any(c in current for c in cof[cs[0]]):
            heapq.heappush(heap, (key(cs[0], t), cs[0], t))

    for t in sorted(remove, key=simplex_key):
        push(t)
    steps = []
    while heap:
        _, s, t = heapq.heappop(heap)
        if s not in current or t not in current:
            continue
        if [c for c in cof[t] if c in current] != [s] or any(c in current for c in cof[s]):
            continue
        current.discard(s)
        current.discard(t)
        remove.discard(s)
        remove.discard(t)
        steps.append(ElementaryStep(s, t))
        for f in boundary(s):
            push(f)
            for g in boundary(f):
                push(g)
    if remove:
        left = sorted(remove, key=simplex_key)[:5]
        raise CollapseStuck(f"{len(remove)} simplexes could not be collapsed, e.g. {left}")
    return steps


def height_key(K: Complex):
    """Prefer the highest simplexes (last coordinate) pushed through their highest faces."""
    def key(s, t):
        hs = [K.vertices[v][-1] for v in s]
        ht = [K.vertices[v][-1] for v in t]
        return (-max(hs), -sum(ht) / len(ht), -sum(hs) / len(hs), -len(s), s)
    return key


def certify_sequence(seq: CollapseSequence, mode=LINK, stable: bool = False, oracle=None,
                     ambient: Complex | None = None) -> list:
    """Certificates for every simple group of ``seq`` (no exception on failure)."""
    mode = Mode.parse(mode)
    oracle = oracle or ShadowOracle(seq.F, seq.labels, mode)
    states = seq.states()
    return [certify_step(seq.F, states[i], states[i + 1], mode, stable, seq.labels, oracle, i,
                         ambient or seq.ambient)
            for i in range(len(seq.groups))]


# -- cylindrical collapse -------------------------------------------------

def _base_carrier(Xp: ProductComplex, origin, s) -> tuple:
    return tuple(sorted({Xp.base_vertex[w] for v in s for w in origin[v]}))


def cylindrical_collapse(Xp: ProductComplex, Y=None) -> CollapseSequence:
    """Collapse ``X x I`` onto ``X x 0 u Y x I``, top layers first."""
    T = Xp.total
    Ys = _as_set(Y) if Y is not None else set()
    keep = set(Xp.bottom.simplexes) | {s for s in T.simplexes
                                       if tuple(sorted({Xp.base_vertex[w] for w in s})) in Ys}
    cur = set(T.simplexes)
    steps = greedy_collapse(T, cur, cur - keep, height_key(T))
    seq = CollapseSequence(T, frozenset(T.simplexes))
    seq.add_group(steps, "cylindrical")
    return seq


# -- blisters -------------------------------------------------------------

@dataclass
class Blister:
    """One blister over a singular vertex ``A``.

    ``J`` is the corner disk, ``K`` the bad face (vertical edges through
    ``A``) and ``L`` the good face (the rim).  ``a_to`` is the rim vertex
    that ``phi`` sends ``A`` to.
    """

    A: tuple
    a_up: int
    a_down: int
    a_to: int
    J: frozenset
    K: frozenset
    L: frozenset


@dataclass
class BlisterSet:
    host: Complex
    F: SimplicialMap
    blisters: list
    phi: dict
    origin: tuple  # host vertex -> carrier simplex in the original total complex
    delta: Fraction

    def check(self, Y_host: set) -> None:
        for b in self.blisters:
            if (b.J & Y_host) != b.K:
                raise UnsupportedInput(f"blister over {b.A} meets Y x I outside its bad face")
        for i, b in enumerate(self.blisters):
            for c in self.blisters[i + 1:]:
                if b.J & c.J:
                    raise UnsupportedInput(f"blisters over {b.A} and {c.A} overlap")


def build_blisters(F: SimplicialMap, Xp: ProductComplex, S, delta=Fraction(1, 4)) -> BlisterSet:
    """Corner-cut the host around every singular vertex and mark its blister.

    Only vertex singular sets (the general-position case for ``dim X = 1``)
    are constructed.  Singular vertices in ``X x 0`` are skipped.
    """
    T = Xp.total
    delta = Fraction(delta)
    S = _as_set(S)
    origin = [(w,) for w in range(len(T.vertices))]
    if not S:
        return BlisterSet(T, F, [], {}, tuple(origin), delta)
    if Xp.base.dim != 1:
        raise UnsupportedInput("blisters are only constructed for one-dimensional X")
    if any(len(s) > 1 for s in S):
        raise GeneralPositionFailed("singular set has simplexes of positive dimension")
    sing = sorted(s[0] for s in S if Xp.level_index[s[0]] > 0)
    for a in sing:
        for b in sing:
            if a < b and (a, b) in T.simplexes:
                raise UnsupportedInput(f"singular vertices {a} and {b} are adjacent")
    top = len(Xp.levels) - 1
    verts = list(T.vertices)
    imgs = list(F.images)
    cut = {}

    def cutpoint(w, u):
        if (w, u) not in cut:
            cut[(w, u)] = len(verts)
            verts.append(lerp(T.vertices[w], T.vertices[u], delta))
            imgs.append(lerp(F.images[w], F.images[u], delta))
            origin.append(tuple(sorted((w, u))))
        return cut[(w, u)]

    sset = set(sing)
    facets = []
    corner_of = {}  # corner triangle -> (singular vertex, original triangle)
    for f in T.facets:
        ws = [w for w in f if w in sset]
        if not ws:
            facets.append(f)
            continue
        w = ws[0]
        others = [u for u in f if u != w]
        if len(others) == 1:
            e = cutpoint(w, others[0])
            facets += [tuple(sorted((w, e))), tuple(sorted((e, others[0])))]
        elif len(others) == 2:
            u, v = others
            eu, ev = cutpoint(w, u), cutpoint(w, v)
            corner = tuple(sorted((w, eu, ev)))
            corner_of[corner] = (w, f)
            facets += [corner, tuple(sorted((eu, u, v))), tuple(sorted((eu, v, ev)))]
        else:
            raise UnsupportedInput("corner cutting needs a host of dimension at most 2")
    host = Complex(verts, closure(facets), T.ambient_dim)
    Fh = SimplicialMap.from_images(host, imgs)
    blisters, phi = [], {}
    for w in sing:
        y, j = Xp.base_vertex[w], Xp.level_index[w]
        edges = sorted(e for e in Xp.base.of_dim(1) if y in e)
        if not edges:
            raise CodimensionTooLow(f"no edge of X at base vertex {y}: no room for a blister")
        C = edges[0]
        D = [c for c, (ww, f) in sorted(corner_of.items())
             if ww == w and tuple(sorted({Xp.base_vertex[x] for x in f})) == C]
        a_down = cut[(w, Xp.vertex(y, j - 1))]
        a_up = w if j == top else cut[(w, Xp.vertex(y, j + 1))]
        K = closure([tuple(sorted((w, a))) for a in (a_down, a_up) if a != w])
        rim = [tuple(x for x in c if x != w) for c in D]
        L = closure(rim)
        J = closure(D)
        rim_verts = sorted({x for e in rim for x in e} - {a_up, a_down})
        if not rim_verts:
            raise CodimensionTooLow(f"blister over {w} has no rim vertex off the vertical line")
        a_to = rim_verts[0]
        phi[w] = a_to
        blisters.append(Blister((w,), a_up, a_down, a_to, frozenset(J), frozenset(K), frozenset(L)))
    bs = BlisterSet(host, Fh, blisters, phi, tuple(origin), delta)
    Yh = {s for s in host.simplexes if len(_base_carrier(Xp, origin, s)) <= 1}
    bs.check(Yh)
    return bs


# -- the sunny collapse ---------------------------------------------------

def _labels(part, Xp: ProductComplex, origin) -> tuple:
    labels = getattr(part, "labels", part)
    return tuple(labels[Xp.base_vertex[o[0]]] for o in origin)


def sunny_collapse(F: SimplicialMap, Xp: ProductComplex, part, mode=LINK, delta=Fraction(1, 4),
                   certify: bool = True) -> CollapseSequence:
    """Sunny collapse ``X x I -> X x 0`` following the blister recursion.

    Groups: one cylindrical collapse onto ``X x 0 u Y x I u J``, one group
    per blister (in overshadowing order), then one group per remaining
    skeleton dimension.  Every group is certified in ``mode``.
    """
    mode = Mode.parse(mode)
    T = Xp.total
    n = Xp.base.dim
    m = len(F.images[0]) - 1
    if m - n < 3:
        raise CodimensionTooLow(f"codimension m - n = {m - n} < 3")
    if any(F.height(w) != 0 for s in Xp.bottom.simplexes for w in s):
        raise BoundaryConditionViolated("F(X x 0) is not contained in Q x 0")
    report = gp_report(T, F.images, n, m)
    if not report.ok:
        raise GeneralPositionFailed("F is not in general position", report)
    bs = build_blisters(F, Xp, report.singular_set.simplexes, delta)
    host, Fh, origin = bs.host, bs.F, bs.origin
    labels = _labels(part, Xp, origin)
    bc = {s: _base_carrier(Xp, origin, s) for s in host.simplexes}
    bottom = {s for s in host.simplexes if all(host.vertices[v][-1] == 0 for v in s)}
    key = height_key(host)
    seq = CollapseSequence(host, frozenset(host.simplexes), F=Fh, labels=labels,
                           meta={"delta": delta, "blisters": bs, "phi": dict(bs.phi)})
    cur = set(host.simplexes)
    J = set().union(*(b.J for b in bs.blisters)) if bs.blisters else set()
    keep = bottom | {s for s in host.simplexes if len(bc[s]) <= n} | J
    seq.add_group(greedy_collapse(host, cur, cur - keep, key), f"cylinder dim {n}")
    if bs.blisters:
        oracle = ShadowOracle(Fh, labels, mode)
        order = overshadow_order(Fh, [b.A for b in bs.blisters], mode, labels, oracle)
        by_A = {b.A: b for b in bs.blisters}
        for A in order:
            b = by_A[A]
            seq.add_group(greedy_collapse(host, cur, set(b.J) - set(b.L) - bottom, key), f"blister {A[0]}")
        # the recursion runs on phi(Y x I), a union of arcs: check its general position
        Z = closure(s for s in cur if s not in bottom)
        if singular_simplexes(Complex(host.vertices, Z, host.ambient_dim),
                              [q[:-1] for q in Fh.images]) & {s for s in Z if s not in bottom}:
            raise GeneralPositionFailed("F o phi is not in general position")
    for k in range(n - 1, -1, -1):
        keep = bottom | {s for s in cur if len(bc[s]) <= k}
        seq.add_group(greedy_collapse(host, cur, cur - keep, key), f"cylinder dim {k}")
    rr = verify_collapse(seq, host.simplexes, bottom)
    if not rr:
        raise CollapseStuck(rr.reason)
    if certify:
        seq.certificates = certify_sequence(seq, mode)
        bad = next((c for c in seq.certificates if not c.verdict), None)
        if bad is not None:
            raise CertificationFailed(f"group {bad.step} ({seq.names[bad.step]}) is not sunny", bad)
    return seq


# -- neighborhood collapses -----------------------------------------------

class _Neighborhoods:
    """Set algebra of derived neighborhoods inside a derived complex."""

    def __init__(self, Kpp: DerivedComplex):
        self.Kpp = Kpp
        R = Kpp.result
        self.carried = {}
        for s in R.simplexes:
            self.carried.setdefault(Kpp.carrier(s), []).append(s)
        self.vstar = R.vertex_star

    def in_faces(self, B) -> set:
        out = set()
        for f in faces(B):
            out.update(self.carried.get(f, ()))
        return out

    def N(self, L, inside=None) -> set:
        """Closed neighborhood of ``L''``, optionally inside ``inside''``."""
        L = set(L)
        hit = {w for w, c in enumerate(self.Kpp.vertex_carrier) if c in L}
        touching = set()
        for w in hit:
            for s in self.vstar.get(w, ()):
                if inside is None or s in inside:
                    touching.add(s)
        return closure(touching)

    def induced(self, L) -> set:
        out = set()
        for A in L:
            out.update(self.carried.get(A, ()))
        return out

    def star_step(self, A, B) -> set:
        """``N_B''(A)`` minus ``N_dB''(A) u N_B''(dA)``: what the ball move removes."""
        inB = self.in_faces(B)
        fA = set(faces(A))
        inner = self.N(fA, inB)
        dB = inB - set(self.carried.get(B, ()))
        dA = fA - {A}
        return inner - self.N(fA, dB) - self.N(dA, inB)


def shadow_escapes(Kpp: DerivedComplex, F: SimplicialMap, labels, V, W, mode=LINK, oracle=None) -> list:
    """Positive facts ``A`` in ``N(V)`` overshadowing ``B`` outside ``Int N(W)``.

    ``V`` and ``W`` are subcomplexes of the original complex, ``F`` and
    ``labels`` live on the derived one.  An empty list means the shadow of
    the neighborhood of ``V`` lands in the interior of that of ``W``.
    """
    from .shadow import _maximal, interior
    nb = _Neighborhoods(Kpp)
    R = Kpp.result
    NV, NW = nb.N(V), nb.N(W)
    oracle = oracle or ShadowOracle(F, labels, mode)
    targets = sorted(set(R.simplexes) - interior(NW, R), key=simplex_key)
    return [f for f in oracle.decide(_maximal(NV), targets, open_target=True) if f.verdict]


def _key_dim(s, t=()):
    return (-len(s), s)


def neighborhood_collapse(Kpp: DerivedComplex, seq: CollapseSequence, start=None) -> CollapseSequence:
    """Lift a collapse of the original complex to derived neighborhoods.

    For each elementary step (C, D) the ball moves with ``A = C`` over the
    cofaces of ``C`` (decreasing dimension), then ``A = D`` over the cofaces
    of ``D`` other than ``C``, then the face collapse of ``C`` itself.  One
    output group per input group.
    """
    if seq.ambient.simplexes != Kpp.original.simplexes:
        raise InvalidSourceCollapse("sequence and subdivision live on different complexes")
    rr = verify_collapse(seq)
    if not rr:
        raise InvalidSourceCollapse(rr.reason)
    K = Kpp.original
    R = Kpp.result
    nb = _Neighborhoods(Kpp)
    V = set(seq.initial if start is None else start)
    cur = nb.N(V)
    out = CollapseSequence(R, frozenset(cur))
    allcof = {}
    for s in K.ordered:
        for f in faces(s, include_self=False):
            allcof.setdefault(f, []).append(s)
    for (a, b), name in zip(seq.bounds(), seq.names):
        group = []
        for st in seq.steps[a:b]:
            C, D = st.coface, st.free_face
            W = V - {C, D}
            targets = [nb.induced(V) | nb.N(W | {D}), nb.induced(V) | nb.N(W), nb.N(W)]
            phases = [(C, sorted(allcof.get(C, ()), key=_key_dim)),
                      (D, sorted((B for B in allcof.get(D, ()) if B != C), key=_key_dim)),
                      (None, [])]
            for (A, Bs), target in zip(phases, targets):
                for B in Bs:
                    rem = nb.star_step(A, B) & cur
                    rem -= target
                    if not rem:
                        continue
                    trial = set(cur)
                    try:
                        steps = greedy_collapse(R, trial, rem, _key_dim)
                    except CollapseStuck:
                        continue  # left to the phase-end sweep
                    cur = trial
                    group += steps
                group += greedy_collapse(R, cur, cur - target, _key_dim)
                if cur != target:
                    raise CollapseStuck(f"neighborhood collapse for step ({C}, {D}) missed its target")
            V = W
        out.add_group(group, name)
    return out


# -- stabilization --------------------------------------------------------

def lift_map(Kpp: DerivedComplex, F: SimplicialMap) -> SimplicialMap:
    """``F`` as a simplicial map on the derived complex (exact re-evaluation)."""
    K = Kpp.original
    imgs = []
    for x, c in zip(Kpp.result.vertices, Kpp.vertex_carrier):
        lam = barycentric_coords(x, K.points(c))
        imgs.append(combo(lam, F.image_points(c)))
    return SimplicialMap.from_images(Kpp.result, imgs)


def stabilize(F: SimplicialMap, seq: CollapseSequence, part=None, mode=LINK, shift=DEFAULT_SHIFT,
              certify: bool = True) -> CollapseSequence:
    """Stable collapse of ``(X x I)''`` onto ``(X x 0)''`` from a sunny one.

    ``F`` and ``part`` default to those recorded on ``seq``.  Groups are
    ``U_i -> U_{i+1}`` with ``U_i`` the lagging derived neighborhood of the
    ``i``-th state, plus a final ``U_m -> (X x 0)''``.
    """
    mode = Mode.parse(mode)
    F = F or seq.F
    host = seq.ambient
    labels = tuple(getattr(part, "labels", part)) if part is not None else seq.labels
    if len(labels) != len(host.vertices):
        raise ValueError("labels must be given per host vertex")
    Kpp = lagging_second_derived(host, F, shift)
    F2 = lift_map(Kpp, F)
    labels2 = tuple(labels[c[0]] for c in Kpp.vertex_carrier)
    out = neighborhood_collapse(Kpp, seq)
    R = Kpp.result
    final = seq.final
    bottom2 = _Neighborhoods(Kpp).induced(final)
    cur = set(out.final)
    out.add_group(greedy_collapse(R, cur, cur - bottom2, height_key(R)), "regular neighborhood")
    out.F, out.labels = F2, labels2
    out.meta = {"derived": Kpp, "shift": Fraction(shift), "source": seq}
    rr = verify_collapse(out, out.initial, bottom2)
    if not rr:
        raise CollapseStuck(rr.reason)
    if out.initial != frozenset(R.simplexes):
        raise InvalidSourceCollapse("the sunny collapse must start from the whole host")
    if certify:
        out.certificates = certify_sequence(out, mode, stable=True)
        bad = next((c for c in out.certificates if not c.verdict), None)
        if bad is not None:
            raise StabilizationCertificateFailed(
                f"group {bad.step} ({out.names[bad.step]}) is not stable sunny", bad)
    return out
