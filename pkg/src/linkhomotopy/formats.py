"""JSON file formats, output bundles and the independent bundle verifier.

Rationals are written as ``"a/b"`` strings (integers without a slash) and
every object is dumped with sorted keys, so identical runs give identical
bytes.  The verifier trusts nothing in a bundle except the input: it
rebuilds every derived object, replays every collapse and re-decides every
overshadow fact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .complex import Complex, Partition, build_complex, simplex_volume_ratio, staircase_product
from .errors import FormatError, LinkHomotopyError
from .exact import fmt, fmt_point, point, rat
from .maps import GPReport, SimplicialMap, gp_report

BUNDLE_FORMAT = "linkhomotopy-bundle/1"
CONCORDANCE_FORMAT = "linkhomotopy-concordance/1"


# -- plain objects ----------------------------------------------------------

def complex_to_json(K: Complex, labels=None) -> dict:
    d = {"ambient_dim": K.ambient_dim, "vertices": [fmt_point(v) for v in K.vertices],
         "facets": K.facet_list()}
    if labels is not None:
        d["labels"] = list(labels)
    return d


def complex_from_json(d) -> tuple:
    """``(complex, partition or None)`` from a complex object."""
    try:
        verts = [point(v) for v in d["vertices"]]
        facets = [[int(i) for i in f] for f in d["facets"]]
        amb = int(d["ambient_dim"])
        K = build_complex(verts, facets, ambient_dim=amb)
        labels = d.get("labels")
    except LinkHomotopyError as e:
        raise FormatError(f"bad complex: {e}") from e
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as e:
        raise FormatError(f"bad complex: {e!r}") from e
    part = None
    if labels is not None:
        part = Partition.from_labels(labels)
        try:
            part.check(K)
        except ValueError as e:
            raise FormatError(str(e)) from e
    return K, part


def map_to_json(f: SimplicialMap) -> dict:
    return {"source": complex_to_json(f.source), "target": complex_to_json(f.target),
            "vertex_map": list(f.vertex_map)}


def map_from_json(d, source: Complex | None = None) -> SimplicialMap:
    try:
        src = source if source is not None else complex_from_json(d["source"])[0]
        tgt = complex_from_json(d["target"])[0]
        return SimplicialMap(src, tgt, [int(v) for v in d["vertex_map"]])
    except LinkHomotopyError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise FormatError(f"bad map: {e!r}") from e


def gp_to_json(r: GPReport) -> dict:
    return {"codim_ok": r.codim_ok, "nondegenerate_ok": r.nondegenerate_ok, "ok": r.ok,
            "singular_set": sorted(list(s) for s in r.singular_set.facets()),
            "offending_simplexes": [list(s) for s in r.offending_simplexes], "m": r.m, "n": r.n}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def load(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise FormatError(f"cannot read {path}: {e}") from e


# -- concordance files ------------------------------------------------------

@dataclass
class ConcordanceInput:
    X: Complex
    part: Partition
    levels: tuple
    Xp: object
    F: SimplicialMap
    Q: Complex | None


def concordance_to_json(X, part, levels, F, Q=None) -> dict:
    return {"format": CONCORDANCE_FORMAT, "X": complex_to_json(X, part.labels),
            "levels": [fmt(t) for t in levels], "Q": complex_to_json(Q) if Q is not None else None,
            "map": map_to_json(F)}


def concordance_from_json(d) -> ConcordanceInput:
    """The map's source must be the staircase triangulation of ``X x I`` on ``levels``."""
    if not isinstance(d, dict) or d.get("format") != CONCORDANCE_FORMAT:
        raise FormatError(f"not a concordance file (format {d.get('format') if isinstance(d, dict) else None!r})")
    X, part = complex_from_json(d["X"])
    if part is None:
        part = Partition.of_components(X)
    try:
        levels = tuple(rat(t) for t in d["levels"])
        Xp = staircase_product(X, levels)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad levels: {e!r}") from e
    src, _ = complex_from_json(d["map"]["source"])
    if src.vertices != Xp.total.vertices or src.simplexes != Xp.total.simplexes:
        raise FormatError("map source is not the staircase triangulation of X x I")
    F = map_from_json(d["map"], Xp.total)
    Q = complex_from_json(d["Q"])[0] if d.get("Q") else None
    if Q is not None and Q.ambient_dim + 1 != F.target.ambient_dim:
        raise FormatError("map target does not live in Q x I")
    return ConcordanceInput(X, part, levels, Xp, F, Q)


# -- bundles ----------------------------------------------------------------

def _seq_to_json(seq) -> dict:
    return {"steps": [st.to_json() for st in seq.steps], "groups": list(seq.groups), "names": list(seq.names),
            "certificates": [c.to_json() for c in seq.certificates]}


def bundle_from_result(res, X, part, levels, Q=None) -> dict:
    """Everything about a pipeline run in one JSON object."""
    sunny, stable, Phi = res.sunny, res.stable, res.Phi
    bs = sunny.meta.get("blisters")
    order = []
    if bs is not None and bs.blisters:
        from .shadow import ShadowOracle
        orc = ShadowOracle(sunny.F, sunny.labels, res.config.shadow_mode)
        As = [b.A for b in bs.blisters]
        order = [orc.fact(a, b).to_json() for a in As for b in As if a != b]
    return {
        "format": BUNDLE_FORMAT,
        "config": res.config.to_json(),
        "input": concordance_to_json(X, part, levels, res.F_input, Q),
        "perturbed": {"images": [fmt_point(q) for q in res.F.images], "attempt": res.attempt},
        "gp_report": gp_to_json(res.gp),
        "sunny": {"host": complex_to_json(sunny.ambient, sunny.labels),
                  "images": [fmt_point(q) for q in sunny.F.images],
                  "delta": fmt(sunny.meta["delta"]), "blister_order": [list(b.A) for b in bs.blisters] if bs else [],
                  "order_facts": order, **_seq_to_json(sunny)},
        "stable": {"shift": fmt(stable.meta["shift"]), **_seq_to_json(stable)},
        "level_map": {"schedule": "uniform per simple group, then per step", "stages": len(res.deformation.stages),
                      "time_reversed": True,
                      "f_start": [fmt_point(q) for q in Phi.f_start.images],
                      "f_end": [fmt_point(q) for q in Phi.f_end.images]},
        "report": res.report.to_json(),
    }


class BundleRejected(LinkHomotopyError):
    """A bundle failed independent re-verification at ``path``."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _steps_from_json(lst, path):
    from .collapse import ElementaryStep
    try:
        return [ElementaryStep(tuple(int(v) for v in s), tuple(int(v) for v in t)) for s, t in lst]
    except (TypeError, ValueError) as e:
        raise BundleRejected(path, f"malformed step list ({e!r})") from e


def _compare_certs(stored, fresh, path):
    if len(stored) != len(fresh):
        raise BundleRejected(path, f"{len(stored)} certificates stored, {len(fresh)} groups replayed")
    for i, (s, c) in enumerate(zip(stored, fresh)):
        cj = c.to_json()
        p = f"{path}[{i}]"
        if not c.verdict:
            raise BundleRejected(p, "group is not sunny on re-decision")
        for k in ("step", "mode", "stable", "verdict"):
            if s.get(k) != cj[k]:
                raise BundleRejected(f"{p}.{k}", f"stored {s.get(k)!r}, recomputed {cj[k]!r}")
        sp, cp = s.get("checked_pairs", []), cj["checked_pairs"]
        for j in range(max(len(sp), len(cp))):
            if j >= len(sp) or j >= len(cp):
                raise BundleRejected(f"{p}.checked_pairs", "checked pair list differs in length")
            for k in cp[j]:
                if sp[j].get(k) != cp[j][k]:
                    raise BundleRejected(f"{p}.checked_pairs[{j}].{k}",
                                         f"stored {sp[j].get(k)!r}, recomputed {cp[j][k]!r}")


def verify_bundle(b: dict) -> dict:
    """Re-check a bundle from its input; raise :class:`BundleRejected` on the first problem.

    Returns a small summary on success.
    """
    from .collapse import (CollapseSequence, _Neighborhoods, certify_sequence, lift_map, verify_collapse)
    from .homotopy import (RunConfig, collapse_to_deformation, level_shift, mode_predicate, reparametrize,
                           verify_level_map)
    from .shadow import ShadowOracle, check_fact_witness, overshadows, OvershadowFact, Mode
    from .subdivide import lagging_second_derived

    if not isinstance(b, dict) or b.get("format") != BUNDLE_FORMAT:
        raise FormatError("not a bundle file")
    try:
        cfg = RunConfig.from_json(b["config"])
    except (KeyError, TypeError, ValueError) as e:
        raise BundleRejected("config", f"bad configuration ({e!r})") from e
    inp = concordance_from_json(b["input"])
    Xp, F0 = inp.Xp, inp.F
    T = Xp.total
    labels = Xp.lift(inp.part)

    # the perturbed map keeps heights and both end levels
    try:
        imgs = [point(q) for q in b["perturbed"]["images"]]
    except (KeyError, TypeError, ValueError) as e:
        raise BundleRejected("perturbed.images", f"malformed ({e!r})") from e
    if len(imgs) != len(T.vertices):
        raise BundleRejected("perturbed.images", "wrong number of images")
    top = len(Xp.levels) - 1
    for w, (a, q) in enumerate(zip(F0.images, imgs)):
        if a[-1] != q[-1] or (Xp.level_index[w] in (0, top) and a != q):
            raise BundleRejected(f"perturbed.images[{w}]", "perturbation moved a height or an end level")
    F = SimplicialMap.from_images(T, imgs)
    if not mode_predicate(F, labels, cfg)[0]:
        raise BundleRejected("perturbed.images", f"perturbed map fails the {cfg.mode} condition")
    n, m = Xp.base.dim, len(imgs[0]) - 1
    gp = gp_to_json(gp_report(T, imgs, n, m))
    if gp != b.get("gp_report"):
        raise BundleRejected("gp_report", "does not match the recomputed report")
    if not gp["ok"]:
        raise BundleRejected("gp_report.ok", "perturbed map is not in general position")

    # sunny collapse on the host
    sb = b["sunny"]
    host, hpart = complex_from_json(sb["host"])
    hlab = hpart.labels if hpart else None
    try:
        himgs = [point(q) for q in sb["images"]]
    except (KeyError, TypeError, ValueError) as e:
        raise BundleRejected("sunny.images", f"malformed ({e!r})") from e
    if len(himgs) != len(host.vertices) or hlab is None or len(hlab) != len(host.vertices):
        raise BundleRejected("sunny.host", "host images or labels do not cover the host")
    _check_host(host, himgs, hlab, T, F, labels)
    Fh = SimplicialMap.from_images(host, himgs)
    mode = cfg.shadow_mode
    seq = CollapseSequence(host, frozenset(host.simplexes), _steps_from_json(sb["steps"], "sunny.steps"),
                           [int(g) for g in sb["groups"]], list(sb["names"]), F=Fh, labels=tuple(hlab))
    if sum(seq.groups) != len(seq.steps):
        raise BundleRejected("sunny.groups", "group sizes do not add up to the step count")
    bottom = {s for s in host.simplexes if all(host.vertices[v][-1] == 0 for v in s)}
    rr = verify_collapse(seq, host.simplexes, bottom)
    if not rr:
        raise BundleRejected(f"sunny.steps[{rr.index}]", rr.reason)
    oracle = ShadowOracle(Fh, seq.labels, mode)
    _compare_certs(sb["certificates"], certify_sequence(seq, mode, oracle=oracle), "sunny.certificates")
    for i, fj in enumerate(sb.get("order_facts", [])):
        p = f"sunny.order_facts[{i}]"
        A, B = tuple(fj["A"]), tuple(fj["B"])
        fresh = overshadows(Fh, A, B, mode, seq.labels)
        if fj["verdict"] != fresh.verdict:
            raise BundleRejected(f"{p}.verdict", f"stored {fj['verdict']!r}, recomputed {fresh.verdict!r}")
        if fresh.verdict:
            try:
                wit = tuple(point(q) for q in fj["witness"])
            except (TypeError, ValueError) as e:
                raise BundleRejected(f"{p}.witness", f"malformed ({e!r})") from e
            if not check_fact_witness(Fh, OvershadowFact(A, B, Mode.parse(fj["mode"]), True, wit), seq.labels):
                raise BundleRejected(f"{p}.witness", "witness does not re-evaluate")
    order = [tuple(a) for a in sb.get("blister_order", [])]
    for i, a in enumerate(order):
        for c in order[:i]:
            if oracle.fact(a, c).verdict:
                raise BundleRejected("sunny.blister_order", f"{a} overshadows the earlier blister {c}")

    # stabilization on the lagging second derived subdivision
    st = b["stable"]
    shift = rat(st["shift"])
    if shift != cfg.shift:
        raise BundleRejected("stable.shift", "shift differs from the configuration")
    Kpp = lagging_second_derived(host, Fh, shift)
    R = Kpp.result
    F2 = lift_map(Kpp, Fh)
    lab2 = tuple(hlab[c[0]] for c in Kpp.vertex_carrier)
    seq2 = CollapseSequence(R, frozenset(R.simplexes), _steps_from_json(st["steps"], "stable.steps"),
                            [int(g) for g in st["groups"]], list(st["names"]), F=F2, labels=lab2)
    if sum(seq2.groups) != len(seq2.steps):
        raise BundleRejected("stable.groups", "group sizes do not add up to the step count")
    target = _Neighborhoods(Kpp).induced(bottom)
    rr = verify_collapse(seq2, R.simplexes, target)
    if not rr:
        raise BundleRejected(f"stable.steps[{rr.index}]", rr.reason)
    _compare_certs(st["certificates"], certify_sequence(seq2, mode, stable=True), "stable.certificates")
    if not all(c["stable"] for c in st["certificates"]):
        raise BundleRejected("stable.certificates", "a certificate is not a stable one")

    # the level map and its report
    h = collapse_to_deformation(seq2)
    Phi = level_shift(F2, reparametrize(h, Xp), Xp, inp.part, concordance=F)
    lm = b["level_map"]
    if lm.get("stages") != len(h.stages):
        raise BundleRejected("level_map.stages", "stage count differs from the replayed collapse")
    for key, f in (("f_start", Phi.f_start), ("f_end", Phi.f_end)):
        if [fmt_point(q) for q in f.images] != lm.get(key):
            raise BundleRejected(f"level_map.{key}", "endpoint map differs from the concordance")
    rep = b["report"]
    for i, s in enumerate(rep.get("samples", [])):
        try:
            x, t, v = point(s["x"]), rat(s["t"]), point(s["value"])
        except (KeyError, TypeError, ValueError) as e:
            raise BundleRejected(f"report.samples[{i}]", f"malformed ({e!r})") from e
        if Phi(x, t) != v:
            raise BundleRejected(f"report.samples[{i}].value", "Phi re-evaluates to a different point")
    fresh = verify_level_map(Phi, cfg.mode, cfg.l, cfg.eps, cfg.samples, cfg.seed, strict=False).to_json()
    for k in fresh:
        if rep.get(k) != fresh[k]:
            raise BundleRejected(f"report.{k}", f"stored {rep.get(k)!r}, recomputed {fresh[k]!r}")
    if not fresh["ok"]:
        raise BundleRejected("report.ok", "the level map does not verify")
    return {"ok": True, "sunny_steps": len(seq.steps), "stable_steps": len(seq2.steps),
            "facts": sum(len(c["checked_pairs"]) for c in sb["certificates"] + st["certificates"])}


def _check_host(host, himgs, hlab, T, F, labels):
    """The host subdivides ``X x I`` and carries ``F`` and the labels."""
    from .exact import combo
    for w, x in enumerate(host.vertices):
        try:
            s, lam = T.locate(x)
        except LinkHomotopyError:
            raise BundleRejected(f"sunny.host.vertices[{w}]", "vertex is outside X x I") from None
        if combo(lam, F.image_points(s)) != himgs[w]:
            raise BundleRejected(f"sunny.images[{w}]", "image is not F at the vertex")
        if labels[s[0]] != hlab[w]:
            raise BundleRejected(f"sunny.host.labels[{w}]", "label differs from the component of the vertex")
    vol = {}
    for f in host.facets:
        if len(f) != len(next(iter(T.facets))):
            raise BundleRejected("sunny.host.facets", f"{f} is not top-dimensional")
        pts = host.points(f)
        home = next((t for t in T.facets if all(_in_closed(T, t, p) for p in pts)), None)
        if home is None:
            raise BundleRejected("sunny.host.facets", f"{f} does not lie in one simplex of X x I")
        vol[home] = vol.get(home, Fraction(0)) + simplex_volume_ratio(pts, T.points(home))
    for t in T.facets:
        if vol.get(t) != 1:
            raise BundleRejected("sunny.host.facets", f"host does not exactly cover {t}")


def _in_closed(T, s, p):
    from .exact import barycentric_coords
    lam = barycentric_coords(p, T.points(s))
    return lam is not None and min(lam) >= 0
