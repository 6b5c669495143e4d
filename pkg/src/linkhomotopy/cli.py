"""Command-line front end: ``check``, ``homotopy``, ``verify`` and ``gen``.

Exit codes: 0 success, 1 mathematical failure, 2 input error, 3 internal
invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .collapse import BoundaryConditionViolated, UnsupportedInput
from .errors import (CertificationFailed, CodimensionTooLow, FormatError, GeneralPositionFailed, LinkHomotopyError,
                     MeshTooCoarse, ModePreconditionFailed, OvershadowCycle, PerturbationFailed, UnknownExample,
                     VerificationFailed)
from .formats import (BundleRejected, concordance_from_json, concordance_to_json, dumps, gp_to_json, load,
                      verify_bundle)

OK, MATH_FAIL, INPUT_ERROR, INTERNAL = 0, 1, 2, 3

# errors that say the input is unusable, as opposed to a failed certificate
_INPUT_ERRORS = (FormatError, UnknownExample, CodimensionTooLow, BoundaryConditionViolated, ModePreconditionFailed,
                 MeshTooCoarse, UnsupportedInput)
_MATH_ERRORS = (CertificationFailed, VerificationFailed, GeneralPositionFailed, PerturbationFailed, OvershadowCycle,
                BundleRejected)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fail(code, err):
    print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
    return code


def cmd_gen(args) -> int:
    from .fixtures import generate
    c = generate(args.name, args.seed)
    out = args.out or f"{args.name}-{args.seed}.json"
    _write(out, dumps(concordance_to_json(c.X, c.part, c.Xp.levels, c.F, c.Q)))
    if out != "-":
        print(f"wrote {out}")
    return OK


def cmd_check(args) -> int:
    from .maps import gp_report
    inp = concordance_from_json(load(args.input))
    m = len(inp.F.images[0]) - 1
    rep = gp_report(inp.Xp.total, inp.F.images, inp.X.dim, m)
    text = dumps(gp_to_json(rep))
    _write(args.out, text)
    if args.out not in (None, "-"):
        sys.stdout.write(text)
    if not rep.ok:
        print(f"general position fails at {[list(s) for s in rep.offending_simplexes]}", file=sys.stderr)
    return OK if rep.ok else MATH_FAIL


def _config(args):
    from .homotopy import RunConfig
    d = {}
    if args.config:
        d = load(args.config)
        if not isinstance(d, dict):
            raise FormatError("config file must hold an object")
    for key in ("mode", "l", "eps", "seed", "magnitude", "shift", "retry_budget", "samples", "delta"):
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
    mode = d.get("mode", "link")
    try:
        return RunConfig(mode=mode, l=int(d.get("l", 3 if mode == "doodle" else 2)),
                         eps=Fraction(str(d["eps"])) if d.get("eps") is not None else None,
                         seed=int(d.get("seed", 0)), magnitude=Fraction(str(d.get("magnitude", "1/64"))),
                         shift=Fraction(str(d.get("shift", "1/100"))), retry_budget=int(d.get("retry_budget", 32)),
                         samples=int(d.get("samples", 8)), delta=Fraction(str(d.get("delta", "1/4"))))
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad configuration: {e}") from e


def cmd_homotopy(args) -> int:
    from .formats import bundle_from_result
    from .homotopy import pipeline
    cfg = _config(args)
    inp = concordance_from_json(load(args.input))
    res = pipeline(inp.F, inp.Xp, None, inp.part, cfg)
    text = dumps(bundle_from_result(res, inp.X, inp.part, inp.levels, inp.Q))
    _write(args.out, text)
    r = res.report
    print(f"{cfg.mode} homotopy: {len(res.sunny.steps)} sunny steps, {len(res.stable.steps)} stable steps, "
          f"report {'ok' if r.ok else 'FAILED'}" + (f", wrote {args.out}" if args.out not in (None, "-") else ""),
          file=sys.stderr)
    return OK if r.ok else MATH_FAIL


def cmd_verify(args) -> int:
    summary = verify_bundle(load(args.bundle))
    print(json.dumps(summary, sort_keys=True))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linkhomotopy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded example concordance")
    g.add_argument("name")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="general-position report for a concordance file")
    c.add_argument("input")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    h = sub.add_parser("homotopy", help="turn a concordance into a verified level-preserving homotopy")
    h.add_argument("input")
    h.add_argument("--config", help="JSON file with any of the options below")
    h.add_argument("--mode", choices=["link", "doodle", "eps"])
    h.add_argument("--l", type=int)
    h.add_argument("--eps")
    h.add_argument("--seed", type=int)
    h.add_argument("--magnitude")
    h.add_argument("--shift")
    h.add_argument("--retry-budget", dest="retry_budget", type=int)
    h.add_argument("--samples", type=int)
    h.add_argument("--delta")
    h.add_argument("--out", default="bundle.json")
    h.set_defaults(func=cmd_homotopy)

    v = sub.add_parser("verify", help="independently re-check a bundle")
    v.add_argument("bundle")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BundleRejected as e:
        return _fail(MATH_FAIL, e)
    except _INPUT_ERRORS as e:
        return _fail(INPUT_ERROR, e)
    except _MATH_ERRORS as e:
        return _fail(MATH_FAIL, e)
    except LinkHomotopyError as e:
        return _fail(INTERNAL, e)
    except (KeyError, TypeError, ValueError) as e:
        # malformed but parseable JSON surfaces here
        return _fail(INPUT_ERROR if args.command in ("check", "homotopy", "verify") else INTERNAL, e)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
