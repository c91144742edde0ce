"""Command line entry point: ``eisprod <command> ...``.

Exit codes: 0 success, 1 malformed input, 2 no solution, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .cache import FamilyCache
from .eisenstein import EisensteinSymbol, eisenstein_family
from .errors import EisprodError, NeedMoreCoefficients, NotCovered, RankUnstable
from .modgroup import GroupElement
from .qseries import QExpansion
from . import solver

EXIT_OK, EXIT_MALFORMED, EXIT_NO_SOLUTION, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _pair(text: str, n: int, name: str):
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name}: expected {n} comma-separated integers, got {text!r}")
    if len(parts) != n:
        raise UsageError(f"--{name}: expected {n} comma-separated integers, got {text!r}")
    return parts


def _positive(name):
    def conv(s):
        try:
            v = int(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be positive")
        return v
    return conv


def _emit(obj, out=None):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _cache(args):
    if getattr(args, "no_cache", False):
        return None
    return FamilyCache(args.cache_dir)


def _read_json(path, field):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"{field}: cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise UsageError(f"{field}: {path} is not valid JSON ({e.msg})")


def load_target(path):
    """A QExpansion document, optionally wrapped as {"expansion": ..., "level": N, "group": ...}."""
    data = _read_json(path, "--target")
    meta = {}
    if isinstance(data, dict) and "expansion" in data:
        meta = {k: v for k, v in data.items() if k != "expansion"}
        data = data["expansion"]
    try:
        return QExpansion.from_json(data), meta
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise UsageError(f"--target: malformed expansion ({e})")


# ----------------------------------------------------------------------------

def cmd_eisenstein(args):
    c, d = _pair(args.index, 2, "index")
    fam = eisenstein_family(args.weight, args.level, args.prec, cache=_cache(args))
    f = fam[EisensteinSymbol.make(args.weight, args.level, c, d)]
    _emit({"symbol": EisensteinSymbol.make(args.weight, args.level, c, d).to_json(), "expansion": f.to_json()},
          args.output)
    return EXIT_OK


def cmd_family(args):
    cache = _cache(args)
    fam = eisenstein_family(args.weight, args.level, args.prec, cache=cache)
    out = {
        "weight": fam.weight, "level": fam.level, "truncation": fam.truncation,
        "members": len(fam), "representatives": len(fam.representatives()),
        "normalization": fam.normalization,
    }
    if cache is not None:
        out["cache_file"] = str(cache.path(fam.weight, fam.level, fam.truncation))
    _emit(out, args.output)
    return EXIT_OK


def cmd_rank(args):
    if args.constant_terms:
        r = solver.constant_term_rank(args.weight, args.level)
        _emit({"weight": args.weight, "level": args.level, "constant_term_rank": r}, args.output)
    else:
        r = solver.span_rank((args.weight, args.level), cache=_cache(args))
        _emit({"weight": args.weight, "level": args.level, "rank": r}, args.output)
    return EXIT_OK


def cmd_bounds(args):
    b = solver.theorem_bounds(solver.BoundRequest(args.k, args.l, args.level, args.generated))
    _emit(b.to_json(), args.output)
    return EXIT_OK


def cmd_express(args):
    target, meta = load_target(args.target)
    prec = "auto" if args.prec is None else args.prec
    kw = dict(prec=prec, target_meta=meta, cache=_cache(args))
    try:
        if args.escalate:
            b = solver.theorem_bounds(solver.BoundRequest(args.k, args.l, int(meta.get("level", 1))))
            cap = b.N0 if isinstance(b.N0, int) else None
            if cap is not None and args.max_level:
                cap = min(cap, args.max_level)
            elif args.max_level:
                cap = args.max_level
            res = solver.express_escalating(target, args.k, args.l, args.level_products, args.level_eis,
                                            max_level=cap, **kw)
        else:
            res = solver.express(target, args.k, args.l, args.level_products, args.level_eis, **kw)
    except NeedMoreCoefficients as e:
        raise UsageError(f"--target: {e}")
    except ArithmeticError as e:
        sys.stderr.write(f"verification failed: {e}\n")
        return EXIT_VERIFY
    if isinstance(res, solver.NoSolution):
        sys.stderr.write(
            f"no solution: target lies outside the span (rank {res.rank}, rank with target "
            f"{res.rank_with_target}, {res.rows} rows)\n")
        _emit({"status": "no_solution", "rank": res.rank, "rank_with_target": res.rank_with_target,
               "rows": res.rows, "levels": res.levels}, args.output)
        return EXIT_NO_SOLUTION
    _emit(res.to_json(), args.output)
    return EXIT_OK


def _cusp_label(g: GroupElement) -> str:
    if g.c == 0:
        return "oo"
    x = Fraction(g.a, g.c)
    return f"{x.numerator}/{x.denominator}"


def cmd_cusps(args):
    data = _read_json(args.certificate, "--certificate")
    try:
        cert = solver.ExpressionCertificate.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"--certificate: {e}")
    rep = solver.verify_certificate(cert, cache=_cache(args))
    if not rep.verified:
        sys.stderr.write(f"certificate failed verification: {rep.message}\n")
        return EXIT_VERIFY
    if args.gamma:
        a, b, c, d = _pair(args.gamma, 4, "gamma")
        try:
            gammas = [(GroupElement(a, b, c, d), None)]
        except ValueError as e:
            raise UsageError(f"--gamma: {e}")
    else:
        try:
            group = solver.group_from_meta(cert.target_meta)
        except KeyError:
            raise UsageError("target_meta.group: expected Gamma0, Gamma1 or Gamma")
        gammas = group.cusps()
    out = []
    for g, w in gammas:
        e = solver.cusp_expansion(cert, g, args.prec, cache=_cache(args))
        item = {"gamma": [g.a, g.b, g.c, g.d], "cusp": _cusp_label(g), "expansion": e.to_json()}
        if w is not None:
            item["width"] = w
        out.append(item)
    _emit({"weight": cert.weight, "cusps": out}, args.output)
    return EXIT_OK


def cmd_check(args):
    from .checks import SUITES

    rep = SUITES[args.suite]()
    _emit(rep, args.output)
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--cache-dir", default=None, help="family cache directory (default: $EISPROD_CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--output", "-o", default=None, help="write JSON here instead of stdout")
    p = _Parser(prog="eisprod", description="Products of Eisenstein series: expansions, bounds, certificates.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    pos = _positive

    s = sub.add_parser("eisenstein", parents=[common], help="one normalized Eisenstein series")
    s.add_argument("--weight", type=pos("weight"), required=True)
    s.add_argument("--level", type=pos("level"), required=True)
    s.add_argument("--index", required=True, help="c,d")
    s.add_argument("--prec", type=pos("prec"), required=True)
    s.set_defaults(func=cmd_eisenstein)

    s = sub.add_parser("family", parents=[common], help="build and cache a full family")
    s.add_argument("--weight", type=pos("weight"), required=True)
    s.add_argument("--level", type=pos("level"), required=True)
    s.add_argument("--prec", type=pos("prec"), required=True)
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("rank", parents=[common], help="exact rank of a family span")
    s.add_argument("--weight", type=pos("weight"), required=True)
    s.add_argument("--level", type=pos("level"), required=True)
    s.add_argument("--constant-terms", action="store_true")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("bounds", parents=[common], help="Sturm bound, N0 and N1")
    s.add_argument("--k", type=pos("k"), required=True)
    s.add_argument("--l", type=pos("l"), required=True)
    s.add_argument("--level", type=pos("level"), required=True)
    s.add_argument("--generated", action="store_true", help="representation generated by T-fixed vectors")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("express", parents=[common], help="find a product certificate for a target")
    s.add_argument("--target", required=True)
    s.add_argument("--k", type=pos("k"), required=True)
    s.add_argument("--l", type=pos("l"), required=True)
    s.add_argument("--level-products", type=pos("level-products"), required=True)
    s.add_argument("--level-eis", type=pos("level-eis"), default=None)
    s.add_argument("--prec", type=pos("prec"), default=None)
    s.add_argument("--escalate", action="store_true")
    s.add_argument("--max-level", type=pos("max-level"), default=None)
    s.set_defaults(func=cmd_express)

    s = sub.add_parser("cusps", parents=[common], help="expansions of a certified form at cusps")
    s.add_argument("--certificate", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--gamma", help="a,b,c,d")
    g.add_argument("--all-cusps", action="store_true")
    s.add_argument("--prec", type=pos("prec"), default=None)
    s.set_defaults(func=cmd_cusps)

    s = sub.add_parser("check", parents=[common], help="run an invariant suite")
    s.add_argument("--suite", choices=["oracles", "hecke", "parity"], required=True)
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        sys.stderr.write(f"eisprod: error: {e}\n")
        return EXIT_MALFORMED
    except (NotCovered, RankUnstable) as e:
        sys.stderr.write(f"eisprod: {type(e).__name__}: {e}\n")
        return EXIT_MALFORMED
    except ValueError as e:
        sys.stderr.write(f"eisprod: error: {e}\n")
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
