"""Command line interface.

Exit codes: 0 success, 1 a check failed (invalid pair, verification
mismatch), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Sequence

from . import scenarios
from .cones import construct_nef, enumerate_numexc, in_actual_ample_cone, in_generic_ample_cone
from .lattice import IntegerIsometry, LatticeClass
from .pairs import InvalidPair, classify, dump_pair, known_roots, load_pair, pair_from_json
from .pell import pell_fundamental, pell_negative_solvable
from .roots import RootStatus, check_isometry, find_R_distinguished, roots_up_to_bound


class UsageError(Exception):
    pass


def _emit(obj: Any) -> None:
    print(json.dumps(obj, ensure_ascii=False))


def _cls(text: str, n: int | None = None) -> LatticeClass:
    try:
        x = LatticeClass.parse(text)
    except ValueError as exc:
        raise UsageError(f"cannot parse class {text!r}: {exc}") from None
    if n is not None and x.n != n:
        raise UsageError(f"class {text!r} has {len(x.coords)} coordinates, the pair needs {n + 1}")
    return x


def _params(items: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        try:
            out[key] = int(value)
        except ValueError:
            raise UsageError(f"parameter {key} must be an integer") from None
    return out


def _nef(args, pair) -> LatticeClass | None:
    return _cls(args.nef, pair.n) if getattr(args, "nef", None) else None


def cmd_pair_validate(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        pair_from_json(data)
    except InvalidPair as exc:
        _emit({"valid": False, "problems": str(exc).split("; ")})
        return 1
    _emit({"valid": True, "problems": []})
    return 0


def cmd_pair_classify(args) -> int:
    _emit(classify(load_pair(args.file)).to_json())
    return 0


def cmd_nef_construct(args) -> int:
    pair = load_pair(args.file)
    seed = _cls(args.seed, pair.n)
    config = list(pair.components)
    if args.with_declared:
        config += list(pair.declared_minus_two)
    res = construct_nef(seed, config)
    _emit({"nef": res.cls.to_json(), "multipliers": [str(r) for r in res.multipliers], "scale": res.scale,
           "square": res.cls.square()})
    return 0


def cmd_numexc_enum(args) -> int:
    pair = load_pair(args.file)
    for item in enumerate_numexc(pair, args.bound, _nef(args, pair)):
        _emit(item.to_json())
    return 0


def cmd_cone_member(args) -> int:
    pair = load_pair(args.file)
    x = _cls(args.cls, pair.n)
    check = in_actual_ample_cone if args.actual else in_generic_ample_cone
    _emit(check(pair, x, args.bound, _nef(args, pair)).to_json())
    return 0


def cmd_roots_find(args) -> int:
    pair = load_pair(args.file)
    for v in roots_up_to_bound(pair, args.bound, _nef(args, pair)):
        _emit(v.to_json())
    return 0


def cmd_roots_distinguished(args) -> int:
    pair = load_pair(args.file)
    verified = list(known_roots(pair))
    verified += [v.beta for v in roots_up_to_bound(pair, args.bound, _nef(args, pair))
                 if v.status is RootStatus.IN_R]
    cert = find_R_distinguished(pair, verified, args.bound)
    _emit({"found": cert is not None, "roots_checked": len(verified),
           "certificate": None if cert is None else cert.to_json()})
    return 0


def cmd_isometry_check(args) -> int:
    pair = load_pair(args.source)
    pair2 = load_pair(args.target)
    with open(args.matrix, encoding="utf-8") as fh:
        matrix = json.load(fh)
    try:
        f = IntegerIsometry(tuple(tuple(int(v) for v in row) for row in matrix))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad isometry matrix: {exc}") from None
    probes = [_cls(p, pair2.n) for p in args.probe]
    report = check_isometry(pair, pair2, f, args.bound, probes=probes)
    _emit(report.to_json())
    return 0


def cmd_pell(args) -> int:
    fund = pell_fundamental(args.D)
    out: dict[str, Any] = {"D": args.D, "fundamental": [fund.a, fund.b]}
    if args.negative:
        solvable, cert = pell_negative_solvable(args.D)
        out["negative_solvable"] = solvable
        out["negative_certificate"] = cert
    _emit(out)
    return 0


def cmd_scenario_build(args) -> int:
    sc = scenarios.build(args.name, _params(args.params))
    named = {k: v.to_json() for k, v in sc.named.items()}
    extra = {"scenario": {"name": sc.name, "params": sc.params}, "named_classes": named}
    if args.output:
        dump_pair(sc.pair, args.output, extra)
    else:
        _emit(sc.to_json())
    return 0


def cmd_scenario_verify(args) -> int:
    sc = scenarios.build(args.name, _params(args.params))
    checks = scenarios.verify(sc)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anticanonical", description="Exact lattice computations for anticanonical pairs.")
    top = p.add_subparsers(dest="group", required=True)

    def group(name, help_):
        return top.add_parser(name, help=help_).add_subparsers(dest="action", required=True)

    def bounded(sp, nef=True):
        sp.add_argument("--bound", "-B", type=int, required=True)
        if nef:
            sp.add_argument("--nef", help="nef class certificate, comma-separated")

    pair = group("pair", "validate or classify a pair file")
    sp = pair.add_parser("validate")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_pair_validate)
    sp = pair.add_parser("classify")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_pair_classify)

    sp = group("nef", "nef classes").add_parser("construct")
    sp.add_argument("file")
    sp.add_argument("--seed", required=True)
    sp.add_argument("--with-declared", action="store_true", help="also make H orthogonal to declared -2 classes")
    sp.set_defaults(func=cmd_nef_construct)

    sp = group("numexc", "numerical exceptional classes").add_parser("enum")
    sp.add_argument("file")
    bounded(sp)
    sp.set_defaults(func=cmd_numexc_enum)

    sp = group("cone", "ample cone membership").add_parser("member")
    sp.add_argument("file")
    sp.add_argument("--class", dest="cls", required=True)
    sp.add_argument("--actual", action="store_true")
    bounded(sp)
    sp.set_defaults(func=cmd_cone_member)

    roots = group("roots", "roots of the complement lattice")
    sp = roots.add_parser("find")
    sp.add_argument("file")
    bounded(sp)
    sp.set_defaults(func=cmd_roots_find)
    sp = roots.add_parser("distinguished")
    sp.add_argument("file")
    bounded(sp)
    sp.set_defaults(func=cmd_roots_distinguished)

    sp = group("isometry", "isometries between pairs").add_parser("check")
    sp.add_argument("source")
    sp.add_argument("target")
    sp.add_argument("--matrix", required=True, help="JSON file with a row-major integer matrix")
    sp.add_argument("--probe", action="append", default=[], help="class in the target to pull back")
    bounded(sp, nef=False)
    sp.set_defaults(func=cmd_isometry_check)

    sp = top.add_parser("pell", help="Pell equation a^2 - D b^2 = 1")
    sp.add_argument("D", type=int)
    sp.add_argument("--negative", action="store_true", help="also decide a^2 - D b^2 = -1")
    sp.set_defaults(func=cmd_pell)

    sc = group("scenario", "named constructions")
    sp = sc.add_parser("build")
    sp.add_argument("name", choices=sorted(scenarios.BUILDERS))
    sp.add_argument("params", nargs="*", help="key=value")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_scenario_build)
    sp = sc.add_parser("verify")
    sp.add_argument("name", choices=sorted(scenarios.BUILDERS))
    sp.add_argument("params", nargs="*", help="key=value")
    sp.set_defaults(func=cmd_scenario_verify)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1
    except (UsageError, InvalidPair, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
