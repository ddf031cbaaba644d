"""Command-line interface.

Every command prints UTF-8 JSON lines.  Exit codes: 0 success,
1 verification failure, 2 parse error, 3 shape mismatch, 4 infeasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import constructions as C
from .core import (
    GroupError,
    InfeasibleError,
    ParseError,
    ShapeError,
    parse_endo,
    parse_group,
)
from .engine import r_lower_bound_truncated, reidemeister, spectrum_localized
from .oracle import DEFAULT_MAX_ORDER, FiniteGroupTable, reidemeister_oracle
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_VERIFY, EXIT_PARSE, EXIT_SHAPE, EXIT_INFEASIBLE = 1, 2, 3, 4


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _finite_table(args) -> tuple[FiniteGroupTable, object]:
    group = parse_group(args.group)
    endo = parse_endo(args.endo)
    if not group.is_finite:
        raise InfeasibleError(f"{group.render()} is infinite; classes can only be enumerated on finite groups")
    return FiniteGroupTable.from_expr(group), endo


def cmd_rnum(args) -> int:
    _emit(reidemeister(parse_group(args.group), parse_endo(args.endo)).to_json())
    return 0


def cmd_oracle(args) -> int:
    table, endo = _finite_table(args)
    _emit(reidemeister_oracle(table, endo, args.max_order, representatives=args.reps).to_json())
    return 0


def cmd_classes(args) -> int:
    table, endo = _finite_table(args)
    result = reidemeister_oracle(table, endo, args.max_order)
    _emit([list(r) for r in result.representatives])
    return 0


def cmd_spectrum(args) -> int:
    _emit(spectrum_localized(args.p, args.mmax).to_json())
    return 0


def cmd_bound(args) -> int:
    units = {}
    if args.units:
        raw = json.loads(Path(args.units).read_text(encoding="utf-8"))
        units = {int(p): Fraction(str(u)) for p, u in raw.items()}
    bound = r_lower_bound_truncated(units, args.primes)
    out = bound.to_json()
    out.update(certificate="lower-bound", primeBound=str(args.primes))
    _emit(out)
    return 0


def _recipe(name: str, params: list[str]):
    if name == "theta":
        return C.theta(int(params[0]))
    if name == "pairing":
        return C.pairing_automorphism(int(params[0]))
    if name == "interleave":
        return C.interleave_phi([int(x) for x in _split(params)])
    if name == "interleave-inverse":
        return C.interleave_psi([int(x) for x in _split(params)])
    if name == "assembler":
        return C.finite_cyclic_assembler([int(x) for x in _split(params)])
    if name == "neg":
        return C.negation(parse_group(" ".join(params)))
    if name == "lift":
        if len(params) < 2:
            raise ParseError("lift needs: DIVISIBLE-GROUP INNER-NAME [INNER-PARAMS...]")
        return C.reduced_lift(parse_group(params[0]), _recipe(params[1], params[2:]))
    raise ParseError(f"unknown construction {name!r}")


def _split(params: list[str]) -> list[str]:
    return [x for p in params for x in p.replace(",", " ").split()]


def cmd_construct(args) -> int:
    recipe = _recipe(args.name, args.params or [])
    _emit(recipe.to_json())
    return 0 if recipe.ok else EXIT_VERIFY


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, max_order=args.max_order,
                       max_prime=args.max_prime, mmax=args.mmax)
    if args.json:
        _emit(report.to_json())
    else:
        for check in report.checks:
            _emit(check.to_json())
        summary = report.to_json()
        del summary["checks"]
        _emit(summary)
    return report.exit_status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reidnum", description="Reidemeister numbers of abelian group endomorphisms")
    sub = parser.add_subparsers(dest="command", required=True)

    def group_endo(p):
        p.add_argument("--group", required=True, help='group expression, e.g. "Z^2 + Z/4"')
        p.add_argument("--endo", required=True, help='endomorphism, e.g. "theta:2" or "matrix:[[0,1],[1,0]]"')

    p = sub.add_parser("rnum", help="exact Reidemeister number")
    group_endo(p)
    p.set_defaults(func=cmd_rnum)

    p = sub.add_parser("oracle", help="brute-force count on a finite group")
    group_endo(p)
    p.add_argument("--reps", action="store_true", help="include class representatives")
    p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("classes", help="lexicographically least representative of each class")
    group_endo(p)
    p.add_argument("--max-order", type=int, default=DEFAULT_MAX_ORDER)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("spectrum", help="Reidemeister spectrum of Z[1/p] over units +-p^m, |m| <= mmax")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--mmax", type=int, required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bound", help="lower bound for R on a sum of Z[1/p] truncated at a prime cutoff")
    p.add_argument("--primes", type=int, required=True, help="prime cutoff B")
    p.add_argument("--units", help='JSON file {"3": "9", "5": "-1"}; missing primes use the identity')
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("construct", help="build a named automorphism and check its obligations")
    p.add_argument("--name", required=True,
                   choices=["theta", "pairing", "interleave", "interleave-inverse", "assembler", "neg", "lift"])
    p.add_argument("--params", nargs="*", help="construction parameters")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--max-order", type=int, default=4096)
    p.add_argument("--max-prime", type=int, default=11)
    p.add_argument("--mmax", type=int, default=16)
    p.add_argument("--json", action="store_true", help="one JSON report object instead of one line per check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, GroupError, json.JSONDecodeError) as exc:
        code, message = EXIT_PARSE, str(exc)
    except ShapeError as exc:
        code, message = EXIT_SHAPE, str(exc)
    except InfeasibleError as exc:
        code, message = EXIT_INFEASIBLE, str(exc)
    except ValueError as exc:
        code, message = EXIT_PARSE, str(exc)
    sys.stderr.write(json.dumps({"error": message, "exit": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
