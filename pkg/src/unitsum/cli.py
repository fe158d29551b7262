"""Command-line front end.

Every subcommand prints deterministic, newline-terminated output for a
fixed invocation: big integers travel as decimal strings in JSON, CSV
always carries a header row, and nothing time- or host-dependent lands
on stdout.  Exit codes: 0 success, 2 nothing found (no relation or
certificate), 3 invalid input, 4 an iteration or search budget was hit,
5 an internal verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import cubic, engine, oracle, relations
from .double_base import (
    BasePair,
    ExtendedExpansion,
    SignedExpansion,
    evaluate_expansion,
    expand_extended,
    expand_with_stats,
    expansion_from_json,
    expansion_to_json,
    pq_rational,
    weight,
)
from .errors import (
    BudgetExceeded,
    InvalidExpansion,
    IterationCapExceeded,
    NoRelationFound,
    RelationBroken,
    RelationInvalid,
    UnitSumError,
    VerificationFailed,
)

EXIT_OK = 0
EXIT_NOT_FOUND = 2
EXIT_BAD_INPUT = 3
EXIT_CAP = 4
EXIT_VERIFY = 5


def _print(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _print_json(obj) -> None:
    _print(json.dumps(obj, indent=2))


def _base(args) -> BasePair:
    return BasePair(int(args.p), int(args.q))


def _mono(p: int, q: int, i: int, j: int) -> str:
    parts = []
    if i:
        parts.append(f"{p}^{i}")
    if j:
        parts.append(f"{q}^{j}")
    return "*".join(parts) if parts else "1"


def _expansion_text(exp, value_str: str) -> str:
    p, q = exp.base.p, exp.base.q
    if not exp.terms:
        return f"{value_str} = (empty sum)"
    rendered = " ".join(
        f"{'+' if d > 0 else '-'} {_mono(p, q, i, j)}" for d, i, j in exp.terms
    )
    return f"{value_str} = {rendered}"


def _cmd_expand(args) -> int:
    base = _base(args)
    v = int(args.value)
    stats = expand_with_stats(v, base, args.search_bound, args.seed_method)
    exp = stats.expansion
    if args.format == "json":
        _print_json(expansion_to_json(exp))
    else:
        _print(_expansion_text(exp, str(v)))
        _print(f"weight {weight(exp)}  steps {stats.steps}  w_init {stats.w_init}")
    return EXIT_OK


def _cmd_expand_extended(args) -> int:
    base = _base(args)
    text = args.value
    if "/" in text:
        n, d = text.split("/", 1)
        value = Fraction(int(n), int(d))
    else:
        value = Fraction(int(text))
    x = pq_rational(value, base)
    exp = expand_extended(x, base, args.search_bound)
    if args.format == "json":
        _print_json(expansion_to_json(exp))
    else:
        shown = str(value) if value.denominator > 1 else str(value.numerator)
        _print(_expansion_text(exp, shown))
        _print(f"weight {weight(exp)}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.file == "-":
        raw = sys.stdin.read()
    else:
        with open(args.file, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        print(f"error: not valid JSON: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    try:
        exp, claimed = expansion_from_json(data)
    except InvalidExpansion as exc:
        _print(f"status invalid ({exc})")
        return EXIT_VERIFY
    value = evaluate_expansion(exp)
    shown = (
        str(value)
        if isinstance(value, int) or value.denominator == 1
        else f"{value.numerator}/{value.denominator}"
    )
    _print(f"value {shown}")
    if Fraction(value) == claimed:
        _print("status valid")
        return EXIT_OK
    _print(f"status invalid (document claims {claimed})")
    return EXIT_VERIFY


def _plain_relation_json(rel) -> dict:
    return {
        "kind": "plain",
        "x": str(rel.x),
        "y": str(rel.y),
        "sign": str(rel.sign),
    }


def _extended_relation_json(rel) -> dict:
    return {
        "kind": "extended",
        "a": str(rel.a),
        "b": str(rel.b),
        "c": str(rel.c),
        "d": str(rel.d),
        "sign": str(rel.sign),
        "form": rel.form,
    }


def _plain_relation_text(base: BasePair, rel) -> str:
    if rel.sign == 1:
        return f"2 = {_mono(base.p, base.q, rel.x, 0)} - {_mono(base.p, base.q, 0, rel.y)}"
    return f"2 = {_mono(base.p, base.q, 0, rel.y)} - {_mono(base.p, base.q, rel.x, 0)}"


def _extended_relation_text(base: BasePair, rel) -> str:
    pos = _mono(base.p, base.q, rel.a, rel.b)
    other = _mono(base.p, base.q, rel.c, rel.d)
    op = "+" if rel.sign == 1 else "-"
    return f"2 = {pos} {op} {other}"


def _certificate_text(cert) -> str:
    lines = [
        f"obstruction modulus {cert.modulus}",
        "p_orbit " + " ".join(str(r) for r in cert.p_orbit),
        "q_orbit " + " ".join(str(r) for r in cert.q_orbit),
    ]
    return "\n".join(lines)


def _cmd_find_relation(args) -> int:
    base = _base(args)
    rel = relations.find_plain_relation(base, args.max_exp)
    if rel is not None:
        if args.format == "json":
            _print_json(_plain_relation_json(rel))
        else:
            _print(_plain_relation_text(base, rel))
        return EXIT_OK
    if args.extended:
        ext = relations.find_extended_relation(base, args.max_exp)
        if ext is not None:
            if args.format == "json":
                _print_json(_extended_relation_json(ext))
            else:
                _print(_extended_relation_text(base, ext))
            return EXIT_OK
    cert = relations.find_obstruction(base, args.max_modulus)
    if cert is not None:
        if args.format == "json":
            _print_json(cert.to_json())
        else:
            _print(_certificate_text(cert))
        return EXIT_NOT_FOUND
    _print(
        f"no relation with exponents up to {args.max_exp}; "
        f"no obstruction certificate with modulus up to {args.max_modulus}"
    )
    return EXIT_NOT_FOUND


def _cmd_obstruct(args) -> int:
    base = _base(args)
    cert = relations.find_obstruction(base, args.max_modulus)
    if cert is None:
        _print(f"no obstruction certificate with modulus up to {args.max_modulus}")
        return EXIT_NOT_FOUND
    if args.format == "json":
        _print_json(cert.to_json())
    else:
        _print(_certificate_text(cert))
    return EXIT_OK


def _cmd_min_weight(args) -> int:
    base = _base(args)
    v = int(args.value)
    box = None
    if (args.i_max is None) != (args.j_max is None):
        print("error: give both --i-max and --j-max or neither", file=sys.stderr)
        return EXIT_BAD_INPUT
    if args.i_max is not None:
        box = (args.i_max, args.j_max)
    witness = oracle.min_weight_bruteforce(v, base, args.max_weight, box, args.budget)
    shown_box = box if box is not None else oracle.default_box(v, base)
    if witness is None:
        _print(
            f"no expansion of weight <= {args.max_weight} "
            f"inside box {shown_box[0]},{shown_box[1]}"
        )
        return EXIT_OK
    if args.format == "json":
        doc = expansion_to_json(witness.expansion)
        doc["weight"] = str(witness.weight)
        _print_json(doc)
    else:
        _print(f"weight {witness.weight}")
        _print(_expansion_text(witness.expansion, str(v)))
    return EXIT_OK


def _rep_terms_sorted(rep):
    return sorted(rep.coeffs.items(), key=lambda kv: (kv[0][0], kv[0][2]))


def _cmd_cubic_repr(args) -> int:
    params = cubic.CubicParams(int(args.a))
    beta = cubic.CubicElement(params, int(args.c0), int(args.c1), int(args.c2))
    rep = cubic.represent_unit_sums(beta)
    back = engine.evaluate(rep, cubic.cubic_evaluator(params))
    if rep and back != beta:
        raise VerificationFailed("representation does not evaluate back to the input")
    if not rep and beta:
        raise VerificationFailed("empty representation for a nonzero element")
    items = _rep_terms_sorted(rep)
    max_coeff = max((a for _, a in items), default=0)
    if args.format == "json":
        _print_json(
            {
                "a": str(params.a),
                "coords": [str(c) for c in beta.coords],
                "max_coefficient": str(max_coeff),
                "weight": str(sum(a for _, a in items)),
                "steps": str(rep.steps),
                "terms": [
                    {
                        "coeff": str(a),
                        "sign": "+" if k == 0 else "-",
                        "i": str(x[0]),
                        "j": str(x[1]),
                    }
                    for (k, _, x), a in items
                ],
            }
        )
    else:
        body = " ".join(
            f"{'+' if k == 0 else '-'} {a}*u({x[0]},{x[1]})" for (k, _, x), a in items
        )
        _print(f"beta({beta.c0},{beta.c1},{beta.c2}) = {body if body else '(empty sum)'}")
        _print(f"max coefficient {max_coeff}  steps {rep.steps}")
    return EXIT_OK


def _cmd_cubic_verify(args) -> int:
    lo, hi = int(args.a_from), int(args.a_to)
    if lo > hi:
        print("error: --a-from must not exceed --a-to", file=sys.stderr)
        return EXIT_BAD_INPUT
    count = 0
    for a in range(lo, hi + 1):
        cubic.three_relation(cubic.CubicParams(a))
        count += 1
    _print(f"{count}/{count} relations verified, sum = 3")
    return EXIT_OK


def _cmd_bench_steps(args) -> int:
    base = _base(args)
    lo, hi = int(args.lo), int(args.hi)
    if lo > hi:
        print("error: --from must not exceed --to", file=sys.stderr)
        return EXIT_BAD_INPUT
    lines = ["n,w_init,steps,weight_final"]
    for n in range(lo, hi + 1):
        stats = expand_with_stats(n, base, args.search_bound)
        lines.append(f"{n},{stats.w_init},{stats.steps},{weight(stats.expansion)}")
    _print("\n".join(lines))
    return EXIT_OK


def _add_base_args(sub) -> None:
    sub.add_argument("--p", required=True, help="first base")
    sub.add_argument("--q", required=True, help="second base")


def _add_format_arg(sub) -> None:
    sub.add_argument("--format", choices=("text", "json"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unitsum",
        description="signed double-base expansions and unit-sum representations",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    s = subs.add_parser("expand", help="signed expansion of an integer")
    _add_base_args(s)
    s.add_argument("value", help="integer to expand")
    s.add_argument("--search-bound", type=int, default=64)
    s.add_argument("--seed-method", choices=("padic", "greedy"), default="padic")
    _add_format_arg(s)
    s.set_defaults(func=_cmd_expand)

    s = subs.add_parser("expand-extended", help="extended expansion of n or n/d")
    _add_base_args(s)
    s.add_argument("value", help="integer or fraction n/d whose d divides a base power product")
    s.add_argument("--search-bound", type=int, default=64)
    _add_format_arg(s)
    s.set_defaults(func=_cmd_expand_extended)

    s = subs.add_parser("verify", help="recheck an expansion JSON document")
    s.add_argument("file", help="path to the document, or - for stdin")
    s.set_defaults(func=_cmd_verify)

    s = subs.add_parser("find-relation", help="search base-pair relations")
    _add_base_args(s)
    s.add_argument("--max-exp", type=int, default=64)
    s.add_argument("--max-modulus", type=int, default=1000)
    s.add_argument("--extended", action="store_true", help="also search inverse-power forms")
    _add_format_arg(s)
    s.set_defaults(func=_cmd_find_relation)

    s = subs.add_parser("obstruct", help="search an obstruction certificate")
    _add_base_args(s)
    s.add_argument("--max-modulus", type=int, default=1000)
    _add_format_arg(s)
    s.set_defaults(func=_cmd_obstruct)

    s = subs.add_parser("min-weight", help="brute-force minimal-weight expansion")
    _add_base_args(s)
    s.add_argument("value")
    s.add_argument("--max-weight", type=int, default=8)
    s.add_argument("--i-max", type=int, default=None)
    s.add_argument("--j-max", type=int, default=None)
    s.add_argument("--budget", type=int, default=20_000_000)
    _add_format_arg(s)
    s.set_defaults(func=_cmd_min_weight)

    s = subs.add_parser("cubic-repr", help="coefficient-2 unit-sum representation")
    s.add_argument("--a", required=True, help="family parameter")
    s.add_argument("c0")
    s.add_argument("c1")
    s.add_argument("c2")
    _add_format_arg(s)
    s.set_defaults(func=_cmd_cubic_repr)

    s = subs.add_parser("cubic-verify", help="check the three-unit identity over a range")
    s.add_argument("--a-from", required=True)
    s.add_argument("--a-to", required=True)
    s.set_defaults(func=_cmd_cubic_verify)

    s = subs.add_parser("bench-steps", help="CSV of rewrite counts over a range")
    _add_base_args(s)
    s.add_argument("--from", dest="lo", required=True)
    s.add_argument("--to", dest="hi", required=True)
    s.add_argument("--search-bound", type=int, default=64)
    s.set_defaults(func=_cmd_bench_steps)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help
        return EXIT_OK if exc.code == 0 else EXIT_BAD_INPUT
    try:
        return args.func(args)
    except NoRelationFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (IterationCapExceeded, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (VerificationFailed, RelationBroken, RelationInvalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (InvalidExpansion, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except UnitSumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
