"""Command-line front end: ``combilog <command> ...``."""

from __future__ import annotations

import argparse
import os
import sys
import threading
from pathlib import Path

from .bench import ALGORITHMS, FAMILIES, DEFAULT_MAX_NODES, records_csv, run_growth, slopes_csv
from .bracket import BracketAlgo, GuardExceeded, translate_classic
from .kernel import Diverged, free_vars, normal_form
from .kiselyov import Denotation
from .machine import agrees_with_lambda, ext_eq
from .modal import ModalTypeError, erase_modal, eval_modal, typecheck_modal, DualContext
from .staged import (
    DEFAULT_ORDER_CAP,
    Stuck,
    close_under,
    denote_all_orders,
    denote_canonical,
    eval_staged,
    show_order,
    splice_adapt,
)
from .syntax import ParseError, SizeMetric, lams, parse, parse_db, parse_type, show, show_type

EXIT_OK, EXIT_USER, EXIT_UNKNOWN = 0, 1, 2


class UserError(Exception):
    pass


class Unknown(Exception):
    pass


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UserError(f"{name} must be an integer, got {raw!r}") from None


def _read_term_text(args) -> str:
    text = args.term if args.term is not None else sys.stdin.read()
    text = text.strip()
    if not text:
        raise UserError("no term given")
    return text


def _parse(text, dialect="plain", booleans=False):
    try:
        return parse(text, dialect, booleans)
    except ParseError as e:
        raise UserError(f"{e}\n  {text}\n  {' ' * e.pos}^") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args):
    text = _read_term_text(args)
    try:
        if args.type:
            print(show_type(parse_type(text)))
        elif args.db:
            print(show(parse_db(text)))
        else:
            print(show(parse(text, args.dialect, args.booleans)))
    except ParseError as e:
        raise UserError(f"{e}\n  {text}\n  {' ' * e.pos}^") from None


def _translate(term, algo):
    """Return (printed form, combinator term, closed reference term)."""
    if algo in ("leafk", "subtermk", "bc"):
        if free_vars(term):
            raise UserError(f"{algo} needs a closed term; free: {', '.join(free_vars(term))}")
        return None, translate_classic(term, BracketAlgo(algo), max_nodes=DEFAULT_MAX_NODES), term
    order, d = denote_canonical(term, optimized=algo == "kiselyov")
    return d, d.term, lams(order, term)


def cmd_tr(args):
    term = _parse(_read_term_text(args), args.dialect)
    if args.dialect == "modal":
        term = erase_modal(term)
    try:
        denotation, comb, closed = _translate(term, args.algo)
    except GuardExceeded as e:
        raise Unknown(str(e)) from None
    except ValueError as e:
        raise UserError(str(e)) from None
    print(str(denotation) if isinstance(denotation, Denotation) else show(comb))
    if args.verify:
        verdict = agrees_with_lambda(comb, closed, 3, args.fuel)
        if verdict is None:
            raise Unknown("verification ran out of fuel")
        if not verdict:
            raise Unknown("translation disagrees with beta normalization")
        print("verified", file=sys.stderr)


def cmd_eval(args):
    if args.calculus == "lambda":
        term = _parse(_read_term_text(args), "plain", args.booleans)
        print(show(normal_form(term, args.fuel)))
    elif args.calculus == "modal":
        term = _parse(_read_term_text(args), "modal", args.booleans)
        if args.typecheck:
            try:
                print(f"type: {show_type(typecheck_modal(DualContext(), term))}", file=sys.stderr)
            except ModalTypeError as e:
                raise UserError(f"type error: {e}") from None
        print(show(eval_modal(term, args.fuel)))
    else:
        term = _parse(_read_term_text(args), "staged", args.booleans)
        try:
            print(show(eval_staged(term, 0, args.fuel)))
        except Stuck as e:
            raise UserError(f"stuck: {e}") from None


def cmd_denote(args):
    term = _parse(_read_term_text(args))
    if args.canonical:
        order, d = denote_canonical(term)
        print(f"{show_order(order)}\t{d.arity}\t{show(d.term)}")
        return
    try:
        ds = denote_all_orders(term, cap=args.cap)
    except ValueError as e:
        raise UserError(str(e)) from None
    if ds.entries:
        print(ds.dump())


def _order_arg(raw):
    names = [v.strip() for v in raw.split(",") if v.strip()]
    if len(set(names)) != len(names):
        raise UserError(f"repeated name in order {raw!r}")
    return names


def cmd_permute(args):
    term = _parse(_read_term_text(args))
    source, target = _order_arg(args.source), _order_arg(args.target)
    if sorted(source) != sorted(free_vars(term)):
        raise UserError(f"--from must list the free variables {show_order(sorted(free_vars(term)))}")
    try:
        adapted = splice_adapt(close_under(term, source), source, target)
    except ValueError as e:
        raise UserError(str(e)) from None
    print(adapted)
    if args.verify:
        verdict = ext_eq(adapted.term, close_under(term, target).term, len(target), args.fuel)
        if verdict is not True:
            raise Unknown("adapted denotation not confirmed equal to the target order")
        print("verified", file=sys.stderr)


def _powers_of_two(lo, hi):
    if lo < 1 or hi < lo:
        raise UserError("need 1 <= --n-min <= --n-max")
    ns, n = [], 1
    while n <= hi:
        if n >= lo:
            ns.append(n)
        n *= 2
    if not ns:
        raise UserError(f"no power of two in [{lo}, {hi}]")
    return ns


def _csv_list(raw, allowed, what):
    items = [v.strip() for v in raw.split(",") if v.strip()]
    bad = [v for v in items if v not in allowed]
    if bad or not items:
        raise UserError(f"unknown {what}: {', '.join(bad) or raw!r}; choose from {', '.join(allowed)}")
    return items


def cmd_bench(args):
    families = _csv_list(args.family, FAMILIES, "family")
    algos = _csv_list(args.algos, ALGORITHMS, "algorithm")
    ns = _powers_of_two(args.n_min, args.n_max)
    records, fits = run_growth(families, ns, algos, SizeMetric(args.metric), args.seed, args.max_nodes)
    Path(args.out).write_text(records_csv(records), encoding="utf-8", newline="\n")
    if args.slopes_out:
        Path(args.slopes_out).write_text(slopes_csv(fits), encoding="utf-8", newline="\n")
    for f in fits:
        print(f"{f.family}\t{f.algorithm}\tslope={f.slope:.3f}\tr2={f.r2:.3f}\tpoints={f.points}")
    if any(r.value is None for r in records):
        print("some instances exceeded the size guard (NA in CSV)", file=sys.stderr)


def cmd_check(args):
    from .checks import ALL_CHECKS

    ok = True
    for check in ALL_CHECKS:
        result = check()
        print(result.line(), flush=True)
        ok = ok and result.passed
    if not ok:
        raise Unknown("some checks failed")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fuel = _env_int("COMBILOG_FUEL", 100_000)
    seed = _env_int("COMBILOG_SEED", 42)

    p = argparse.ArgumentParser(prog="combilog", description="Lambda terms, combinators and staged code.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_term(sp):
        sp.add_argument("term", nargs="?", help="term text; read from stdin when omitted")
        return sp

    sp = with_term(sub.add_parser("parse", help="parse and pretty-print a term"))
    sp.add_argument("--dialect", choices=("plain", "modal", "staged"), default="plain")
    sp.add_argument("--booleans", action="store_true")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--db", action="store_true", help="input is a de Bruijn term")
    group.add_argument("--type", action="store_true", help="input is a modal type")
    sp.set_defaults(func=cmd_parse)

    sp = with_term(sub.add_parser("tr", help="translate a term to combinators"))
    sp.add_argument("--algo", required=True, choices=("leafk", "subtermk", "bc", "kiselyov", "kiselyov-ref"))
    sp.add_argument("--dialect", choices=("plain", "modal"), default="plain")
    sp.add_argument("--verify", action="store_true", help="check the output against beta normalization")
    sp.add_argument("--fuel", type=int, default=fuel)
    sp.set_defaults(func=cmd_tr)

    sp = with_term(sub.add_parser("eval", help="evaluate a term"))
    sp.add_argument("--calculus", required=True, choices=("lambda", "modal", "staged"))
    sp.add_argument("--fuel", type=int, default=fuel)
    sp.add_argument("--booleans", action="store_true")
    sp.add_argument("--typecheck", action="store_true", help="modal only: report the type first")
    sp.set_defaults(func=cmd_eval)

    sp = with_term(sub.add_parser("denote", help="denotations of open code"))
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--canonical", action="store_true")
    group.add_argument("--all-orders", action="store_true")
    sp.add_argument("--cap", type=int, default=DEFAULT_ORDER_CAP)
    sp.set_defaults(func=cmd_denote)

    sp = with_term(sub.add_parser("permute", help="re-order the binders of a denotation"))
    sp.add_argument("--from", dest="source", required=True, help="comma-separated source order")
    sp.add_argument("--to", dest="target", required=True, help="comma-separated target order")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--fuel", type=int, default=fuel)
    sp.set_defaults(func=cmd_permute)

    sp = sub.add_parser("bench", help="term-size growth measurements")
    sp.add_argument("--family", default="ApChain", help="comma-separated: " + ",".join(FAMILIES))
    sp.add_argument("--n-min", type=int, default=1)
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--slopes-out")
    sp.add_argument("--metric", choices=[m.value for m in SizeMetric], default="NodeCount")
    sp.add_argument("--algos", default=",".join(ALGORITHMS))
    sp.add_argument("--seed", type=int, default=seed)
    sp.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("check", help="run the end-to-end checks")
    sp.set_defaults(func=cmd_check)
    return p


def _run(argv) -> int:
    try:
        parser = build_parser()
    except UserError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USER
    try:
        args.func(args)
    except UserError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER
    except Diverged as e:
        print(f"diverged: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except Unknown as e:
        print(f"unknown: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USER
    return EXIT_OK


# Deep terms recurse deeply; run on a thread whose stack fits the raised limit.
_STACK_BYTES = 512 * 1024 * 1024
_RECURSION_LIMIT = 50_000


def main(argv=None) -> int:
    result = [EXIT_UNKNOWN]
    old_limit = sys.getrecursionlimit()
    old_stack = threading.stack_size()

    def work():
        result[0] = _run(argv)

    try:
        threading.stack_size(_STACK_BYTES)
        sys.setrecursionlimit(max(old_limit, _RECURSION_LIMIT))
        worker = threading.Thread(target=work)
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_stack)
        sys.setrecursionlimit(old_limit)
    return result[0]


if __name__ == "__main__":
    sys.exit(main())
