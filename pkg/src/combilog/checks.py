"""End-to-end checks of the headline behaviours, shared by ``combilog check``
and the acceptance tests.  Each check returns a :class:`CheckResult`."""

from __future__ import annotations

import contextlib
import io
import itertools
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .bench import records_csv, run_growth, slopes_csv
from .bracket import BracketAlgo, GuardExceeded, translate_classic
from .corpus import closed_corpus, random_db
from .kernel import alpha_eq, beta_normalize, Diverged, to_debruijn
from .kiselyov import combine_optimized, combine_reference, translate_kiselyov
from .machine import agrees_with_lambda, ext_eq
from .modal import (
    DualContext,
    ModalTypeError,
    erase_modal,
    eval_modal,
    random_modal_term,
    typecheck_modal,
)
from .staged import build_permuter, denote_all_orders, denote_canonical, eval_staged, splice_adapt
from .syntax import (
    Arrow,
    Base,
    BoxT,
    DApp,
    Lam,
    SizeMetric,
    Var,
    app,
    parse,
    show,
    size,
    subterms,
)

CAPTURE_PROGRAM = r"let a = box y in box (\x.\y. (unbox a) x)"
CAPTURE_RENAMED = r"let a = box w in box (\x.\y. (unbox a) x)"


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name: str, limit: float):
    def wrap(fn: Callable[..., tuple]):
        def run(*args, **kwargs) -> CheckResult:
            start = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            elapsed = time.perf_counter() - start
            if elapsed > limit:
                passed = False
                detail += f"; exceeded {limit}s"
            return CheckResult(name, passed, detail, elapsed)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _run_cli(argv) -> tuple[int, str]:
    from .cli import main

    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = main(argv)
    return code, out.getvalue()


@_timed("capture", 1.0)
def check_capture():
    code, out = _run_cli(["eval", "--calculus", "staged", CAPTURE_PROGRAM])
    expected = r"box (\x.\y. y x)"
    return code == 0 and out.rstrip("\n") == expected, f"printed {out.strip()!r}"


def _vars_term(n):
    if n == 0:
        return Lam("x", Var("x"))
    return app(*(Var(f"v{i}") for i in range(n)))


@_timed("denotation-set", 10.0)
def check_denotation_sets(max_n: int = 6):
    counts = []
    for n in range(max_n + 1):
        code, out = _run_cli(["denote", "--all-orders", show(_vars_term(n))])
        counts.append(len(out.splitlines()) if code == 0 else -1)
    expected = [math.factorial(n) for n in range(max_n + 1)]
    if counts != expected:
        return False, f"entry counts {counts}, expected {expected}"
    ds = denote_all_orders(parse("x y z"))
    displayed = [
        r"\x.\y.\z. x y z", r"\x.\z.\y. x y z", r"\y.\x.\z. x y z",
        r"\y.\z.\x. x y z", r"\z.\x.\y. x y z", r"\z.\y.\x. x y z",
    ]
    for text in displayed:
        closure = parse(text)
        order = []
        t = closure
        while isinstance(t, Lam):
            order.append(t.name)
            t = t.body
        want = translate_kiselyov(to_debruijn(closure, [])).term
        got = ds.entries.get(tuple(order))
        if got is None or got.term != want or got.arity != 3:
            return False, f"order {order} does not match closure {text}"
    terms = [d.term for d in ds.entries.values()]
    for a, b in itertools.combinations(terms, 2):
        if ext_eq(a, b, 3) is not False:
            return False, "two binding orders gave equivalent denotations"
    return True, f"counts {counts}; x y z matches the six displayed closures"


@_timed("permuter", 30.0)
def check_permuter(fuel: int = 100_000):
    order, canon = denote_canonical(parse("x y z"))
    permuter = build_permuter(3, [2, 1, 0])
    target = denote_all_orders(parse("x y z")).entries[("z", "y", "x")]
    from .syntax import CApp

    if ext_eq(CApp(permuter, canon.term), target.term, 3, fuel) is not True:
        return False, "reversal permuter failed on x y z"
    subject = parse("a b c d")
    source, canon4 = denote_canonical(subject)
    entries = denote_all_orders(subject).entries
    bad = [
        target
        for target in itertools.permutations(source)
        if ext_eq(splice_adapt(canon4, source, target).term, entries[target].term, 4, fuel) is not True
    ]
    return not bad, f"reversal at n=3 ok; {24 - len(bad)}/24 permutations at n=4"


PIPELINES = ("leafk", "subtermk", "bc", "kiselyov-ref", "kiselyov")


def _pipeline(term, name, max_nodes):
    if name in ("leafk", "subtermk", "bc"):
        return translate_classic(term, BracketAlgo(name), max_nodes=max_nodes)
    return translate_kiselyov(to_debruijn(term, []), optimized=name == "kiselyov").term


@_timed("oracle-equivalence", 120.0)
def check_oracle(count: int = 200, seed: int = 42, fuel: int = 100_000, max_nodes: int = 250_000):
    corpus = closed_corpus(count, seed)
    if max(size(t) for t in corpus) > 40:
        return False, "corpus term above 40 nodes"
    unknown_terms, failures = set(), []
    for i, term in enumerate(corpus):
        for name in PIPELINES:
            try:
                comb = _pipeline(term, name, max_nodes)
            except GuardExceeded:
                unknown_terms.add(i)
                continue
            verdict = agrees_with_lambda(comb, term, 3, fuel)
            if verdict is None:
                unknown_terms.add(i)
            elif not verdict:
                failures.append((name, show(term)))
    frac = len(unknown_terms) / count
    ok = not failures and frac < 0.10
    detail = f"{count} terms, {len(failures)} mismatches, {len(unknown_terms)} unknown ({frac:.1%})"
    if failures:
        detail += f"; first: {failures[0]}"
    return ok, detail


@_timed("modal-pipeline", 60.0)
def check_modal(count: int = 100):
    A = Base("A")
    eval_fn = parse(r"\x:[]A. letbox u = x in u", "modal")
    if typecheck_modal(DualContext(), eval_fn) != Arrow(BoxT(A), A):
        return False, "eval function has the wrong type"
    try:
        typecheck_modal(DualContext(), parse(r"\x:A. box x", "modal"))
        return False, "box over an ordinary variable was accepted"
    except ModalTypeError:
        pass
    composed = eval_modal(parse("letbox u = box f in letbox v = box a in box (u v)", "modal"))
    if show(composed) != "box (f a)":
        return False, f"code composition gave {show(composed)}"
    worst = float("-inf")
    mismatches = 0
    for i in range(count):
        t = random_modal_term(random.Random(f"modal:{i}"))
        typecheck_modal(DualContext(), t)
        erased = erase_modal(t)
        ratio = size(erased) / size(t)
        worst = max(worst, ratio - (3.0 + 10 / size(t)))
        try:
            if not alpha_eq(beta_normalize(erased), beta_normalize(erase_modal(eval_modal(t)))):
                mismatches += 1
        except Diverged:
            pass
    ok = worst <= 0 and mismatches == 0
    return ok, f"types ok, composition ok; {count} terms, worst ratio headroom {-worst:.2f}, {mismatches} simulation mismatches"


@_timed("growth-separation", 60.0)
def check_growth(out_dir: Optional[Path] = None, ns=(8, 16, 32, 64)):
    records, fits = run_growth(["ApChain"], ns, ["subtermk", "bc"], SizeMetric.NODE_COUNT)
    db_records, db_fits = run_growth(["ApChain"], ns, ["kiselyov"], SizeMetric.DB_WEIGHTED)
    by = {(f.algorithm, f.metric): f for f in fits + db_fits}
    sub, bc = by[("subtermk", "NodeCount")], by[("bc", "NodeCount")]
    kis = by[("kiselyov", "DbWeighted")]
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "growth.csv").write_text(records_csv(records + db_records), encoding="utf-8")
        (out_dir / "growth_slopes.csv").write_text(slopes_csv(fits + db_fits), encoding="utf-8")
    ok = (
        sub.slope - bc.slope >= 0.5
        and kis.slope <= 1.3
        and min(sub.r2, bc.r2, kis.r2) >= 0.95
    )
    detail = (
        f"subtermk {sub.slope:.3f} (r2 {sub.r2:.3f}), bc {bc.slope:.3f} (r2 {bc.r2:.3f}), "
        f"kiselyov/DbWeighted {kis.slope:.3f} (r2 {kis.r2:.3f})"
    )
    return ok, detail


@_timed("compositionality", 30.0)
def check_compositionality(count: int = 500, seed: int = 42):
    rng = random.Random(f"compose:{seed}")
    for _ in range(count):
        t1 = random_db(rng.randint(0, 8), rng)
        t2 = random_db(rng.randint(0, 8), rng)
        for optimized, combine in ((True, combine_optimized), (False, combine_reference)):
            whole = translate_kiselyov(DApp(t1, t2), optimized)
            parts = combine(translate_kiselyov(t1, optimized), translate_kiselyov(t2, optimized))
            if whole != parts:
                return False, f"not compositional on {show(t1)} and {show(t2)}"
    inner = parse(r"\y.\z. y")
    outer = parse(r"\x.\y.\z. y")
    t1 = translate_classic(inner, BracketAlgo.LEAF_K)
    t2 = translate_classic(outer, BracketAlgo.LEAF_K)
    if any(node == t1 for node in subterms(t2)):
        return False, "classical witness unexpectedly compositional"
    return True, f"{count} pairs node-for-node equal; LeafK witness: {show(t1)} not inside {show(t2)}"


@_timed("non-alpha-stability", 1.0)
def check_non_alpha(count: int = 50, seed: int = 42):
    base = eval_staged(parse(CAPTURE_PROGRAM, "staged"))
    renamed = eval_staged(parse(CAPTURE_RENAMED, "staged"))
    if show(renamed) != r"box (\x.\y. w x)" or show(base) != r"box (\x.\y. y x)":
        return False, f"got {show(base)} and {show(renamed)}"
    if alpha_eq(base, renamed):
        return False, "renaming did not change the staged result"
    for term in closed_corpus(count, seed):
        variant = _rename_bound(term)
        try:
            if not alpha_eq(beta_normalize(term, 10_000), beta_normalize(variant, 10_000)):
                return False, f"plain term not alpha-stable: {show(term)}"
        except Diverged:
            continue
    return True, "staged result changes under renaming; plain corpus stable"


def _rename_bound(t):
    from .kernel import subst_avoiding

    if isinstance(t, Lam):
        fresh = t.name + "_r"
        return Lam(fresh, _rename_bound(subst_avoiding(t.body, t.name, Var(fresh))))
    if hasattr(t, "fn"):
        return type(t)(_rename_bound(t.fn), _rename_bound(t.arg))
    return t


ALL_CHECKS = (
    check_capture,
    check_denotation_sets,
    check_permuter,
    check_oracle,
    check_modal,
    check_growth,
    check_compositionality,
    check_non_alpha,
)


def run_all() -> list[CheckResult]:
    return [check() for check in ALL_CHECKS]
