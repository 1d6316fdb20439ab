"""Staged calculus with unhygienic splicing, and the denotations of open code.

Variables are scoped by level: an occurrence at level ``n`` is bound by the
nearest enclosing binder at level ``n``.  ``box`` raises the level and
``unbox`` lowers it.  Splicing (``unbox (box v) -> v`` at level 1) inserts
``v`` verbatim, so its free variables may be captured by the template.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .kernel import Diverged, Fuel, free_vars, prime, to_debruijn
from .kiselyov import Denotation, translate_kiselyov
from .syntax import (
    App,
    BoolLit,
    Box,
    CApp,
    If,
    Lam,
    LetBox,
    Unbox,
    Var,
    app,
    lams,
    show,
)

DEFAULT_ORDER_CAP = 7


class Stuck(RuntimeError):
    """Evaluation reached a non-value with no applicable rule."""


# ---------------------------------------------------------------------------
# Level-aware scoping


def level_free_vars(t, level: int = 0) -> list[str]:
    """Variables occurring free at ``level`` (first-occurrence order)."""
    seen: dict[str, None] = {}

    def go(t, cur, bound):
        if isinstance(t, Var):
            if cur == level and t.name not in bound and t.name not in seen:
                seen[t.name] = None
        elif isinstance(t, Lam):
            go(t.body, cur, bound | {t.name} if cur == level else bound)
        elif isinstance(t, App):
            go(t.fn, cur, bound)
            go(t.arg, cur, bound)
        elif isinstance(t, Box):
            go(t.body, cur + 1, bound)
        elif isinstance(t, Unbox):
            go(t.body, cur - 1, bound)
        elif isinstance(t, If):
            for c in (t.cond, t.then, t.orelse):
                go(c, cur, bound)

    go(t, 0, frozenset())
    return list(seen)


def subst_level0(t, name: str, replacement):
    """Substitute for level-0 occurrences of ``name``, renaming level-0
    binders that would capture level-0 variables of ``replacement``.
    Binders at other levels are left alone."""
    fv_s = frozenset(level_free_vars(replacement))
    return _subst0(t, name, replacement, fv_s, 0)


def _subst0(t, x, s, fv_s, cur):
    if isinstance(t, Var):
        return s if cur == 0 and t.name == x else t
    if isinstance(t, Lam):
        if cur != 0:
            return Lam(t.name, _subst0(t.body, x, s, fv_s, cur), t.ann)
        y, body = t.name, t.body
        if y == x:
            return t
        if y in fv_s and x in level_free_vars(body):
            y2 = prime(y, fv_s | set(level_free_vars(body)) | {x})
            body = _subst0(body, y, Var(y2), frozenset({y2}), 0)
            y = y2
        return Lam(y, _subst0(body, x, s, fv_s, 0), t.ann)
    if isinstance(t, App):
        return App(_subst0(t.fn, x, s, fv_s, cur), _subst0(t.arg, x, s, fv_s, cur))
    if isinstance(t, Box):
        return Box(_subst0(t.body, x, s, fv_s, cur + 1))
    if isinstance(t, Unbox):
        return Unbox(_subst0(t.body, x, s, fv_s, cur - 1))
    if isinstance(t, If):
        return If(*(_subst0(c, x, s, fv_s, cur) for c in (t.cond, t.then, t.orelse)))
    return t


# ---------------------------------------------------------------------------
# Evaluation


def eval_staged(t, level: int = 0, fuel: int = 100_000):
    """Evaluate call-by-value at level 0; at higher levels rebuild the code,
    firing splices for every ``unbox`` that lands on level 1."""
    meter = Fuel(fuel)
    try:
        return _eval(t, level, meter)
    except RecursionError:
        raise Diverged("recursion depth exceeded") from None


def _eval(t, level, meter):
    if level == 0:
        return _eval0(t, meter)
    if isinstance(t, (Var, BoolLit)):
        return t
    if isinstance(t, Lam):
        return Lam(t.name, _eval(t.body, level, meter), t.ann)
    if isinstance(t, App):
        return App(_eval(t.fn, level, meter), _eval(t.arg, level, meter))
    if isinstance(t, If):
        return If(*(_eval(c, level, meter) for c in (t.cond, t.then, t.orelse)))
    if isinstance(t, Box):
        return Box(_eval(t.body, level + 1, meter))
    if isinstance(t, Unbox):
        if level == 1:
            code = _eval0(t.body, meter)
            if not isinstance(code, Box):
                raise Stuck(f"unbox of non-code value {show(code)}")
            meter.tick()
            return code.body
        return Unbox(_eval(t.body, level - 1, meter))
    raise Stuck(f"{type(t).__name__} is not part of the staged calculus")


def _eval0(t, meter):
    while True:
        if isinstance(t, (Lam, BoolLit)):
            return t
        if isinstance(t, Box):
            return Box(_eval(t.body, 1, meter))
        if isinstance(t, Var):
            raise Stuck(f"free variable {t.name!r} at level 0")
        if isinstance(t, App):
            fn = _eval0(t.fn, meter)
            if not isinstance(fn, Lam):
                raise Stuck(f"applying non-function {show(fn)}")
            arg = _eval0(t.arg, meter)
            meter.tick()
            t = subst_level0(fn.body, fn.name, arg)
            continue
        if isinstance(t, If):
            cond = _eval0(t.cond, meter)
            if not isinstance(cond, BoolLit):
                raise Stuck(f"if on non-boolean {show(cond)}")
            meter.tick()
            t = t.then if cond.value else t.orelse
            continue
        if isinstance(t, Unbox):
            raise Stuck("unbox outside of a box")
        raise Stuck(f"{type(t).__name__} is not part of the staged calculus")


# ---------------------------------------------------------------------------
# Static free-variable analysis of code values


@dataclass(frozen=True)
class Hole:
    """An ``unbox`` inside a code template.

    ``candidates`` lists the possible free-variable lists of the spliced code
    (one per statically reachable alternative), or is ``None`` when nothing
    is known.  ``scope`` are the template binders the splice sits under.
    """

    expr: str
    scope: tuple
    candidates: Optional[tuple]

    @property
    def known(self) -> bool:
        return self.candidates is not None and len(set(self.candidates)) == 1


@dataclass(frozen=True)
class CodeFV:
    free: tuple        # free in every run
    maybe_free: tuple  # free for some alternative of an unknown hole
    holes: tuple

    @property
    def determined(self) -> bool:
        return all(h.known for h in self.holes)


def code_fv(t) -> dict:
    """Free variables of every level-0 ``box`` in ``t``, keyed by the box's
    path (a tuple of child positions from the root)."""
    out: dict = {}
    _scan(t, (), {}, out)
    return out


def _children_with_pos(t):
    if isinstance(t, App):
        return [(0, t.fn), (1, t.arg)]
    if isinstance(t, (Lam, Unbox)):
        return [(0, t.body)]
    if isinstance(t, If):
        return [(0, t.cond), (1, t.then), (2, t.orelse)]
    if isinstance(t, LetBox):
        return [(0, t.bound), (1, t.body)]
    return []


def _static(t, env):
    """Possible free-variable lists of the code ``t`` evaluates to, or None."""
    if isinstance(t, Box):
        return (tuple(_box_fv(t, env).free),) if _box_fv(t, env).determined else None
    if isinstance(t, Var):
        return env.get(t.name)
    if isinstance(t, If):
        a, b = _static(t.then, env), _static(t.orelse, env)
        if a is None or b is None:
            return None
        return tuple(dict.fromkeys(a + b))
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return _static(t.fn.body, {**env, t.fn.name: _static(t.arg, env)})
    return None


def _scan(t, path, env, out):
    if isinstance(t, Box):
        out[path] = _box_fv(t, env)
        return
    if isinstance(t, App) and isinstance(t.fn, Lam):
        _scan(t.arg, path + (1,), env, out)
        inner = {**env, t.fn.name: _static(t.arg, env)}
        _scan(t.fn.body, path + (0, 0), inner, out)
        return
    if isinstance(t, Lam):
        _scan(t.body, path + (0,), {**env, t.name: None}, out)
        return
    for pos, c in _children_with_pos(t):
        _scan(c, path + (pos,), env, out)


def _box_fv(box, env) -> CodeFV:
    free: dict[str, None] = {}
    maybe: dict[str, None] = {}
    holes = []

    def go(t, cur, scope):
        if isinstance(t, Var):
            if cur == 1 and t.name not in scope:
                free.setdefault(t.name)
        elif isinstance(t, Lam):
            go(t.body, cur, scope + (t.name,) if cur == 1 else scope)
        elif isinstance(t, App):
            go(t.fn, cur, scope)
            go(t.arg, cur, scope)
        elif isinstance(t, If):
            for c in (t.cond, t.then, t.orelse):
                go(c, cur, scope)
        elif isinstance(t, Box):
            go(t.body, cur + 1, scope)
        elif isinstance(t, Unbox):
            if cur > 1:
                go(t.body, cur - 1, scope)
                return
            cands = _static(t.body, env)
            hole = Hole(show(t), scope, cands)
            holes.append(hole)
            if cands is None:
                return
            alive = [tuple(v for v in c if v not in scope) for c in cands]
            if hole.known:
                for v in alive[0]:
                    free.setdefault(v)
            else:
                for c in alive:
                    for v in c:
                        maybe.setdefault(v)

    go(box.body, 1, ())
    return CodeFV(tuple(free), tuple(v for v in maybe if v not in free), tuple(holes))


# ---------------------------------------------------------------------------
# Denotations of open code


def order_key(name: str) -> bytes:
    return name.encode()


def show_order(order: Sequence[str]) -> str:
    return "[" + ",".join(order) + "]"


@dataclass(frozen=True)
class DenotationSet:
    subject: object
    entries: dict

    def dump(self) -> str:
        return "\n".join(
            f"{show_order(order)}\t{d.arity}\t{show(d.term)}" for order, d in self.entries.items()
        )


def close_under(t, order: Sequence[str], optimized: bool = True) -> Denotation:
    """Denotation of ``t`` whose binders follow ``order`` (position 0 outermost)."""
    closed = translate_kiselyov(to_debruijn(lams(order, t), []), optimized)
    return Denotation(len(order), closed.term)


def denote_all_orders(t, cap: int = DEFAULT_ORDER_CAP, optimized: bool = True) -> DenotationSet:
    fv = free_vars(t)
    if len(fv) > cap:
        raise ValueError(
            f"{len(fv)} free variables means {math.factorial(len(fv))} orders; cap is {cap}"
        )
    entries = {
        order: close_under(t, order, optimized) for order in itertools.permutations(fv)
    }
    return DenotationSet(t, entries)


def canonical_order(t) -> tuple:
    return tuple(sorted(free_vars(t), key=order_key))


def denote_canonical(t, optimized: bool = True):
    order = canonical_order(t)
    return order, close_under(t, order, optimized)


def build_permuter(n: int, perm: Sequence[int], optimized: bool = True):
    """Adapter taking a function of ``n`` arguments in source order and
    returning one that takes them in target order.

    ``perm[i]`` is the source position of the argument at target position
    ``i``; the adapter is ``\\f. \\w_perm[0] ... \\w_perm[n-1]. f w_0 ... w_{n-1}``.
    """
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of {n} positions")
    names = [f"w{j}" for j in range(n)]
    body = app(Var("f"), *(Var(v) for v in names))
    term = Lam("f", lams([names[p] for p in perm], body))
    return translate_kiselyov(to_debruijn(term, []), optimized).term


def induced_permutation(source: Sequence[str], target: Sequence[str]) -> list[int]:
    if sorted(source) != sorted(target) or len(set(source)) != len(source):
        raise ValueError(f"{show_order(target)} is not a permutation of {show_order(source)}")
    return [list(source).index(v) for v in target]


def splice_adapt(canonical: Denotation, source: Sequence[str], target: Sequence[str]) -> Denotation:
    """Re-order the binders of an open-code denotation from ``source`` to ``target``."""
    perm = induced_permutation(source, target)
    permuter = build_permuter(len(perm), perm)
    return Denotation(canonical.arity, CApp(permuter, canonical.term))
