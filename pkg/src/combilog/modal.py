"""The modal calculus with ``box`` and ``letbox``.

Typing uses two contexts: ``delta`` for code variables bound by ``letbox``
and ``gamma`` for ordinary lambda-bound variables.  A ``box`` body only sees
``delta``, which is what keeps code closed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .kernel import all_names, normal_form, prime, to_debruijn
from .kiselyov import Denotation, translate_kiselyov
from .syntax import (
    App,
    Arrow,
    Base,
    BoolLit,
    Box,
    BoxT,
    If,
    Lam,
    LetBox,
    ModalType,
    Unbox,
    Var,
    show_type,
    size,
)

BOOL = Base("bool")


class ModalTypeError(TypeError):
    pass


@dataclass(frozen=True)
class DualContext:
    delta: Mapping[str, ModalType] = field(default_factory=dict)
    gamma: Mapping[str, ModalType] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.delta) & set(self.gamma)
        if clash:
            raise ValueError(f"names in both contexts: {sorted(clash)}")

    def bind_ordinary(self, name, ty):
        delta = {k: v for k, v in self.delta.items() if k != name}
        return DualContext(delta, {**self.gamma, name: ty})

    def bind_code(self, name, ty):
        gamma = {k: v for k, v in self.gamma.items() if k != name}
        return DualContext({**self.delta, name: ty}, gamma)


def typecheck_modal(ctx: DualContext, t, annotations: Optional[Mapping[str, ModalType]] = None):
    """Synthesize the type of ``t``.

    Lambda binders carry their type inline (``\\x:T. e``) or through
    ``annotations`` keyed by binder name.  A lambda applied directly to an
    argument (the ``let`` sugar) may omit it; the argument's type is used.
    """
    annotations = annotations or {}
    return _synth(ctx, t, annotations, hidden=frozenset())


def _binder_type(lam, annotations):
    ty = lam.ann if lam.ann is not None else annotations.get(lam.name)
    if ty is None:
        raise ModalTypeError(f"binder {lam.name!r} needs a type annotation")
    return ty


def _synth(ctx, t, ann, hidden):
    if isinstance(t, Var):
        if t.name in ctx.gamma:
            return ctx.gamma[t.name]
        if t.name in ctx.delta:
            return ctx.delta[t.name]
        if t.name in hidden:
            raise ModalTypeError(f"ordinary variable {t.name!r} used inside box")
        raise ModalTypeError(f"unbound variable {t.name!r}")
    if isinstance(t, Lam):
        dom = _binder_type(t, ann)
        cod = _synth(ctx.bind_ordinary(t.name, dom), t.body, ann, hidden - {t.name})
        return Arrow(dom, cod)
    if isinstance(t, App):
        if isinstance(t.fn, Lam) and t.fn.ann is None and t.fn.name not in ann:
            arg_ty = _synth(ctx, t.arg, ann, hidden)
            return _synth(ctx.bind_ordinary(t.fn.name, arg_ty), t.fn.body, ann, hidden - {t.fn.name})
        fn_ty = _synth(ctx, t.fn, ann, hidden)
        if not isinstance(fn_ty, Arrow):
            raise ModalTypeError(f"applying a non-function of type {show_type(fn_ty)}")
        arg_ty = _synth(ctx, t.arg, ann, hidden)
        if arg_ty != fn_ty.dom:
            raise ModalTypeError(
                f"argument type {show_type(arg_ty)} does not match {show_type(fn_ty.dom)}"
            )
        return fn_ty.cod
    if isinstance(t, Box):
        inner = DualContext(ctx.delta, {})
        return BoxT(_synth(inner, t.body, ann, hidden | set(ctx.gamma)))
    if isinstance(t, LetBox):
        bound_ty = _synth(ctx, t.bound, ann, hidden)
        if not isinstance(bound_ty, BoxT):
            raise ModalTypeError(f"letbox expects code, got {show_type(bound_ty)}")
        return _synth(ctx.bind_code(t.code_var, bound_ty.inner), t.body, ann, hidden - {t.code_var})
    if isinstance(t, BoolLit):
        return BOOL
    if isinstance(t, If):
        if _synth(ctx, t.cond, ann, hidden) != BOOL:
            raise ModalTypeError("if condition must be bool")
        a = _synth(ctx, t.then, ann, hidden)
        b = _synth(ctx, t.orelse, ann, hidden)
        if a != b:
            raise ModalTypeError(f"branches disagree: {show_type(a)} vs {show_type(b)}")
        return a
    if isinstance(t, Unbox):
        raise ModalTypeError("unbox is not part of the modal calculus")
    raise TypeError(f"not a named term: {t!r}")


def eval_modal(t, fuel: int = 100_000):
    """Normal-order reduction with beta and ``letbox u = box e1 in e2 -> e2[u := e1]``."""
    return normal_form(t, fuel, letbox=True)


# ---------------------------------------------------------------------------
# Erasure into the plain lambda calculus

# stands in for the unit value; translates to the combinator I
UNIT_VALUE = Lam("i", Var("i"))


def erase_modal(t):
    """Box becomes a thunk ``\\z. e`` and ``letbox u = e1 in e2`` becomes
    ``(\\z. e2[u := z ()]) e1``, with ``()`` rendered as the identity."""
    taken = set(all_names(t)) | {"i"}

    def fresh():
        name = prime("z", taken)
        taken.add(name)
        return name

    def go(t, code):
        if isinstance(t, Var):
            if t.name in code:
                return App(Var(code[t.name]), UNIT_VALUE)
            return t
        if isinstance(t, Lam):
            inner = {k: v for k, v in code.items() if k != t.name}
            return Lam(t.name, go(t.body, inner))
        if isinstance(t, App):
            return App(go(t.fn, code), go(t.arg, code))
        if isinstance(t, Box):
            return Lam(fresh(), go(t.body, code))
        if isinstance(t, LetBox):
            z = fresh()
            bound = go(t.bound, code)
            return App(Lam(z, go(t.body, {**code, t.code_var: z})), bound)
        if isinstance(t, BoolLit):
            return t
        if isinstance(t, If):
            return If(go(t.cond, code), go(t.then, code), go(t.orelse, code))
        raise ModalTypeError(f"cannot erase {type(t).__name__}")

    return go(t, {})


def pipeline_box(t, optimized: bool = True) -> Denotation:
    """Modal term to combinators: erase, convert to de Bruijn, translate."""
    d = translate_kiselyov(to_debruijn(erase_modal(t), []), optimized)
    if d.arity != 0:
        raise ValueError("pipeline_box expects a closed term")
    return d


# ---------------------------------------------------------------------------
# Random well-typed terms

A, B_ = Base("A"), Base("B")
_SMALL_TYPES = [A, B_, Arrow(A, A), Arrow(A, B_), BoxT(A), BoxT(Arrow(A, B_))]
_TARGETS = [
    Arrow(A, A),
    Arrow(BoxT(A), A),
    Arrow(BoxT(A), BoxT(A)),
    Arrow(BoxT(Arrow(A, B_)), Arrow(BoxT(A), BoxT(B_))),
    Arrow(A, Arrow(BoxT(B_), B_)),
    BoxT(Arrow(A, A)),
    Arrow(BoxT(A), BoxT(BoxT(A))),
    Arrow(Arrow(A, B_), Arrow(A, B_)),
]


class _Retry(Exception):
    pass


def random_modal_term(
    rng: random.Random,
    budget: int = 8,
    target: Optional[ModalType] = None,
    min_size: int = 6,
    max_size: int = 80,
):
    """A closed, annotated, well-typed modal term built by type-directed search."""
    for _ in range(1000):
        ty = target if target is not None else rng.choice(_TARGETS)
        try:
            t = _gen(rng, ty, {}, {}, budget, [0])
        except _Retry:
            continue
        if min_size <= size(t) <= max_size:
            return t
    raise RuntimeError("could not generate a well-typed term")


def _gen(rng, ty, delta, gamma, budget, counter):
    def name(prefix):
        counter[0] += 1
        return f"{prefix}{counter[0]}"

    scope = list(gamma.items()) + list(delta.items())
    choices = [n for n, t in scope if t == ty]
    code = [(n, t) for n, t in scope if isinstance(t, BoxT)]
    funcs = [(n, t) for n, t in scope if isinstance(t, Arrow) and t.cod == ty]
    options = []
    if choices:
        options += ["var"] * (1 if budget > 0 else 4)
    if isinstance(ty, (Arrow, BoxT)):
        options += ["intro"] * 2
    # eliminations may run past the budget a little, never unboundedly
    if code and budget > -4:
        options += ["open"] * 2
    if funcs and budget > -4:
        options += ["call"] * 2
    if budget > 0:
        options += ["beta"] * 2 + ["letbox"] * 2
    if not options:
        raise _Retry
    pick = rng.choice(options)
    if pick == "var":
        return Var(rng.choice(choices))
    if pick == "intro":
        if isinstance(ty, Arrow):
            x = name("x")
            return Lam(x, _gen(rng, ty.cod, delta, {**gamma, x: ty.dom}, budget - 1, counter), ty.dom)
        return Box(_gen(rng, ty.inner, delta, {}, budget - 1, counter))
    if pick == "open":
        v, vty = rng.choice(code)
        u = name("u")
        inner_gamma = {k: t for k, t in gamma.items() if k != u}
        return LetBox(u, Var(v), _gen(rng, ty, {**delta, u: vty.inner}, inner_gamma, budget - 1, counter))
    if pick == "call":
        f, fty = rng.choice(funcs)
        return App(Var(f), _gen(rng, fty.dom, delta, gamma, budget - 1, counter))
    aux = rng.choice(_SMALL_TYPES + [t for _, t in scope])
    if pick == "beta":
        x = name("x")
        body = _gen(rng, ty, delta, {**gamma, x: aux}, budget - 1, counter)
        arg = _gen(rng, aux, delta, gamma, budget // 2, counter)
        return App(Lam(x, body, aux), arg)
    u = name("u")
    bound = _gen(rng, BoxT(aux), delta, gamma, budget // 2, counter)
    body = _gen(rng, ty, {**delta, u: aux}, gamma, budget - 1, counter)
    return LetBox(u, bound, body)
