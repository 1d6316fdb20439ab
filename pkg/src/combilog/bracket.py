"""Classical bracket abstraction, applied innermost lambda first."""

from __future__ import annotations

import enum

from .kernel import free_vars
from .syntax import (
    App,
    Atom,
    B,
    C,
    CApp,
    FreeAtom,
    I,
    K,
    Lam,
    S,
    Var,
    size,
)


class BracketAlgo(enum.Enum):
    LEAF_K = "leafk"          # the three textbook rules, K only at leaves
    SUBTERM_K = "subtermk"    # K on any subterm not mentioning the variable
    DIRECTOR_BC = "bc"        # S/B/C chosen by where the variable occurs;
                              # whole binder runs are abstracted at once


class GuardExceeded(RuntimeError):
    """Output would exceed the configured node budget."""


def _occurs(x, t) -> bool:
    stack = [t]
    while stack:
        n = stack.pop()
        if isinstance(n, FreeAtom):
            if n.name == x:
                return True
        elif isinstance(n, CApp):
            stack.append(n.fn)
            stack.append(n.arg)
    return False


def _to_comb(e):
    if isinstance(e, Var):
        return FreeAtom(e.name)
    if isinstance(e, App):
        return CApp(_to_comb(e.fn), _to_comb(e.arg))
    if isinstance(e, Lam):
        raise ValueError("abstract() expects a lambda-free body")
    if isinstance(e, (CApp, FreeAtom, Atom)):
        return e
    raise ValueError(f"bracket abstraction covers pure lambda terms only, got {type(e).__name__}")


def abstract(x: str, e, algo: BracketAlgo = BracketAlgo.LEAF_K):
    """Eliminate variable ``x`` from the lambda-free body ``e``.

    ``e`` may be a named term without lambdas or a combinator term whose free
    variables are FreeAtoms.
    """
    return _abstract(x, _to_comb(e), BracketAlgo(algo))


def _abstract(x, e, algo):
    if isinstance(e, FreeAtom) and e.name == x:
        return I
    if not isinstance(e, CApp):
        return CApp(K, e)
    if algo is BracketAlgo.LEAF_K:
        return CApp(CApp(S, _abstract(x, e.fn, algo)), _abstract(x, e.arg, algo))
    in_fn, in_arg = _occurs(x, e.fn), _occurs(x, e.arg)
    if not (in_fn or in_arg):
        return CApp(K, e)
    if algo is BracketAlgo.SUBTERM_K or (in_fn and in_arg):
        return CApp(CApp(S, _abstract(x, e.fn, algo)), _abstract(x, e.arg, algo))
    if in_fn:
        return CApp(CApp(C, _abstract(x, e.fn, algo)), e.arg)
    return CApp(CApp(B, e.fn), _abstract(x, e.arg, algo))


_LAST_DIRECTOR = {"both": S, "left": C, "right": B, "none": CApp(B, K)}


def _director(tags):
    """Closed ``D`` with ``D f g v_1 ... v_k`` handing each ``v_i`` to ``f``,
    ``g``, both or neither as ``tags[i]`` says (``f`` and ``g`` take only the
    variables routed to them, in order)."""
    d = _LAST_DIRECTOR[tags[-1]]
    for tag in reversed(tags[:-1]):
        if tag == "both":
            d = CApp(CApp(B, S), CApp(B, d))
        elif tag == "left":
            d = CApp(CApp(B, C), CApp(B, d))
        elif tag == "right":
            d = CApp(CApp(B, B), d)
        else:
            d = CApp(CApp(B, CApp(B, K)), d)
    return d


def abstract_many(xs, e):
    """Eliminate the run of binders ``xs`` (outermost first) from a
    lambda-free body in one pass, with a director string at each application.

    For a single variable this is exactly :func:`abstract` under DIRECTOR_BC.
    """
    xs = list(xs)
    # a binder shadowed later in the same run is never referenced
    for i, x in enumerate(xs):
        if x in xs[i + 1 :]:
            xs[i] = None
    return _abstract_many(xs, _to_comb(e))


def _abstract_many(xs, e):
    live = [x for x in xs if x is not None and _occurs(x, e)]
    if not live:
        for _ in xs:
            e = CApp(K, e)
        return e
    if isinstance(e, FreeAtom):
        i = xs.index(e.name)
        out = I
        for _ in xs[i + 1 :]:
            out = CApp(CApp(B, K), out)
        for _ in xs[:i]:
            out = CApp(K, out)
        return out
    tags, left, right = [], [], []
    for x in xs:
        in_fn = x is not None and _occurs(x, e.fn)
        in_arg = x is not None and _occurs(x, e.arg)
        if in_fn:
            left.append(x)
        if in_arg:
            right.append(x)
        tags.append("both" if in_fn and in_arg else "left" if in_fn else "right" if in_arg else "none")
    f = _abstract_many(left, e.fn) if left else e.fn
    g = _abstract_many(right, e.arg) if right else e.arg
    return CApp(CApp(_director(tags), f), g)


def translate_classic(t, algo: BracketAlgo = BracketAlgo.LEAF_K, max_nodes: int | None = None):
    """Translate a closed plain lambda term by abstracting innermost lambdas
    first.  ``max_nodes`` bounds intermediate sizes (raises GuardExceeded)."""
    algo = BracketAlgo(algo)
    fv = free_vars(t)
    if fv:
        raise ValueError(f"open term: free variables {fv}")

    def go(t):
        if isinstance(t, Var):
            return FreeAtom(t.name)
        if isinstance(t, App):
            return CApp(go(t.fn), go(t.arg))
        if isinstance(t, Lam) and algo is BracketAlgo.DIRECTOR_BC:
            names = []
            while isinstance(t, Lam):
                names.append(t.name)
                t = t.body
            return abstract_many(names, go(t))
        if isinstance(t, Lam):
            body = go(t.body)
            # one abstraction at most triples the size of the body
            if max_nodes is not None and 3 * size(body) > max_nodes:
                raise GuardExceeded(f"abstraction output may exceed {max_nodes} nodes")
            return _abstract(t.name, body, algo)
        raise ValueError(
            f"bracket abstraction covers pure lambda terms only, got {type(t).__name__}"
        )

    return go(t)
