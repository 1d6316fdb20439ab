"""Compositional translation of de Bruijn terms into combinators.

An open term is given meaning as a :class:`Denotation`: the closed combinator
term for its closure, plus how many variables that closure binds.  The term
takes the values of the free indices outermost first, i.e. ``v_{n-1}`` first
and ``v_0`` last.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import B, C, CApp, DApp, DLam, I, Idx, K, S, show


@dataclass(frozen=True)
class Denotation:
    arity: int
    term: object

    def __str__(self):
        return f"({self.arity}, {show(self.term)})"


def denote_var(i: int) -> Denotation:
    term = I
    for _ in range(i):
        term = CApp(CApp(B, K), term)
    return Denotation(i + 1, term)


def denote_lam(body: Denotation) -> Denotation:
    if body.arity == 0:
        return Denotation(0, CApp(K, body.term))
    return Denotation(body.arity - 1, body.term)


@lru_cache(maxsize=None)
def zipper(k: int):
    """``Z_k f g v_{k-1} ... v_0 = f v.. (g v..)``; ``Z_1 = S``."""
    if k < 1:
        raise ValueError("zipper arity must be positive")
    if k == 1:
        return S
    return CApp(CApp(B, S), CApp(B, zipper(k - 1)))


def _pad(term, k):
    for _ in range(k):
        term = CApp(K, term)
    return term


def combine_reference(d1: Denotation, d2: Denotation) -> Denotation:
    n = max(d1.arity, d2.arity)
    if n == 0:
        return Denotation(0, CApp(d1.term, d2.term))
    left = _pad(d1.term, n - d1.arity)
    right = _pad(d2.term, n - d2.arity)
    return Denotation(n, CApp(CApp(zipper(n), left), right))


def combine_optimized(d1: Denotation, d2: Denotation) -> Denotation:
    n, m = d1.arity, d2.arity
    arity = max(n, m)
    f, g = d1.term, d2.term
    if n == 0 and m == 0:
        return Denotation(0, CApp(f, g))
    if n == 0 or m == 0:
        if m == 0:
            # C C g f = C f g; one binder is absorbed by the flip
            f, g, m = CApp(CApp(C, C), g), f, n - 1
        for _ in range(m):
            f = CApp(B, f)
        return Denotation(arity, CApp(f, g))
    f, g = _pad(f, arity - n), _pad(g, arity - m)
    if arity == 1:
        return Denotation(1, CApp(CApp(S, f), g))
    return Denotation(arity, CApp(CApp(S, CApp(CApp(B, zipper(arity - 1)), f)), g))


def translate_kiselyov(t, optimized: bool = True) -> Denotation:
    combine = combine_optimized if optimized else combine_reference

    def go(t):
        if isinstance(t, Idx):
            return denote_var(t.index)
        if isinstance(t, DLam):
            return denote_lam(go(t.body))
        if isinstance(t, DApp):
            return combine(go(t.fn), go(t.arg))
        raise TypeError(f"not a de Bruijn term: {t!r}")

    return go(t)
