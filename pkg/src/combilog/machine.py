"""Weak reduction of S/K/I/B/C terms and the extensional-equivalence oracle."""

from __future__ import annotations

from typing import Optional

from .kernel import Diverged, Fuel, alpha_eq, beta_normalize, free_vars
from .syntax import (
    App,
    Atom,
    CApp,
    FreeAtom,
    Lam,
    Var,
    capp,
    parse,
    spine,
    subterms,
)

ARITY = {"S": 3, "K": 2, "I": 1, "B": 3, "C": 3}


def _contract(name, a):
    if name == "S":
        f, g, x = a
        return CApp(CApp(f, x), CApp(g, x))
    if name == "K":
        return a[0]
    if name == "I":
        return a[0]
    if name == "B":
        f, g, x = a
        return CApp(f, CApp(g, x))
    f, g, x = a  # C
    return CApp(CApp(f, x), g)


def reduce_step(t) -> Optional[object]:
    """Contract the leftmost-outermost redex; ``None`` when ``t`` is normal."""
    head, args = spine(t)
    if isinstance(head, Atom) and len(args) >= ARITY[head.name]:
        k = ARITY[head.name]
        return capp(_contract(head.name, args[:k]), *args[k:])
    for i, a in enumerate(args):
        r = reduce_step(a)
        if r is not None:
            return capp(head, *args[:i], r, *args[i + 1 :])
    return None


def normalize(t, fuel: int = 100_000):
    """Normal form by leftmost-outermost reduction.

    Produces the same result as iterating :func:`reduce_step`, but reduces
    the head spine in place instead of re-searching from the root each step.
    Raises :class:`Diverged` after ``fuel`` contractions.
    """
    meter = Fuel(fuel)
    try:
        return _nf(t, meter)
    except RecursionError:
        raise Diverged("recursion depth exceeded") from None


def _nf(t, meter):
    head, args = spine(t)
    args.reverse()  # stack: next argument on top
    while isinstance(head, Atom) and len(args) >= ARITY[head.name]:
        meter.tick()
        k = ARITY[head.name]
        taken = [args.pop() for _ in range(k)]
        head, more = spine(_contract(head.name, taken))
        args.extend(reversed(more))
    args.reverse()
    return capp(head, *[_nf(a, meter) for a in args])


def fresh_atoms(n: int, *terms) -> list:
    """``n`` atom names ``a{n-1} ... a0``, primed to avoid names in ``terms``."""
    taken = set()
    for t in terms:
        for node in subterms(t):
            if isinstance(node, (FreeAtom, Var)):
                taken.add(node.name)
            elif isinstance(node, Lam):
                taken.add(node.name)
    names = []
    for i in range(n - 1, -1, -1):
        name = f"a{i}"
        while name in taken:
            name += "'"
        names.append(name)
    return names


def ext_eq(t1, t2, arity: int, fuel: int = 100_000) -> Optional[bool]:
    """Compare normal forms after applying both terms to ``arity`` fresh atoms.

    Returns ``None`` (unknown) when either side runs out of fuel.
    """
    atoms = [FreeAtom(n) for n in fresh_atoms(arity, t1, t2)]
    try:
        n1 = normalize(capp(t1, *atoms), fuel)
        n2 = normalize(capp(t2, *atoms), fuel)
    except Diverged:
        return None
    return n1 == n2


# ---------------------------------------------------------------------------
# Cross-check against the lambda calculus

_COMB_LAMBDA = {
    "S": parse(r"\f.\g.\x. f x (g x)"),
    "K": parse(r"\x.\y. x"),
    "I": parse(r"\x. x"),
    "B": parse(r"\f.\g.\x. f (g x)"),
    "C": parse(r"\f.\g.\x. f x g"),
}


def comb_to_lambda(t):
    """Read a combinator term back as a named lambda term (FreeAtoms become
    free variables)."""
    if isinstance(t, Atom):
        return _COMB_LAMBDA[t.name]
    if isinstance(t, FreeAtom):
        return Var(t.name)
    head, args = spine(t)
    out = comb_to_lambda(head)
    for a in args:
        out = App(out, comb_to_lambda(a))
    return out


def agrees_with_lambda(comb, term, atoms: int = 3, fuel: int = 100_000) -> Optional[bool]:
    """Oracle: does ``comb`` behave like the lambda term ``term``?

    Both are applied to the same fresh atoms.  The lambda side is
    beta-normalized; the combinator side is weakly normalized, read back as
    a lambda term and beta-normalized, then the two results are compared up
    to alpha equivalence.  ``None`` means one side ran out of fuel.
    """
    names = fresh_atoms(atoms, comb, term)
    names = [n for n in names if n not in free_vars(term)]
    try:
        lhs = beta_normalize(_app_vars(term, names), fuel)
        cnf = normalize(capp(comb, *[FreeAtom(n) for n in names]), fuel)
        rhs = beta_normalize(comb_to_lambda(cnf), fuel)
    except Diverged:
        return None
    return alpha_eq(lhs, rhs)


def _app_vars(t, names):
    for n in names:
        t = App(t, Var(n))
    return t
