"""Plain lambda machinery: free variables, substitution, normalization, alpha
equivalence and conversion to and from de Bruijn form."""

from __future__ import annotations

from .syntax import (
    App,
    Box,
    DApp,
    DLam,
    Idx,
    If,
    BoolLit,
    Lam,
    LetBox,
    Unbox,
    Var,
    spine,
    subterms,
)


class Diverged(Exception):
    """Raised when a reduction runs out of fuel."""


class Fuel:
    def __init__(self, budget: int):
        if budget <= 0:
            raise ValueError("fuel must be positive")
        self.left = budget

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise Diverged("fuel exhausted")


def free_vars(t) -> list[str]:
    """Free variables in first-occurrence order."""
    seen: dict[str, None] = {}

    def go(t, bound):
        if isinstance(t, Var):
            if t.name not in bound and t.name not in seen:
                seen[t.name] = None
        elif isinstance(t, Lam):
            go(t.body, bound | {t.name})
        elif isinstance(t, LetBox):
            go(t.bound, bound)
            go(t.body, bound | {t.code_var})
        else:
            for c in _named_children(t):
                go(c, bound)

    go(t, frozenset())
    return list(seen)


class _FreeCache:
    """Free-variable sets memoised by node identity.

    Reduction shares subterms heavily (``(\\x. x x) t`` holds ``t`` twice), so
    per-identity caching keeps repeated scans linear in the shared graph.
    """

    def __init__(self):
        self._memo: dict[int, tuple] = {}

    def __call__(self, t) -> frozenset:
        hit = self._memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        if isinstance(t, Var):
            out = frozenset((t.name,))
        elif isinstance(t, Lam):
            out = self(t.body) - {t.name}
        elif isinstance(t, LetBox):
            out = self(t.bound) | (self(t.body) - {t.code_var})
        else:
            out = frozenset().union(*(self(c) for c in _named_children(t)))
        self._memo[id(t)] = (t, out)
        return out


def bound_names(t) -> set[str]:
    out = set()
    for n in subterms(t):
        if isinstance(n, Lam):
            out.add(n.name)
        elif isinstance(n, LetBox):
            out.add(n.code_var)
    return out


def all_names(t) -> set[str]:
    names = bound_names(t)
    names.update(n.name for n in subterms(t) if isinstance(n, Var))
    return names


def _named_children(t):
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, (Box, Unbox)):
        return (t.body,)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    return ()


def _rebuild(t, kids):
    if isinstance(t, App):
        return App(*kids)
    if isinstance(t, Box):
        return Box(*kids)
    if isinstance(t, Unbox):
        return Unbox(*kids)
    if isinstance(t, If):
        return If(*kids)
    return t


def prime(name: str, avoid) -> str:
    """Deterministic fresh name: ``y``, ``y'``, ``y''``... not in ``avoid``."""
    while name in avoid:
        name += "'"
    return name


def subst_avoiding(t, name: str, replacement):
    """Capture-avoiding ``t[name := replacement]``."""
    fv = _FreeCache()
    return _subst(t, name, replacement, fv(replacement), fv)


def _subst(t, x, s, fv_s, fv):
    if x not in fv(t):
        return t  # untouched subterms stay shared
    if isinstance(t, Var):
        return s
    if isinstance(t, Lam):
        y, body = t.name, t.body
        if y in fv_s:
            y2 = prime(y, fv_s | fv(body) | {x})
            body = _subst(body, y, Var(y2), frozenset({y2}), fv)
            y = y2
        return Lam(y, _subst(body, x, s, fv_s, fv), t.ann)
    if isinstance(t, LetBox):
        u, body = t.code_var, t.body
        bound = _subst(t.bound, x, s, fv_s, fv)
        if u == x:
            return LetBox(u, bound, body)
        if u in fv_s and x in fv(body):
            u2 = prime(u, fv_s | fv(body) | {x})
            body = _subst(body, u, Var(u2), frozenset({u2}), fv)
            u = u2
        return LetBox(u, bound, _subst(body, x, s, fv_s, fv))
    return _rebuild(t, [_subst(c, x, s, fv_s, fv) for c in _named_children(t)])


def subst_capturing(t, name: str, replacement):
    """Textual ``t[name := replacement]``; free variables of ``replacement``
    may become bound.  Stops only at binders that shadow ``name``."""
    if isinstance(t, Var):
        return replacement if t.name == name else t
    if isinstance(t, Lam):
        if t.name == name:
            return t
        return Lam(t.name, subst_capturing(t.body, name, replacement), t.ann)
    if isinstance(t, LetBox):
        bound = subst_capturing(t.bound, name, replacement)
        if t.code_var == name:
            return LetBox(t.code_var, bound, t.body)
        return LetBox(t.code_var, bound, subst_capturing(t.body, name, replacement))
    return _rebuild(t, [subst_capturing(c, name, replacement) for c in _named_children(t)])


# ---------------------------------------------------------------------------
# Normal-order reduction


def _apply_all(head, args):
    for a in args:
        head = App(head, a)
    return head


class _Normalizer:
    """Leftmost-outermost reducer; ``letbox`` enables the code-unwrapping rule."""

    def __init__(self, fuel: int, letbox: bool = False):
        self.fuel = Fuel(fuel)
        self.letbox = letbox
        self.fv = _FreeCache()
        self._nf_memo: dict[int, tuple] = {}

    def subst(self, t, x, s):
        return _subst(t, x, s, self.fv(s), self.fv)

    def whnf(self, t):
        stack = []  # pending arguments, next one on top
        while True:
            if isinstance(t, App):
                stack.append(t.arg)
                t = t.fn
                continue
            if isinstance(t, Lam) and stack:
                self.fuel.tick()
                t = self.subst(t.body, t.name, stack.pop())
                continue
            if isinstance(t, LetBox) and self.letbox:
                bound = self.whnf(t.bound)
                if isinstance(bound, Box):
                    self.fuel.tick()
                    t = self.subst(t.body, t.code_var, bound.body)
                    continue
                t = LetBox(t.code_var, bound, t.body)
            elif isinstance(t, If):
                cond = self.whnf(t.cond)
                if isinstance(cond, BoolLit):
                    self.fuel.tick()
                    t = t.then if cond.value else t.orelse
                    continue
                t = If(cond, t.then, t.orelse)
            return _apply_all(t, reversed(stack))

    def nf(self, t):
        # normal order is deterministic, so a shared subterm normalises once
        hit = self._nf_memo.get(id(t))
        if hit is not None and hit[0] is t:
            return hit[1]
        out = self._nf(t)
        self._nf_memo[id(t)] = (t, out)
        return out

    def _nf(self, t):
        t = self.whnf(t)
        if isinstance(t, Lam):
            return Lam(t.name, self.nf(t.body), t.ann)
        if isinstance(t, App):
            head, args = spine(t)
            return _apply_all(self.nf(head), [self.nf(a) for a in args])
        if isinstance(t, LetBox):
            bound = self.nf(t.bound)
            return LetBox(t.code_var, bound, self.nf(t.body))
        if isinstance(t, (Box, Unbox, If)):
            return _rebuild(t, [self.nf(c) for c in _named_children(t)])
        return t


def normal_form(t, fuel: int = 100_000, letbox: bool = False):
    try:
        return _Normalizer(fuel, letbox).nf(t)
    except RecursionError:
        raise Diverged("recursion depth exceeded") from None


def beta_normalize(t, fuel: int = 100_000):
    """Normal-order beta normal form; raises :class:`Diverged` when ``fuel``
    contractions are not enough."""
    return normal_form(t, fuel)


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_eq(t1, t2) -> bool:
    return _alpha(t1, t2, {}, {}, 0)


def _alpha(a, b, env_a, env_b, depth):
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        da, db = env_a.get(a.name), env_b.get(b.name)
        if da is None and db is None:
            return a.name == b.name
        return da == db
    if isinstance(a, Lam):
        return _alpha(
            a.body, b.body, {**env_a, a.name: depth}, {**env_b, b.name: depth}, depth + 1
        )
    if isinstance(a, LetBox):
        return _alpha(a.bound, b.bound, env_a, env_b, depth) and _alpha(
            a.body,
            b.body,
            {**env_a, a.code_var: depth},
            {**env_b, b.code_var: depth},
            depth + 1,
        )
    if isinstance(a, BoolLit):
        return a.value == b.value
    ka, kb = _named_children(a), _named_children(b)
    return len(ka) == len(kb) and all(
        _alpha(x, y, env_a, env_b, depth) for x, y in zip(ka, kb)
    )


# ---------------------------------------------------------------------------
# De Bruijn conversion


def to_debruijn(t, env=()):
    """Convert a plain named term.  ``env[0]`` is the innermost free binder, so
    free ``env[k]`` under ``d`` lambdas becomes ``Idx(d + k)``."""
    env = list(env)

    def go(t, bound):
        if isinstance(t, Var):
            for i in range(len(bound) - 1, -1, -1):
                if bound[i] == t.name:
                    return Idx(len(bound) - 1 - i)
            if t.name in env:
                return Idx(len(bound) + env.index(t.name))
            raise ValueError(f"unbound variable {t.name!r}")
        if isinstance(t, Lam):
            return DLam(go(t.body, bound + [t.name]))
        if isinstance(t, App):
            return DApp(go(t.fn, bound), go(t.arg, bound))
        raise ValueError(f"{type(t).__name__} is not a plain lambda term")

    return go(t, [])


def from_debruijn(t, env=()):
    env = list(env)
    taken = set(env)

    def binder_name(depth):
        return prime(f"x{depth}", taken)

    def go(t, bound):
        if isinstance(t, Idx):
            if t.index < len(bound):
                return Var(bound[-1 - t.index])
            k = t.index - len(bound)
            if k >= len(env):
                raise ValueError(f"index {t.index} out of range")
            return Var(env[k])
        if isinstance(t, DLam):
            name = binder_name(len(bound))
            return Lam(name, go(t.body, bound + [name]))
        if isinstance(t, DApp):
            return App(go(t.fn, bound), go(t.arg, bound))
        raise TypeError(f"not a de Bruijn term: {t!r}")

    return go(t, [])
