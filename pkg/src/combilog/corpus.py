"""Seeded random terms for property checks and benchmarks."""

from __future__ import annotations

import random

from .syntax import App, DApp, DLam, Idx, Lam, Var, size


def random_closed(internal: int, rng: random.Random, lam_bias: float = 0.45):
    """Closed named term with exactly ``internal`` Lam/App nodes."""

    def go(k, scope):
        if k == 0:
            return Var(rng.choice(scope))
        if not scope or rng.random() < lam_bias:
            name = f"x{len(scope) + 1}"
            return Lam(name, go(k - 1, scope + [name]))
        left = rng.randint(0, k - 1)
        return App(go(left, scope), go(k - 1 - left, scope))

    return go(internal, [])


def closed_corpus(count: int, seed: int = 42, max_internal: int = 19):
    """``count`` closed terms of at most ``2 * max_internal + 1`` nodes."""
    rng = random.Random(f"corpus:{seed}")
    out = []
    for _ in range(count):
        t = random_closed(rng.randint(1, max_internal), rng)
        assert size(t) <= 2 * max_internal + 1
        out.append(t)
    return out


def random_db(internal: int, rng: random.Random, max_free: int = 3, lam_bias: float = 0.35):
    """De Bruijn term, possibly open (indices up to ``depth + max_free - 1``)."""

    def go(k, depth):
        if k == 0:
            return Idx(rng.randrange(depth + max_free))
        if rng.random() < lam_bias:
            return DLam(go(k - 1, depth + 1))
        left = rng.randint(0, k - 1)
        return DApp(go(left, depth), go(k - 1 - left, depth))

    return go(internal, 0)
