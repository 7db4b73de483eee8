"""Random star expressions, sound Mil- rewrites and random valid Mil derivations."""
from __future__ import annotations

import random

from .kernel import AXIOMS, RSPStar, Symm, axiom
from .rewriting import Chain, at, star_fixpoint_proof, symm, trans
from .syntax import (ONE, ZERO, Act, Expr, Prod, Star, Sum, positions, subterm_at, terminates)

LETTERS = ("a", "b", "c")


def random_expr(rng: random.Random, ops: int, letters=LETTERS[:2]) -> Expr:
    """A random expression with exactly `ops` operators."""
    if ops <= 0:
        r = rng.random()
        if r < 0.12:
            return ZERO
        if r < 0.24:
            return ONE
        return Act(rng.choice(letters))
    r = rng.random()
    if r < 0.25:
        return Star(random_expr(rng, ops - 1, letters))
    k = rng.randint(0, ops - 1)
    l, rr = random_expr(rng, k, letters), random_expr(rng, ops - 1 - k, letters)
    return Sum(l, rr) if r < 0.6 else Prod(l, rr)


def random_exprs(seed: int, count: int, max_ops: int = 14, letters=LETTERS[:2]) -> list:
    rng = random.Random(seed)
    return [random_expr(rng, rng.randint(0, max_ops), rng.choice([letters, LETTERS]))
            for _ in range(count)]


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in e.children)


# ---------------------------------------------------------------- Mil- rewrites

def _match(pat: Expr, s: Expr, sub: dict) -> bool:
    if isinstance(pat, Act):
        v = sub.get(pat.name)
        if v is None:
            sub[pat.name] = s
            return True
        return v is s
    if type(pat) is not type(s):
        return False
    if isinstance(pat, Star):
        return _match(pat.body, s.body, sub)
    if isinstance(pat, (Sum, Prod)):
        return _match(pat.left, s.left, sub) and _match(pat.right, s.right, sub)
    return pat is s


_GROWING = {"neutral-sum", "idempot-sum", "id-left", "id-right", "deadlock"}


def rewrite_options(rng: random.Random, s: Expr, grow: bool = True) -> list:
    """Axiom instances (possibly reversed) whose left side is s."""
    out = []
    for name, (vars_, l, r) in AXIOMS.items():
        sub: dict = {}
        if _match(l, s, sub):
            out.append(axiom(name, **sub))
        sub = {}
        if (grow or name not in _GROWING) and _match(r, s, sub):
            for v in vars_:
                if v not in sub:
                    sub[v] = random_expr(rng, rng.randint(0, 2))
            out.append(Symm(axiom(name, **sub)))
    return out


def random_rewrite_step(rng: random.Random, e: Expr, max_size: int = 60):
    """One sound rewrite step from e as a proof, or None."""
    ps = positions(e)
    rng.shuffle(ps)
    grow = size(e) < max_size
    for path in ps[:8]:
        opts = rewrite_options(rng, subterm_at(e, path), grow)
        if opts:
            return at(e, path, rng.choice(opts))
    return None


def random_rewrites(rng: random.Random, e: Expr, steps: int, max_size: int = 60):
    """(e', Mil- proof of e = e' or None)."""
    c = Chain(e)
    for _ in range(steps):
        p = random_rewrite_step(rng, c.cur, max_size)
        if p is not None:
            c.step(p)
    return c.cur, (None if not c.steps else c.proof())


# ---------------------------------------------------------------- Mil derivations

def random_guarded(rng: random.Random, ops: int, letters=LETTERS[:2]) -> Expr:
    while True:
        f = random_expr(rng, ops, letters)
        if not terminates(f):
            return f


def random_rsp_instance(rng: random.Random, letters=LETTERS[:2]):
    """(premise proof of e' = f.e' + g, e', f, g) with e' a rewrite of f*.g."""
    f = random_guarded(rng, rng.randint(0, 4), letters)
    g = random_expr(rng, rng.randint(0, 3), letters)
    start = Prod(Star(f), g)
    e2, p = random_rewrites(rng, start, rng.randint(0, 4), 40)
    c = Chain(e2).step(symm(p) if p is not None else None)
    c.step(star_fixpoint_proof(f, g))
    c.at((0, 1), p)
    return c.proof(), e2, f, g


def random_mil_proof(rng: random.Random, letters=LETTERS[:2]):
    """A random derivation mixing rewrite chains and RSP* steps; always valid in Mil."""
    kind = rng.random()
    if kind < 0.4:
        e = random_expr(rng, rng.randint(0, 8), letters)
        e2, p = random_rewrites(rng, e, rng.randint(1, 8))
        return p if p is not None else axiom("rec-star", e=e)
    prem, e2, f, g = random_rsp_instance(rng, letters)
    p = RSPStar(prem)                         # e2 = f*.g
    e3, q = random_rewrites(rng, p.rhs, rng.randint(0, 4), 50)
    out = trans(p, q)
    if rng.random() < 0.5:
        out = Symm(out)
    return out
