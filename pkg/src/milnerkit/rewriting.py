"""Proof-producing rewriting: proof builders, a Mil- normalizer and the ACI normalizer.

The normal form of the Mil- normalizer treats stars as opaque factors (with
normalized bodies) and is canonical for the theory of sums and products; it
is only used as a tactic that joins two sides, every step emitting axiom
instances that the kernel re-checks.
"""
from __future__ import annotations

import sys
from typing import Sequence

from .errors import SynthesisError
from .kernel import Axiom, Cxt, ProofTerm, Refl, Symm, Trans, axiom
from .syntax import (HOLE, ONE, ZERO, Act, Expr, One, Prod, StackProd, Star, Sum, Zero,
                     context_at, sort_key, subterm_at, sum_of, summands)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


# ---------------------------------------------------------------- builders

def refl(e: Expr) -> ProofTerm:
    return Refl(e)


def is_refl(p) -> bool:
    return p is None or isinstance(p, Refl)


def symm(p: ProofTerm) -> ProofTerm:
    if isinstance(p, Refl):
        return p
    if isinstance(p, Symm):
        return p.sub
    return Symm(p)


def trans(*ps) -> ProofTerm | None:
    """Balanced transitive chain of the non-trivial steps; None if all are trivial."""
    steps = [p for p in ps if not is_refl(p)]
    if not steps:
        return None
    return _balanced(steps, 0, len(steps))


def _balanced(steps, lo, hi):
    if hi - lo == 1:
        return steps[lo]
    mid = (lo + hi) // 2
    return Trans(_balanced(steps, lo, mid), _balanced(steps, mid, hi))


def close(p, e: Expr) -> ProofTerm:
    """Turn an optional proof into a proof term (Refl when trivial)."""
    return Refl(e) if p is None else p


def cxt(ctx: Expr, p) -> ProofTerm | None:
    if is_refl(p):
        return None
    if ctx is HOLE:
        return p
    if isinstance(p, Cxt):  # fuse nested contexts
        from .syntax import plug
        return Cxt(plug(ctx, p.ctx), p.sub)
    return Cxt(ctx, p)


def at(e: Expr, path, p) -> ProofTerm | None:
    """Rewrite the subterm of e at path using p (whose lhs must be that subterm)."""
    if is_refl(p):
        return None
    ctx, sub = context_at(e, path)
    if p.lhs is not sub:
        raise SynthesisError(f"rewrite at {path}: proof lhs does not match the subterm")
    return cxt(ctx, p)


class Chain:
    """Accumulates rewrite steps starting from an expression."""

    def __init__(self, start: Expr):
        self.start = start
        self.cur = start
        self.steps: list = []

    def step(self, p) -> "Chain":
        if is_refl(p):
            return self
        if p.lhs is not self.cur:
            raise SynthesisError(f"chain step starts at {p.lhs} but the chain is at {self.cur}")
        self.steps.append(p)
        self.cur = p.rhs
        return self

    def at(self, path, p) -> "Chain":
        return self.step(at(self.cur, path, p))

    def ax(self, name, **s) -> "Chain":
        return self.step(axiom(name, **s))

    def rev(self, name, **s) -> "Chain":
        return self.step(Symm(axiom(name, **s)))

    def join(self, target: Expr, aci_only: bool = False) -> "Chain":
        return self.step(aci_join(self.cur, target) if aci_only else join(self.cur, target))

    def proof(self) -> ProofTerm:
        return close(trans(*self.steps), self.start)


# ---------------------------------------------------------------- normalizer

class Normalizer:
    """Proof-producing normalization; `full` enables the Mil- fragment, otherwise ACI only.

    A `shallow` normalizer only reorders the top-level summands (each one an atom);
    `drop_zero` additionally removes 0 summands.
    """

    def __init__(self, full: bool, shallow: bool = False, drop_zero: bool = False):
        self.full = full
        self.shallow = shallow
        self.drop_zero = full or drop_zero
        self.nf_cache: dict = {}
        self.prod_cache: dict = {}
        self.merge_cache: dict = {}

    def _trim(self):
        if len(self.nf_cache) > 300_000:
            self.nf_cache.clear()
            self.prod_cache.clear()
            self.merge_cache.clear()

    def nf(self, e: Expr):
        """(normal form, proof of e = nf or None)."""
        r = self.nf_cache.get(e)
        if r is not None:
            return r
        self._trim()
        if isinstance(e, (Zero, One, Act)) or (self.shallow and not isinstance(e, Sum)):
            r = (e, None)
        elif isinstance(e, Star):
            b, pb = self.nf(e.body)
            r = self._star(Star(b), cxt(Star(HOLE), pb))
        elif isinstance(e, Sum):
            l, pl = self.nf(e.left)
            rr, pr = self.nf(e.right)
            p1 = trans(cxt(Sum(HOLE, e.right), pl), cxt(Sum(l, HOLE), pr))
            m, pm = self.merge(l, rr)
            r = (m, trans(p1, pm))
        elif isinstance(e, Prod):
            l, pl = self.nf(e.left)
            rr, pr = self.nf(e.right)
            p1 = trans(cxt(Prod(HOLE, e.right), pl), cxt(Prod(l, HOLE), pr))
            if self.full:
                m, pm = self.prod(l, rr)
                r = (m, trans(p1, pm))
            else:
                r = (Prod(l, rr), p1)
        else:
            raise SynthesisError(f"cannot normalize {type(e).__name__}")
        self.nf_cache[e] = r
        return r

    def _star(self, s: Star, p):
        if not self.full:
            return (s, p)
        b = s.body
        if b is ZERO:
            return (ONE, trans(p, zero_star()))
        if b is ONE:
            return (ONE, trans(p, one_star()))
        if isinstance(b, Sum):
            xs = summands(b)
            if xs[0] is ONE:
                rest = sum_of(xs[1:])
                q = trans(cxt(Star(HOLE), split_first(xs)),
                          Symm(axiom("trm-body", e=rest)))
                return (Star(rest), trans(p, q))
        return (s, p)

    # products of normal forms
    def prod(self, x: Expr, y: Expr):
        key = (x, y)
        r = self.prod_cache.get(key)
        if r is not None:
            return r
        e = Prod(x, y)
        if x is ZERO:
            r = (ZERO, axiom("deadlock", e=y))
        elif x is ONE:
            r = (y, axiom("id-left", e=y))
        elif y is ONE:
            r = (x, axiom("id-right", e=x))
        elif isinstance(x, Sum):
            l, m = x.left, x.right
            p0 = axiom("r-distr", e=l, f=m, g=y)
            a, pa = self.prod(l, y)
            b, pb = self.prod(m, y)
            p1 = trans(cxt(Sum(HOLE, Prod(m, y)), pa), cxt(Sum(a, HOLE), pb))
            s, ps = self.merge(a, b)
            r = (s, trans(p0, p1, ps))
        elif isinstance(x, Prod):
            f, rest = x.left, x.right
            p0 = axiom("assoc-prod", e=f, f=rest, g=y)
            z, pz = self.prod(rest, y)
            r = (Prod(f, z), trans(p0, cxt(Prod(f, HOLE), pz)))
        else:
            r = (e, None)
        self.prod_cache[key] = r
        return r

    # sums of normal forms
    def merge(self, x: Expr, y: Expr):
        key = (x, y)
        r = self.merge_cache.get(key)
        if r is not None:
            return r
        if self.drop_zero and y is ZERO:
            r = (x, axiom("neutral-sum", e=x))
        elif self.drop_zero and x is ZERO:
            r = (y, trans(axiom("comm-sum", e=ZERO, f=y), axiom("neutral-sum", e=y)))
        elif isinstance(y, Sum):
            t1, t = y.left, y.right
            p0 = Symm(axiom("assoc-sum", e=x, f=t1, g=t))
            m, pm = self.merge(x, t1)
            s, ps = self.insert(m, t)
            r = (s, trans(p0, cxt(Sum(HOLE, t), pm), ps))
        else:
            r = self.insert(x, y)
        self.merge_cache[key] = r
        return r

    def insert(self, s: Expr, t: Expr):
        """Normal form of s + t for a sorted sum s and a single summand t."""
        if not isinstance(s, Sum):
            if t is s:
                return (s, axiom("idempot-sum", e=s))
            if sort_key(t) < sort_key(s):
                return (Sum(t, s), axiom("comm-sum", e=s, f=t))
            return (Sum(s, t), None)
        s1, last = s.left, s.right
        if t is last:
            p = trans(axiom("assoc-sum", e=s1, f=last, g=last),
                      cxt(Sum(s1, HOLE), axiom("idempot-sum", e=last)))
            return (s, p)
        if sort_key(last) < sort_key(t):
            return (Sum(s, t), None)
        p0 = axiom("assoc-sum", e=s1, f=last, g=t)
        p1 = cxt(Sum(s1, HOLE), axiom("comm-sum", e=last, f=t))
        p2 = Symm(axiom("assoc-sum", e=s1, f=t, g=last))
        m, pm = self.insert(s1, t)
        return (Sum(m, last), trans(p0, p1, p2, cxt(Sum(HOLE, last), pm)))


def split_first(xs: Sequence[Expr]) -> ProofTerm | None:
    """Proof of sum_of(xs) = xs[0] + sum_of(xs[1:]) for len(xs) >= 2."""
    n = len(xs)
    if n < 2:
        raise ValueError("split_first needs two summands")
    if n == 2:
        return None
    inner = split_first(xs[:-1])
    p0 = cxt(Sum(HOLE, xs[-1]), inner)
    return trans(p0, axiom("assoc-sum", e=xs[0], f=sum_of(xs[1:-1]), g=xs[-1]))


def zero_star() -> ProofTerm:
    """0* = 1."""
    return trans(axiom("rec-star", e=ZERO),
                 Cxt(Sum(ONE, HOLE), axiom("deadlock", e=Star(ZERO))),
                 axiom("neutral-sum", e=ONE))


def one_star() -> ProofTerm:
    """1* = 1 via 1* = (1 + 0)* = 0* = 1."""
    p = trans(axiom("trm-body", e=ZERO), Cxt(Star(HOLE), axiom("neutral-sum", e=ONE)))  # 0* = 1*
    return trans(Symm(p), zero_star())


MIL_NORMALIZER = Normalizer(full=True)
ACI_NORMALIZER = Normalizer(full=False)
SUMMAND_NORMALIZER = Normalizer(full=False, shallow=True, drop_zero=True)


def normalize(e: Expr):
    """(Mil- normal form, proof)."""
    n, p = MIL_NORMALIZER.nf(e)
    return n, close(p, e)


def aci_normal_proof(e: Expr):
    n, p = ACI_NORMALIZER.nf(e)
    return n, close(p, e)


def join(l: Expr, r: Expr) -> ProofTerm:
    """Mil- proof of l = r through a common normal form; raises SynthesisError if none."""
    if l is r:
        return Refl(l)
    nl, pl = MIL_NORMALIZER.nf(l)
    nr, pr = MIL_NORMALIZER.nf(r)
    if nl is not nr:
        raise SynthesisError(f"no common normal form:\n  {l}\n  {r}")
    return close(trans(pl, None if pr is None else symm(pr)), l)


def try_join(l: Expr, r: Expr):
    try:
        return join(l, r)
    except SynthesisError:
        return None


def aci_join(l: Expr, r: Expr):
    """ACI proof of l = r, or None when the ACI normal forms differ."""
    if l is r:
        return Refl(l)
    nl, pl = ACI_NORMALIZER.nf(l)
    nr, pr = ACI_NORMALIZER.nf(r)
    if nl is not nr:
        return None
    return close(trans(pl, None if pr is None else symm(pr)), l)


def star_fixpoint_proof(f: Expr, g: Expr) -> ProofTerm:
    """f*.g = f.(f*.g) + g by rec-star, r-distr, id-left, assoc-prod and comm-sum."""
    fs = Star(f)
    c = Chain(Prod(fs, g))
    c.at((0,), axiom("rec-star", e=f))                       # (1 + f.f*).g
    c.ax("r-distr", e=ONE, f=Prod(f, fs), g=g)              # 1.g + (f.f*).g
    c.at((0,), axiom("id-left", e=g))                        # g + (f.f*).g
    c.at((1,), axiom("assoc-prod", e=f, f=fs, g=g))         # g + f.(f*.g)
    c.ax("comm-sum", e=g, f=Prod(f, Prod(fs, g)))           # f.(f*.g) + g
    return c.proof()


def rearrange(l: Expr, r: Expr) -> ProofTerm:
    """Proof of l = r that only reorders, merges or drops (0) top-level summands."""
    if l is r:
        return Refl(l)
    nl, pl = SUMMAND_NORMALIZER.nf(l)
    nr, pr = SUMMAND_NORMALIZER.nf(r)
    if nl is not nr:
        raise SynthesisError("the two sums have different summand sets")
    return close(trans(pl, None if pr is None else symm(pr)), l)


def distribute(xs: Sequence[Expr], y: Expr) -> ProofTerm | None:
    """Proof of sum_of(xs) . y = sum_of([x . y for x in xs]) by r-distr (deadlock for [])."""
    if not xs:
        return axiom("deadlock", e=y)
    steps = []
    cur = Prod(sum_of(xs), y)
    n = len(xs)
    # peel the last summand repeatedly; the pending product sits at path (0,)*k
    for k in range(n - 1):
        head = sum_of(xs[:n - 1 - k])
        p = axiom("r-distr", e=head, f=xs[n - 1 - k], g=y)
        steps.append(at(cur, (0,) * k, p))
        cur = steps[-1].rhs
    return trans(*steps)


def factor(xs: Sequence[Expr], y: Expr) -> ProofTerm | None:
    """Proof of sum_of([x . y for x in xs]) = sum_of(xs) . y."""
    p = distribute(xs, y)
    return None if p is None else symm(p)
