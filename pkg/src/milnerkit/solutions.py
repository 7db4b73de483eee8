"""Provable solutions of 1-charts and certificate synthesis for them."""
from __future__ import annotations

from dataclasses import dataclass, field

from .charts import OneChart, chart_interpretation, one_chart_interpretation, project
from .errors import ProofError, SideConditionViolation, SynthesisError
from .kernel import MIL_MINUS, Assume, Cxt, ProofTerm, Symm, SystemSpec, axiom, check_proof
from .rewriting import Chain, aci_join, cxt, join, symm, trans, try_join
from .syntax import (EMPTY, HOLE, ONE, ZERO, Act, Expr, FormalEquation, One, Prod, StackProd,
                     Star, Sum, Zero, render_expr, sum_of, terminates)


@dataclass
class CertifiedSolution:
    values: dict                      # vertex -> Expr
    system: SystemSpec
    certificates: dict = field(default_factory=dict)  # vertex -> ProofTerm

    def __getitem__(self, v):
        return self.values[v]


def label_expr(a: str) -> Expr:
    return ONE if a == EMPTY else Act(a)


def correctness_rhs(chart: OneChart, v, s) -> Expr:
    const = ONE if chart.is_terminating(v) else ZERO
    return Sum(const, sum_of([Prod(label_expr(a), s[w]) for (_, a, w) in chart.out(v)]))


def correctness_equation(chart: OneChart, v, s) -> FormalEquation:
    """s(v) = termination constant + sum of label . s(target), canonical order."""
    return FormalEquation(s[v], correctness_rhs(chart, v, s))


def bridge(p: ProofTerm, expected: FormalEquation, concl: FormalEquation | None = None):
    """Turn a proof of an ACI-variant of `expected` into a proof of `expected`, or None."""
    c = concl if concl is not None else p.conclusion()
    if c == expected:
        return p
    if c.lhs is not expected.lhs:
        return None
    q = aci_join(c.rhs, expected.rhs)
    if q is None:
        return None
    return trans(p, q)


def solution_errors(cs: CertifiedSolution, chart: OneChart) -> list:
    """Per-vertex diagnostics; empty when every certificate is acceptable."""
    errs = []
    for v in chart.vertices:
        if v not in cs.values:
            errs.append((v, "no solution value"))
            continue
        p = cs.certificates.get(v)
        if p is None:
            errs.append((v, "missing certificate"))
            continue
        want = correctness_equation(chart, v, cs.values)
        try:
            c = check_proof(cs.system, p)
        except ProofError as exc:
            errs.append((v, f"certificate does not check: {exc}"))
            continue
        if bridge(p, want, c) is None:
            errs.append((v, f"certificate concludes {c}, expected {want}"))
    return errs


def check_certified_solution(cs: CertifiedSolution, chart: OneChart) -> bool:
    return not solution_errors(cs, chart)


def canonical_certificate(cs: CertifiedSolution, chart: OneChart, v) -> ProofTerm:
    """The certificate at v, ACI-bridged to the canonical correctness equation."""
    want = correctness_equation(chart, v, cs.values)
    p = bridge(cs.certificates[v], want)
    if p is None:
        raise SynthesisError(f"certificate at {v} does not conclude {want}")
    return p


# ---------------------------------------------------------------- guard transform

_GT: dict = {}


def guard_transform(e: Expr):
    """(f, proof of e = 1 + f) with f not terminating, for terminating e."""
    if not terminates(e):
        raise SynthesisError(f"guard transform needs a terminating expression, got {e}")
    r = _GT.get(e)
    if r is None:
        r = _guard(e)
        _GT[e] = r
    return r


def _guard(e: Expr):
    if isinstance(e, One):
        return ZERO, Symm(axiom("neutral-sum", e=ONE))
    if isinstance(e, Star):
        b = e.body
        if not terminates(b):
            return Prod(b, e), axiom("rec-star", e=b)
        tb, cb = guard_transform(b)
        to_t = trans(Cxt(Star(HOLE), cb), Symm(axiom("trm-body", e=tb)))  # b* = tb*
        c = Chain(e).step(to_t).ax("rec-star", e=tb)
        c.at((1, 1), symm(to_t))
        return Prod(tb, e), c.proof()
    if isinstance(e, Sum):
        l, r = e.left, e.right
        tl, tr = terminates(l), terminates(r)
        c = Chain(e)
        if tl and tr:
            (t1, c1), (t2, c2) = guard_transform(l), guard_transform(r)
            f = Sum(t1, t2)
            c.at((0,), c1).at((1,), c2).join(Sum(ONE, f), aci_only=True)
        elif tl:
            t1, c1 = guard_transform(l)
            f = Sum(t1, r)
            c.at((0,), c1).ax("assoc-sum", e=ONE, f=t1, g=r)
        else:
            t2, c2 = guard_transform(r)
            f = Sum(l, t2)
            c.at((1,), c2).join(Sum(ONE, f), aci_only=True)
        return f, c.proof()
    if isinstance(e, Prod):
        l, r = e.left, e.right
        (t1, c1), (t2, c2) = guard_transform(l), guard_transform(r)
        c = Chain(e).at((0,), c1).ax("r-distr", e=ONE, f=t1, g=r)
        c.at((0,), axiom("id-left", e=r)).at((0,), c2)
        c.ax("assoc-sum", e=ONE, f=t2, g=Prod(t1, r))
        return Sum(t2, Prod(t1, r)), c.proof()
    raise SynthesisError(f"guard transform undefined for {e!r}")


# ---------------------------------------------------------------- head unfolding

_UNFOLD: dict = {}


def unfold(E: Expr):
    """(U, proof of project(E) = U or None) where U exposes the 1-steps of E.

    The normal form of U coincides with that of the canonical right-hand side
    built from the 1-derivatives of E under the projection solution.
    """
    r = _UNFOLD.get(E)
    if r is None:
        r = _unfold(E)
        _UNFOLD[E] = r
    return r


def _unfold(E: Expr):
    if isinstance(E, (Zero, One, Act)):
        return E, None
    if isinstance(E, Sum):
        u1, p1 = unfold(E.left)
        u2, p2 = unfold(E.right)
        pe = project(E)
        return Sum(u1, u2), trans(cxt(Sum(HOLE, pe.right), p1), cxt(Sum(u1, HOLE), p2))
    if isinstance(E, StackProd):
        u1, p1 = unfold(E.left)
        return Prod(u1, E.right), cxt(Prod(HOLE, E.right), p1)
    if isinstance(E, Prod):
        e1, e2 = E.left, E.right
        if not terminates(e1):
            u1, p1 = unfold(e1)
            return Prod(u1, e2), cxt(Prod(HOLE, e2), p1)
        t1, c1 = guard_transform(e1)
        c = Chain(E).at((0,), c1).ax("r-distr", e=ONE, f=t1, g=e2)
        c.at((0,), axiom("id-left", e=e2))
        u2, p2 = unfold(e2)
        ut, pt = unfold(t1)
        c.at((0,), p2).at((1, 0), pt)
        return c.cur, c.proof()
    if isinstance(E, Star):
        t, ct = guard_transform(E)      # E = 1 + X . E
        ux, px = unfold(t.left)
        c = Chain(E).step(ct).at((1, 0), px)
        return c.cur, c.proof()
    raise SynthesisError(f"cannot unfold {E!r}")


def head_certificate(E: Expr, rhs: Expr) -> ProofTerm:
    """Mil- proof of project(E) = rhs where rhs is the canonical head form."""
    u, p = unfold(E)
    return Chain(project(E)).step(p).join(rhs).proof()


def prove_solution_step(l: Expr, r: Expr) -> ProofTerm:
    """Mil- proof of l = r by normalization, optionally after unfolding both sides once."""
    p = try_join(l, r)
    if p is not None:
        return p
    ul, pl = unfold(l)
    ur, pr = unfold(r)
    q = join(ul, ur)
    return Chain(l).step(pl).step(q).step(symm(pr) if pr is not None else None).proof()


# ---------------------------------------------------------------- solutions

def projection_solution(e: Expr, lc=None) -> CertifiedSolution:
    """The projection solution of 1C(e) with Mil- certificates."""
    lc = one_chart_interpretation(e) if lc is None else lc
    chart = lc.chart
    values = {v: project(chart.payload[v]) for v in chart.vertices}
    certs = {v: head_certificate(chart.payload[v], correctness_rhs(chart, v, values))
             for v in chart.vertices}
    return CertifiedSolution(values, MIL_MINUS, certs)


def fundamental_certificate_chart(e: Expr, chart: OneChart | None = None) -> CertifiedSolution:
    """The identity solution of C(e) with Mil- certificates."""
    chart = chart_interpretation(e) if chart is None else chart
    values = dict(chart.payload)
    certs = {v: head_certificate(values[v], correctness_rhs(chart, v, values))
             for v in chart.vertices}
    return CertifiedSolution(values, MIL_MINUS, certs)


def rsp_premise(e: Expr, f: Expr, g: Expr) -> FormalEquation:
    return FormalEquation(e, Sum(Prod(f, e), g))


def rsp_solution(e: Expr, f: Expr, g: Expr, lc=None) -> CertifiedSolution:
    """Solution of 1C(f*.g) with principal value e, certified over Mil- + {e = f.e + g}."""
    if terminates(f):
        raise SideConditionViolation("RSP*", render_expr(f))
    fs = Star(f)
    start = Prod(fs, g)
    lc = one_chart_interpretation(start) if lc is None else lc
    chart = lc.chart
    gamma = rsp_premise(e, f, g)
    values, kinds = {}, {}
    for v in chart.vertices:
        P = chart.payload[v]
        if P is start:
            values[v], kinds[v] = e, ("start", None)
        elif (isinstance(P, Prod) and P.right is g and isinstance(P.left, StackProd)
              and P.left.right is fs):
            F = P.left.left
            values[v], kinds[v] = Prod(project(F), e), ("iter", F)
        else:
            values[v], kinds[v] = project(P), ("rest", P)
    certs = {}
    for v in chart.vertices:
        rhs = correctness_rhs(chart, v, values)
        kind, X = kinds[v]
        if kind == "start":
            c = Chain(e).step(Assume(gamma))
            c.at((0, 0), unfold(f)[1]).at((1,), unfold(g)[1]).join(rhs)
        elif kind == "iter":
            c = Chain(values[v]).at((0,), unfold(X)[1]).join(rhs)
        else:
            c = Chain(values[v]).step(head_certificate(X, rhs))
        certs[v] = c.proof()
    return CertifiedSolution(values, MIL_MINUS.with_assumptions([gamma]), certs)
