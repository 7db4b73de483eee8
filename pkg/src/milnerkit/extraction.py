"""Extraction of star expressions from guarded LLEE-witnesses, with certificates."""
from __future__ import annotations

from dataclasses import dataclass

from .charts import LabeledChart
from .errors import SynthesisError, WitnessError
from .kernel import MIL, MIL_MINUS, ProofTerm, RSPStar, Symm, axiom
from .lee import descends_relation, validate_witness
from .rewriting import Chain, cxt, distribute, factor, one_star, rearrange, symm, trans, zero_star
from .solutions import CertifiedSolution, canonical_certificate, label_expr
from .syntax import HOLE, ONE, ZERO, Expr, Prod, Star, Sum, subterm_at, sum_of, sum_path


@dataclass
class ExtractionTable:
    relative: dict   # (w, v) -> Expr
    absolute: dict   # w -> Expr


class Extractor:
    """Memoized extraction values and certificates for one witness."""

    def __init__(self, lc: LabeledChart, check: bool = True):
        if check:
            rep = validate_witness(lc, require_guarded=True)
            if not rep.valid:
                raise WitnessError(f"extraction needs a valid guarded witness: {rep.violation} {rep.message}")
        self.lc = lc
        self.chart = lc.chart
        self.desc = descends_relation(lc)
        self._t: dict = {}
        self._s: dict = {}
        self._chain: dict = {}

    # values
    def entries(self, w):
        return self.lc.entries(w)

    def body(self, w):
        return self.lc.body(w)

    def loop_sum(self, w) -> Expr:
        return sum_of([Prod(label_expr(a), self.t(b, w)) for (_, a, b) in self.entries(w)])

    def const(self, w) -> Expr:
        return ONE if self.chart.is_terminating(w) else ZERO

    def t(self, w, v) -> Expr:
        if w == v:
            return ONE
        r = self._t.get((w, v))
        if r is None:
            if (v, w) not in self.desc:
                raise SynthesisError(f"relative extraction t({w}, {v}) needs {v} to descend to {w}")
            body = sum_of([Prod(label_expr(a), self.t(c, v)) for (_, a, c) in self.body(w)])
            r = Prod(Star(self.loop_sum(w)), body)
            self._t[(w, v)] = r
        return r

    def body_sum(self, w) -> Expr:
        return sum_of([self.const(w)] + [Prod(label_expr(a), self.s(c)) for (_, a, c) in self.body(w)])

    def s(self, w) -> Expr:
        r = self._s.get(w)
        if r is None:
            r = Prod(Star(self.loop_sum(w)), self.body_sum(w))
            self._s[w] = r
        return r

    def table(self) -> ExtractionTable:
        rel = {(v, v): ONE for v in self.chart.vertices}
        for (v, w) in sorted(self.desc):
            rel[(w, v)] = self.t(w, v)
        return ExtractionTable(rel, {w: self.s(w) for w in self.chart.vertices})

    # certificates
    def chain_certificate(self, w, v) -> ProofTerm:
        """s(w) = t(w, v) . s(v)."""
        if w == v:
            return Symm(axiom("id-left", e=self.s(v)))
        r = self._chain.get((w, v))
        if r is not None:
            return r
        tw = self.t(w, v)
        sv = self.s(v)
        body = self.body(w)
        n = len(body) + 1
        c = Chain(self.s(w))
        ys = []
        for i, (_, a, ci) in enumerate(body):
            path = (1,) + sum_path(n, i + 1)
            c.at(path + (1,), self.chain_certificate(ci, v))
            ys.append(Prod(label_expr(a), self.t(ci, v)))
            c.at(path, Symm(axiom("assoc-prod", e=label_expr(a), f=self.t(ci, v), g=sv)))
        c.at((1,), rearrange(c.cur.right, sum_of([Prod(y, sv) for y in ys])))
        c.at((1,), factor(ys, sv))
        c.step(Symm(axiom("assoc-prod", e=tw.left, f=tw.right, g=sv)))
        r = c.proof()
        self._chain[(w, v)] = r
        return r

    def certificate(self, w) -> ProofTerm:
        """s(w) = const + sum of label . s(target) in canonical transition order."""
        F = self.loop_sum(w)
        B = self.body_sum(w)
        sw = self.s(w)
        fs = Star(F)
        ents = self.entries(w)
        k = len(ents)
        xs = [Prod(label_expr(a), self.t(b, w)) for (_, a, b) in ents]
        c = Chain(sw).at((0,), axiom("rec-star", e=F))
        c.ax("r-distr", e=ONE, f=Prod(F, fs), g=B)
        c.at((0,), axiom("id-left", e=B))
        c.at((1,), axiom("assoc-prod", e=F, f=fs, g=B))
        c.at((1,), distribute(xs, sw))
        for i, (_, a, b) in enumerate(ents):
            path = (1,) + sum_path(k, i)
            c.at(path, axiom("assoc-prod", e=label_expr(a), f=self.t(b, w), g=sw))
            c.at(path + (1,), symm(self.chain_certificate(b, w)))
        target = Sum(self.const(w), sum_of([Prod(label_expr(a), self.s(x))
                                            for (_, a, x) in self.chart.out(w)]))
        c.step(rearrange(c.cur, target))
        return c.proof()


def extract(lc: LabeledChart) -> ExtractionTable:
    return Extractor(lc).table()


def certify_extraction(lc: LabeledChart) -> CertifiedSolution:
    ex = Extractor(lc)
    vals = {w: ex.s(w) for w in lc.chart.vertices}
    return CertifiedSolution(vals, MIL_MINUS, {w: ex.certificate(w) for w in lc.chart.vertices})


def chain_certificate(lc: LabeledChart, w, v) -> ProofTerm:
    ex = Extractor(lc)
    if w != v and (v, w) not in ex.desc:
        raise SynthesisError(f"({w}, {v}) is outside the descends relation")
    return ex.chain_certificate(w, v)


class _Equator:
    """Mil proofs equating a certified solution with the extracted solution."""

    def __init__(self, lc: LabeledChart, cs: CertifiedSolution, ex: Extractor):
        self.lc, self.cs, self.ex = lc, cs, ex
        self.chart = lc.chart
        self.s = cs.values
        self.certs = {v: canonical_certificate(cs, self.chart, v) for v in self.chart.vertices}
        self._chain: dict = {}
        self._eq: dict = {}

    def _rewrite_terms(self, w, rewrite):
        c = Chain(self.s[w]).step(self.certs[w])
        outs = self.chart.out(w)
        n = len(outs)
        for i, t in enumerate(outs):
            c.at((1,) + sum_path(n, i) + (1,), rewrite(t))
        return c

    def _regroup(self, c: Chain, w, groups):
        """Turn the rewritten right-hand side into sum of (F_k . x_k): one group per tail x_k.

        groups: list of (tail, predicate on transitions); entry terms read a.(t . tail).
        """
        outs = self.chart.out(w)
        n = len(outs)
        parts = []
        for tail, pick in groups:
            ys = []
            for i, t in enumerate(outs):
                if not pick(t):
                    continue
                x = subterm_at(c.cur, (1,) + sum_path(n, i))
                if isinstance(x.right, Prod) and x.right.right is tail:
                    c.at((1,) + sum_path(n, i), Symm(axiom("assoc-prod", e=x.left, f=x.right.left, g=tail)))
                    ys.append(Prod(x.left, x.right.left))
            parts.append((ys, tail))
        return parts

    def chain(self, w, v) -> ProofTerm:
        """s(w) = t(w, v) . s(v) in Mil, one RSP* application per loop level."""
        if w == v:
            return Symm(axiom("id-left", e=self.s[v]))
        r = self._chain.get((w, v))
        if r is not None:
            return r
        ex = self.ex
        tw = ex.t(w, v)
        sw, sv = self.s[w], self.s[v]
        entry = lambda t: self.lc.marks[t] > 0  # noqa: E731

        def rw(t):
            return self.chain(t[2], w) if entry(t) else self.chain(t[2], v)

        c = self._rewrite_terms(w, rw)
        (fy, _), (ty, _) = self._regroup(c, w, [(sw, entry), (sv, lambda t: not entry(t))])
        c.step(rearrange(c.cur, Sum(sum_of([Prod(y, sw) for y in fy]),
                                    sum_of([Prod(y, sv) for y in ty]))))
        c.at((0,), factor(fy, sw)).at((1,), factor(ty, sv))
        F, T = sum_of(fy), sum_of(ty)
        if F is not ex.loop_sum(w) or T is not tw.right:
            raise SynthesisError(f"regrouping at {w} did not reach the extraction shape")
        r = Chain(sw).step(RSPStar(c.proof()))
        r.step(Symm(axiom("assoc-prod", e=Star(F), f=T, g=sv)))
        r = r.proof()
        self._chain[(w, v)] = r
        return r

    def equate(self, w) -> ProofTerm:
        """s(w) = extracted s(w)."""
        r = self._eq.get(w)
        if r is not None:
            return r
        ex = self.ex
        sw = self.s[w]
        entry = lambda t: self.lc.marks[t] > 0  # noqa: E731

        def rw(t):
            return self.chain(t[2], w) if entry(t) else self.equate(t[2])

        c = self._rewrite_terms(w, rw)
        ((fy, _),) = self._regroup(c, w, [(sw, entry)])
        B = ex.body_sum(w)
        c.step(rearrange(c.cur, Sum(sum_of([Prod(y, sw) for y in fy]), B)))
        c.at((0,), factor(fy, sw))
        if sum_of(fy) is not ex.loop_sum(w):
            raise SynthesisError(f"regrouping at {w} did not reach the extraction shape")
        r = RSPStar(c.proof())
        self._eq[w] = r
        return r


def equate_solutions(lc: LabeledChart, cs: CertifiedSolution, extractor: Extractor | None = None) -> dict:
    """For every vertex w a Mil proof of cs(w) = extracted s(w)."""
    ex = Extractor(lc) if extractor is None else extractor
    eq = _Equator(lc, cs, ex)
    return {w: eq.equate(w) for w in lc.chart.vertices}


def equate_at(lc: LabeledChart, cs: CertifiedSolution, w, extractor: Extractor | None = None) -> ProofTerm:
    ex = Extractor(lc) if extractor is None else extractor
    return _Equator(lc, cs, ex).equate(w)


def equating_system(cs: CertifiedSolution):
    return MIL.with_assumptions(cs.system.assumptions)


# ---------------------------------------------------------------- simplifier

def simplify(e: Expr):
    """(simplified e, Mil- proof of e = simplified) using unit, zero, idempotence and star-fold rules."""
    memo: dict = {}
    return _simp(e, memo)


def _simp(e, memo):
    r = memo.get(e)
    if r is not None:
        return r
    if isinstance(e, Star):
        b, pb = _simp(e.body, memo)
        cur, p = Star(b), cxt(Star(HOLE), pb)
    elif isinstance(e, (Sum, Prod)):
        l, pl = _simp(e.left, memo)
        rr, pr = _simp(e.right, memo)
        cur = type(e)(l, rr)
        p = trans(cxt(type(e)(HOLE, e.right), pl), cxt(type(e)(l, HOLE), pr))
    else:
        cur, p = e, None
    while True:
        step = _root_rule(cur)
        if step is None:
            break
        p = trans(p, step)
        cur = step.rhs
    r = (cur, p if p is not None else None)
    memo[e] = r
    return r


def _root_rule(e):
    if isinstance(e, Prod):
        if e.left is ZERO:
            return axiom("deadlock", e=e.right)
        if e.left is ONE:
            return axiom("id-left", e=e.right)
        if e.right is ONE:
            return axiom("id-right", e=e.left)
    if isinstance(e, Sum):
        if e.right is ZERO:
            return axiom("neutral-sum", e=e.left)
        if e.left is ZERO:
            return trans(axiom("comm-sum", e=ZERO, f=e.right), axiom("neutral-sum", e=e.right))
        if e.left is e.right:
            return axiom("idempot-sum", e=e.left)
        for one, x in ((e.left, e.right), (e.right, e.left)):
            if (one is ONE and isinstance(x, Prod) and isinstance(x.right, Star)
                    and x.right.body is x.left):
                fold = Symm(axiom("rec-star", e=x.left))
                if one is e.left:
                    return fold
                return trans(axiom("comm-sum", e=e.left, f=e.right), fold)
    if isinstance(e, Star):
        if e.body is ZERO:
            return zero_star()
        if e.body is ONE:
            return one_star()
    return None
