"""Proof transformations between the coinductive and the fixed-point-rule systems."""
from __future__ import annotations

from dataclasses import dataclass

from .bisim import find_one_bisimulation
from .charts import OneChart, chart_interpretation, one_chart_interpretation
from .coind import CoinductiveProof, coindproof_errors, from_solutions
from .errors import CapExceeded, CoinductiveProofInvalid, NotBisimilar, ProofError
from .extraction import Extractor, equate_at
from .kernel import (CC, CLC, CMIL1, MIL, MIL_MINUS, USP, Assume, Axiom, Coind, Cxt, LCoind,
                     ProofTerm, Refl, RSPStar, Symm, SystemSpec, Trans, USPStar, _rsp_shape,
                     check_proof, count_nodes)
from .rewriting import Chain, aci_join, trans
from .solutions import (CertifiedSolution, correctness_rhs, fundamental_certificate_chart,
                        projection_solution, rsp_solution)
from .syntax import FormalEquation, Prod, Star, sum_path

NODE_CAP = 1_000_000


@dataclass
class TransformReport:
    input_conclusion: FormalEquation
    output_conclusion: FormalEquation
    system: str
    rechecked: bool

    def to_json(self) -> dict:
        return {"input": str(self.input_conclusion), "output": str(self.output_conclusion),
                "system": self.system, "rechecked": self.rechecked}


def _cap(p: ProofTerm, cap: int | None) -> ProofTerm:
    limit = NODE_CAP if cap is None else cap
    n = count_nodes(p)
    if n > limit:
        raise CapExceeded(f"transformed proof has {n} nodes, above the cap of {limit}")
    return p


def report(sys: SystemSpec, before: ProofTerm, after: ProofTerm) -> TransformReport:
    want = before.conclusion()
    try:
        got = check_proof(sys, after)
        ok = got == want
    except ProofError:
        got, ok = after.conclusion(), False
    return TransformReport(want, got, sys.name, ok)


# ---------------------------------------------------------------- rebuilding

def rebuild(p: ProofTerm, leaf, memo: dict | None = None) -> ProofTerm:
    """Bottom-up copy of p where leaf(node, new_children) may return a replacement node.

    Nodes whose children are unchanged and that leaf leaves alone are kept by identity.
    """
    memo = {} if memo is None else memo

    def go(q):
        r = memo.get(id(q))
        if r is not None:
            return r[1]
        if isinstance(q, (Symm, RSPStar)):
            s = go(q.sub)
            new = q if s is q.sub else type(q)(s)
        elif isinstance(q, Cxt):
            s = go(q.sub)
            new = q if s is q.sub else Cxt(q.ctx, s)
        elif isinstance(q, (Trans, USPStar)):
            a, b = go(q.left), go(q.right)
            new = q if (a is q.left and b is q.right) else type(q)(a, b)
        elif isinstance(q, USP):
            prem = tuple(tuple(go(x) for x in pair) for pair in q.premises)
            same = all(x is y for pa, pb in zip(prem, q.premises) for x, y in zip(pa, pb))
            new = q if same else USP(prem, q.coeffs, q.consts)
        elif isinstance(q, (LCoind, Coind)):
            prem = tuple(go(x) for x in q.premises)
            same = all(x is y for x, y in zip(prem, q.premises))
            new = q if same else type(q)(prem, q.proof)
        else:
            new = q
        out = leaf(new)
        out = new if out is None else out
        memo[id(q)] = (q, out)
        return out

    return go(p)


def graft(p: ProofTerm, replacements: dict, memo: dict | None = None) -> ProofTerm:
    """Replace Assume(eq) nodes by replacements[eq] outside coinductive payloads."""
    def leaf(q):
        if isinstance(q, Assume):
            return replacements.get(q.eq)
        return None
    return rebuild(p, leaf, memo)


def graft_coindproof(cp: CoinductiveProof, replacements: dict) -> CoinductiveProof:
    memo: dict = {}
    certs = {k: graft(p, replacements, memo) for k, p in cp.certificates.items()}
    if all(certs[k] is cp.certificates[k] for k in certs):
        return cp
    return CoinductiveProof(cp.chart, cp.labels, certs, cp.witness)


# ---------------------------------------------------------------- coinductive -> Mil

def coindproof_to_mil(cp: CoinductiveProof, assumption_proofs: dict | None = None,
                      sys: SystemSpec | None = None, extractor: Extractor | None = None) -> ProofTerm:
    """Mil proof of the claim: equate both sides with the extracted solution at the start."""
    if cp.witness is None:
        raise CoinductiveProofInvalid("coinductive proof has no witness to extract from")
    if sys is not None:
        err = coindproof_errors(sys, cp, None, witnessed=True)
        if err is not None:
            raise CoinductiveProofInvalid(err)
    lc = cp.labeled_chart()
    ex = Extractor(lc) if extractor is None else extractor
    v = cp.chart.start
    left = equate_at(lc, cp.solution(0), v, ex)
    right = equate_at(lc, cp.solution(1), v, ex)
    p = Trans(left, Symm(right))
    if assumption_proofs:
        p = graft(p, assumption_proofs)
    return p


# ---------------------------------------------------------------- RSP* -> coinductive

def rsp_to_coindproof(e, f, g) -> CoinductiveProof:
    """Witnessed coinductive proof of e = f*.g over Mil- + {e = f.e + g}."""
    start = Prod(Star(f), g)
    lc = one_chart_interpretation(start)
    left = rsp_solution(e, f, g, lc)
    right = projection_solution(start, lc)
    return from_solutions(lc.chart, left, right, dict(lc.marks))


def mil_to_cmil1(p: ProofTerm, cap: int | None = None) -> ProofTerm:
    """Replace every RSP* node by a one-premise LCoind node."""
    def leaf(q):
        if isinstance(q, RSPStar):
            e, f, g = _rsp_shape(q.sub.conclusion())
            return LCoind((q.sub,), rsp_to_coindproof(e, f, g))
        return None
    return _cap(rebuild(p, leaf), cap)


def cmil_to_mil(p: ProofTerm, cap: int | None = None) -> ProofTerm:
    """Eliminate LCoind nodes bottom-up, discharging premise assumptions by grafting."""
    def leaf(q):
        if isinstance(q, Coind):
            raise CoinductiveProofInvalid("unwitnessed coinductive proofs cannot be eliminated")
        if isinstance(q, LCoind):
            repl = {x.conclusion(): x for x in q.premises}
            return coindproof_to_mil(q.proof, repl)
        return None
    return _cap(rebuild(p, leaf), cap)


# ---------------------------------------------------------------- cMil -> CLC

def wrap_equation(eq: FormalEquation, proof: ProofTerm, witnessed: bool = True) -> CoinductiveProof:
    """Coinductive proof of eq over 1C(lhs): the right side differs from the projection
    solution only at the start, each occurrence rewritten by `proof`."""
    e, f = eq.lhs, eq.rhs
    lc = one_chart_interpretation(e)
    chart = lc.chart
    ps = projection_solution(e, lc)
    st = chart.start
    right = dict(ps.values)
    right[st] = f
    certs = {}
    for v in chart.vertices:
        certs[(v, "left")] = ps.certificates[v]
        c = Chain(right[v])
        if v == st:
            c.step(Symm(proof) if e is not f else None)
        c.step(ps.certificates[v])
        outs = chart.out(v)
        for i, (_, _, w) in enumerate(outs):
            if w == st and e is not f:
                c.at((1,) + sum_path(len(outs), i) + (1,), proof)
        certs[(v, "right")] = c.proof()
    labels = {v: FormalEquation(ps[v], right[v]) for v in chart.vertices}
    return CoinductiveProof(chart, labels, certs, dict(lc.marks) if witnessed else None)


class _ToCLC:
    def __init__(self, cc: bool):
        self.cc = cc
        self.node = Coind if cc else LCoind
        self.memo: dict = {}

    def coind(self, q) -> ProofTerm:
        r = self.memo.get(id(q))
        if r is not None:
            return r[1]
        if isinstance(q, Coind) and not self.cc:
            raise CoinductiveProofInvalid("unwitnessed coinductive proof in a witnessed target")
        prem, repl = [], {}
        for x in q.premises:
            leaves, seg = self.segment(x)
            for l in leaves:
                if all(l.conclusion() != y.conclusion() for y in prem):
                    prem.append(l)
            repl[x.conclusion()] = seg
        cp = graft_coindproof(q.proof, repl)
        if (isinstance(q, self.node) and cp is q.proof and len(prem) == len(q.premises)
                and all(a is b for a, b in zip(prem, q.premises))):
            out = q
        else:
            out = self.node(tuple(prem), cp)
        self.memo[id(q)] = (q, out)
        return out

    def segment(self, p):
        """(converted coinductive leaves, p with those leaves replaced by Assume nodes)."""
        leaves = []

        def leaf(q):
            if isinstance(q, (LCoind, Coind)):
                c = self.coind(q)
                leaves.append(c)
                return Assume(c.conclusion())
            if isinstance(q, (RSPStar, USPStar, USP)):
                raise ProofError("fixed-point rules cannot be merged into coinductive premises")
            return None

        seg = _rebuild_top_down(p, leaf)
        return leaves, seg

    def top(self, p):
        if isinstance(p, (LCoind, Coind)):
            return self.coind(p)
        leaves, seg = self.segment(p)
        cp = wrap_equation(p.conclusion(), seg, witnessed=not self.cc)
        return self.node(tuple(leaves), cp)


def _rebuild_top_down(p, leaf):
    """Like rebuild, but coinductive nodes are handed to leaf before their premises."""
    memo: dict = {}

    def go(q):
        r = memo.get(id(q))
        if r is not None:
            return r[1]
        if isinstance(q, (LCoind, Coind)):
            out = leaf(q)
        elif isinstance(q, (Symm, RSPStar)):
            s = go(q.sub)
            out = q if s is q.sub else type(q)(s)
        elif isinstance(q, Cxt):
            s = go(q.sub)
            out = q if s is q.sub else Cxt(q.ctx, s)
        elif isinstance(q, Trans):
            a, b = go(q.left), go(q.right)
            out = q if (a is q.left and b is q.right) else Trans(a, b)
        else:
            out = leaf(q) or q
        memo[id(q)] = (q, out)
        return out

    return go(p)


def cmil_to_clc(p: ProofTerm, cc: bool = False, cap: int | None = None) -> ProofTerm:
    """Merge Mil- segments between coinductive nodes into their premise sets."""
    return _cap(_ToCLC(cc).top(p), cap)


# ---------------------------------------------------------------- CC completeness

def product_chart(c1: OneChart, c2: OneChart, rel: set) -> OneChart:
    """Pairs of rel reachable from the starts; joint steps into rel."""
    st = (c1.start, c2.start)
    name = lambda u, w: f"{u} | {w}"  # noqa: E731
    seen = {st}
    order = [st]
    trs = []
    i = 0
    while i < len(order):
        u, w = order[i]
        i += 1
        for (_, a, u2) in c1.out(u):
            for (_, b, w2) in c2.out(w):
                if a == b and (u2, w2) in rel:
                    trs.append((name(u, w), a, name(u2, w2)))
                    if (u2, w2) not in seen:
                        seen.add((u2, w2))
                        order.append((u2, w2))
    verts = [name(u, w) for (u, w) in order]
    term = [name(u, w) for (u, w) in order if c1.is_terminating(u)]
    alpha = tuple(sorted(set(c1.alphabet.actions) | set(c2.alphabet.actions)))
    payload = {name(u, w): (u, w) for (u, w) in order}
    return OneChart.build(verts, name(*st), trs, term, alpha, payload)


def _transfer(prod: OneChart, base: OneChart, cs: CertifiedSolution, side: int) -> CertifiedSolution:
    vals = {v: cs[prod.payload[v][side]] for v in prod.vertices}
    certs = {}
    for v in prod.vertices:
        x = prod.payload[v][side]
        rhs = correctness_rhs(prod, v, vals)
        bridge = aci_join(correctness_rhs(base, x, cs.values), rhs)
        if bridge is None:
            raise NotBisimilar(f"product vertex {v} does not match its component's steps")
        certs[v] = trans(cs.certificates[x], bridge) or cs.certificates[x]
    return CertifiedSolution(vals, MIL_MINUS, certs)


def complete_cc_proof(e, f) -> ProofTerm:
    """CC proof of e = f built along a bisimulation between C(e) and C(f)."""
    c1, c2 = chart_interpretation(e), chart_interpretation(f)
    rel = find_one_bisimulation(c1, c2)
    if rel is None or (c1.start, c2.start) not in rel:
        raise NotBisimilar(f"{e} and {f} are not bisimilar")
    prod = product_chart(c1, c2, rel)
    left = _transfer(prod, c1, fundamental_certificate_chart(e, c1), 0)
    right = _transfer(prod, c2, fundamental_certificate_chart(f, c2), 1)
    cp = from_solutions(prod, left, right)
    return Coind((), cp)
