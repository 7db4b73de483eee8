"""Coinductive proofs: equation-labeled 1-charts with certified solutions on both sides."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .charts import LabeledChart, OneChart, chart_from_json, one_chart_interpretation
from .errors import ChartError, CoinductiveProofInvalid, ProofError
from .kernel import MIL_MINUS, ProofTerm, SystemSpec, check_proof
from .lee import validate_witness
from .rewriting import aci_join
from .solutions import (CertifiedSolution, bridge, correctness_equation, label_expr,
                        projection_solution)
from .syntax import ONE, ZERO, FormalEquation, Prod, parse_expr, render_expr, sum_of

SIDES = ("left", "right")


@dataclass(eq=False)
class CoinductiveProof:
    chart: OneChart
    labels: dict                 # vertex -> FormalEquation
    certificates: dict           # (vertex, "left" | "right") -> ProofTerm
    witness: dict | None = None  # transition -> mark

    def claim(self) -> FormalEquation:
        return self.labels[self.chart.start]

    def side(self, i: int) -> dict:
        return {v: (eq.lhs if i == 0 else eq.rhs) for v, eq in self.labels.items()}

    def solution(self, i: int, system: SystemSpec = MIL_MINUS) -> CertifiedSolution:
        s = SIDES[i]
        return CertifiedSolution(self.side(i), system,
                                 {v: self.certificates[(v, s)] for v in self.chart.vertices
                                  if (v, s) in self.certificates})

    def labeled_chart(self) -> LabeledChart:
        if self.witness is None:
            raise CoinductiveProofInvalid("the coinductive proof carries no witness")
        return LabeledChart(self.chart, self.witness)


def coindproof_diagnostic(sys: SystemSpec, cp: CoinductiveProof, claimed: FormalEquation | None,
                          witnessed: bool | None = None):
    """(vertex or None, message) for the first failing condition, or None when valid.

    witnessed=True demands a guarded valid witness, None validates a witness only if present.
    """
    chart = cp.chart
    if not chart.is_weakly_guarded():
        return None, "chart is not weakly guarded"
    missing = [v for v in chart.vertices if v not in cp.labels]
    if missing:
        return missing[0], "vertex carries no equation label"
    if claimed is not None and cp.claim() != claimed:
        return chart.start, f"start label {cp.claim()} does not match the claim {claimed}"
    checker_memo: dict = {}
    for v in chart.vertices:
        for i, s in enumerate(SIDES):
            p = cp.certificates.get((v, s))
            if p is None:
                return v, f"missing {s} certificate"
            want = correctness_equation(chart, v, cp.side(i))
            try:
                c = checker_memo.get(id(p))
                if c is None:
                    c = check_proof(sys, p)
                    checker_memo[id(p)] = c
            except ProofError as exc:
                return v, f"{s} certificate does not check: {exc}"
            if bridge(p, want, c) is None:
                return v, f"{s} certificate concludes {c}, expected {want}"
    if witnessed or (witnessed is None and cp.witness is not None):
        if cp.witness is None:
            return None, "a witnessed coinductive proof needs a witness"
        try:
            lc = cp.labeled_chart()
        except ChartError as exc:
            return None, f"malformed witness: {exc}"
        rep = validate_witness(lc, require_guarded=bool(witnessed))
        if not rep.valid:
            return None, f"witness rejected at stage {rep.violation[0]}: {rep.violation[1]}"
    return None


def coindproof_errors(sys: SystemSpec, cp: CoinductiveProof, claimed: FormalEquation | None,
                      witnessed: bool | None = None) -> str | None:
    d = coindproof_diagnostic(sys, cp, claimed, witnessed)
    if d is None:
        return None
    v, msg = d
    return msg if v is None else f"vertex {v}: {msg}"


def check_coindproof(sys: SystemSpec, cp: CoinductiveProof, claimed: FormalEquation | None = None,
                     witnessed: bool | None = None) -> bool:
    if witnessed is None and sys.witnessed_coind:
        witnessed = True
    return coindproof_errors(sys, cp, claimed, witnessed) is None


def require_coindproof(sys: SystemSpec, cp: CoinductiveProof, claimed=None, witnessed=None):
    d = coindproof_diagnostic(sys, cp, claimed, witnessed)
    if d is not None:
        raise CoinductiveProofInvalid(d[1], d[0])


def refl_coindproof(e) -> CoinductiveProof:
    lc = one_chart_interpretation(e)
    ps = projection_solution(e, lc)
    labels = {v: FormalEquation(ps[v], ps[v]) for v in lc.chart.vertices}
    certs = {}
    for v in lc.chart.vertices:
        certs[(v, "left")] = certs[(v, "right")] = ps.certificates[v]
    return CoinductiveProof(lc.chart, labels, certs, dict(lc.marks))


def swap_coindproof(cp: CoinductiveProof) -> CoinductiveProof:
    labels = {v: eq.swap() for v, eq in cp.labels.items()}
    certs = {(v, "right" if s == "left" else "left"): p for (v, s), p in cp.certificates.items()}
    return CoinductiveProof(cp.chart, labels, certs, cp.witness)


def from_solutions(chart: OneChart, left: CertifiedSolution, right: CertifiedSolution,
                   witness: dict | None = None) -> CoinductiveProof:
    labels = {v: FormalEquation(left[v], right[v]) for v in chart.vertices}
    certs = {}
    for v in chart.vertices:
        certs[(v, "left")] = left.certificates[v]
        certs[(v, "right")] = right.certificates[v]
    return CoinductiveProof(chart, labels, certs, witness)


def up_to_relation(cp: CoinductiveProof) -> set:
    """Pairs (1?(v) + sum a.L1(target), 1?(v) + sum a.L2(target)) per vertex."""
    rel = set()
    for v in cp.chart.vertices:
        const = ONE if cp.chart.is_terminating(v) else ZERO
        pair = []
        for i in (0, 1):
            s = cp.side(i)
            pair.append(sum_of([const] + [Prod(label_expr(a), s[w]) for (_, a, w) in cp.chart.out(v)]))
        rel.add(tuple(pair))
    return rel


def close_with_aci(cp: CoinductiveProof) -> CoinductiveProof:
    """Fill in missing certificates whose obligations hold up to ACI."""
    certs = dict(cp.certificates)
    for v in cp.chart.vertices:
        for i, s in enumerate(SIDES):
            if (v, s) in certs:
                continue
            want = correctness_equation(cp.chart, v, cp.side(i))
            p = aci_join(want.lhs, want.rhs)
            if p is None:
                raise CoinductiveProofInvalid(
                    f"{s} obligation {want} is not ACI-decidable; supply a certificate", v)
            certs[(v, s)] = p
    return CoinductiveProof(cp.chart, cp.labels, certs, cp.witness)


# ---------------------------------------------------------------- JSON

def coindproof_to_json(cp: CoinductiveProof) -> dict:
    from .sexpr import dump_proof
    labels = {}
    for v in cp.chart.vertices:
        eq = cp.labels[v]
        d = {"lhs": render_expr(eq.lhs), "rhs": render_expr(eq.rhs)}
        for s, key in (("left", "cert_l"), ("right", "cert_r")):
            p = cp.certificates.get((v, s))
            if p is not None:
                d[key] = dump_proof(p)
        labels[v] = d
    return {"chart": cp.chart.to_json(cp.witness), "labels": labels}


def coindproof_from_json(d: dict, base_dir: str | None = None) -> CoinductiveProof:
    from .sexpr import load_proof, load_proof_file
    if "chart" not in d or "labels" not in d:
        raise ChartError("coinductive proof file needs 'chart' and 'labels'")
    chart, marks = chart_from_json(d["chart"])
    labels, certs = {}, {}
    for v, item in d["labels"].items():
        labels[v] = FormalEquation(parse_expr(item["lhs"]), parse_expr(item["rhs"]))
        for s, key in (("left", "cert_l"), ("right", "cert_r")):
            src = item.get(key)
            if src is None:
                continue
            if src.lstrip().startswith("("):
                certs[(v, s)] = load_proof(src, base_dir)
            else:
                certs[(v, s)] = load_proof_file(os.path.join(base_dir or ".", src))
    return CoinductiveProof(chart, labels, certs, marks)


def load_coindproof(path: str) -> CoinductiveProof:
    with open(path) as fh:
        return coindproof_from_json(json.load(fh), os.path.dirname(os.path.abspath(path)))


def save_coindproof(cp: CoinductiveProof, path: str):
    with open(path, "w") as fh:
        json.dump(coindproof_to_json(cp), fh, indent=2)
