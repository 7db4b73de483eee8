"""Randomized property sweeps shared by the CLI, scripts and the acceptance suite."""
from __future__ import annotations

import random

from .bisim import bisimilar, check_projection_bisimulation
from .charts import one_chart_interpretation
from .extraction import Extractor, certify_extraction, equate_solutions
from .kernel import CC, MIL, MIL_PRIME, check_proof, interderive_fixed_point_rules
from .lee import validate_witness
from .randgen import random_expr, random_exprs, random_mil_proof, random_rewrites, random_rsp_instance
from .rewriting import star_fixpoint_proof
from .solutions import projection_solution, solution_errors
from .syntax import Prod, Star
from .transform import complete_cc_proof


def _suite(fn, items):
    failures = []
    for x in items:
        try:
            if not fn(x):
                failures.append(str(x))
        except Exception as exc:  # a crash counts as a failure of that item
            failures.append(f"{x}: {type(exc).__name__}: {exc}")
    return {"checked": len(items), "failures": len(failures), "examples": failures[:3]}


def witness_ok(e) -> bool:
    return validate_witness(one_chart_interpretation(e), require_guarded=True).valid


def projection_certs_ok(e) -> bool:
    lc = one_chart_interpretation(e)
    return not solution_errors(projection_solution(e, lc), lc.chart)


def extraction_ok(e) -> bool:
    lc = one_chart_interpretation(e)
    ex = Extractor(lc)
    cs = certify_extraction(lc)
    if solution_errors(cs, lc.chart):
        return False
    ps = projection_solution(e, lc)
    for w, p in equate_solutions(lc, ps, ex).items():
        c = check_proof(MIL, p)
        if c.lhs is not ps[w] or c.rhs is not cs[w]:
            return False
    return True


def run_sweep(seed: int = 0, count: int = 100, max_ops: int = 14) -> dict:
    exprs = random_exprs(seed, count, max_ops)
    res = {
        "witness": _suite(witness_ok, exprs),
        "projection-bisimulation": _suite(check_projection_bisimulation, exprs),
        "projection-certificates": _suite(projection_certs_ok, exprs),
        "extraction": _suite(extraction_ok, exprs),
    }
    rng = random.Random(seed + 1)
    proofs = [random_mil_proof(rng) for _ in range(count)]

    def sound(p):
        c = check_proof(MIL, p)
        return bisimilar(c.lhs, c.rhs)

    res["mil-soundness"] = _suite(sound, proofs)

    def interderive(_):
        prem, e, f, g = random_rsp_instance(rng)
        want = (e, Prod(Star(f), g))
        p1 = interderive_fixed_point_rules("rsp*->mil'", [prem])
        p2 = interderive_fixed_point_rules("usp*->mil", [prem, star_fixpoint_proof(f, g)])
        c1, c2 = check_proof(MIL_PRIME, p1), check_proof(MIL, p2)
        return (c1.lhs, c1.rhs) == want and (c2.lhs, c2.rhs) == want

    res["interderivation"] = _suite(interderive, range(max(1, count // 5)))

    def cc(_):
        e = random_expr(rng, rng.randint(0, 10))
        e2, _p = random_rewrites(rng, e, rng.randint(1, 6))
        c = check_proof(CC, complete_cc_proof(e, e2))
        return c.lhs is e and c.rhs is e2

    res["cc-completeness"] = _suite(cc, range(max(1, count // 5)))
    return res
