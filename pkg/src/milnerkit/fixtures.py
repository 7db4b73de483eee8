"""Worked example charts, witnesses and proofs used by tests, scripts and the CLI."""
from __future__ import annotations

from .charts import LabeledChart, OneChart, one_chart_interpretation
from .coind import CoinductiveProof, from_solutions
from .kernel import RSPStar
from .rewriting import Chain
from .solutions import (CertifiedSolution, correctness_rhs, projection_solution,
                        prove_solution_step)
from .syntax import FormalEquation, Prod, Star, parse_expr
from .kernel import MIL_MINUS

E = parse_expr


def rename(lc: LabeledChart, names: dict) -> LabeledChart:
    """Rename vertices of a labeled chart (payload kept under the new names)."""
    c = lc.chart
    m = lambda v: names.get(v, v)  # noqa: E731
    trs = [(m(s), a, m(t)) for (s, a, t) in c.transitions]
    pl = None if c.payload is None else {m(v): c.payload[v] for v in c.vertices}
    c2 = OneChart.build([m(v) for v in c.vertices], m(c.start), trs,
                        [m(v) for v in c.terminating], c.alphabet, pl)
    return LabeledChart(c2, {(m(s), a, m(t)): k for (s, a, t), k in lc.marks.items()})


def _by_payload(lc: LabeledChart, table: dict) -> dict:
    """Map chart vertex ids to names via their payload expressions (internal syntax)."""
    inv = {E(text, internal=True): name for name, text in table.items()}
    return {v: inv[lc.chart.payload[v]] for v in lc.chart.vertices}


# ---------------------------------------------------------------- chart C

C_EXPR = "(a*.b*)*"
C_PAYLOADS = {
    "vs": "(a* . b*)*",
    "v1": "(a* . b*) @ (a* . b*)*",
    "v11": "((1 @ a*) . b*) @ (a* . b*)*",
    "v2": "b* @ (a* . b*)*",
    "v21": "(1 @ b*) @ (a* . b*)*",
}


def chart_c() -> LabeledChart:
    """The 5-vertex 1-chart of (a*.b*)* with named vertices and its 1-chart witness."""
    lc = one_chart_interpretation(E(C_EXPR))
    return rename(lc, _by_payload(lc, C_PAYLOADS))


def chart_c_alternative_witness() -> LabeledChart:
    """Same chart, entries of both inner loops and both outer entries at separate stages."""
    lc = chart_c()
    marks = {t: 0 for t in lc.chart.transitions}
    marks[("vs", "a", "v11")] = 3
    marks[("vs", "b", "v21")] = 3
    marks[("v1", "a", "v11")] = 1
    marks[("v2", "b", "v21")] = 2
    return LabeledChart(lc.chart, marks)


# ---------------------------------------------------------------- chart E (layering)

def chart_e() -> OneChart:
    trs = [("v", "a", "u"), ("v", "b", "w1"), ("u", "b", "w1"), ("u", "a", "u"),
           ("w1", "a", "w2"), ("w2", "b", "v")]
    return OneChart.build(["v", "u", "w1", "w2"], "v", trs, [])


def chart_e_bad_witness() -> LabeledChart:
    """Two loop levels tangle: the stage-3 entry lies inside an earlier loop body."""
    c = chart_e()
    marks = {t: 0 for t in c.transitions}
    marks[("v", "b", "w1")] = 1
    marks[("u", "a", "u")] = 2
    marks[("w1", "a", "w2")] = 3
    return LabeledChart(c, marks)


def chart_e_good_witness() -> LabeledChart:
    c = chart_e()
    marks = {t: 0 for t in c.transitions}
    marks[("v", "b", "w1")] = 1
    marks[("u", "a", "u")] = 2
    marks[("v", "a", "u")] = 3
    return LabeledChart(c, marks)


# ---------------------------------------------------------------- non-LEE charts

def chart_g1() -> OneChart:
    """Two-vertex cycle whose only loop candidates have a terminating body vertex."""
    return OneChart.build(["x1", "x2"], "x1", [("x1", "a", "x2"), ("x2", "b", "x1")],
                          ["x1", "x2"])


def chart_g2() -> OneChart:
    """Three vertices, every pair linked both ways: no loop elimination run exists."""
    trs = [("y1", "a2", "y2"), ("y1", "a3", "y3"), ("y2", "a1", "y1"), ("y2", "a3", "y3"),
           ("y3", "a1", "y1"), ("y3", "a2", "y2")]
    return OneChart.build(["y1", "y2", "y3"], "y1", trs, [])


# ---------------------------------------------------------------- coinductive proofs

def _certified(chart: OneChart, values: dict) -> CertifiedSolution:
    certs = {v: prove_solution_step(values[v], correctness_rhs(chart, v, values))
             for v in chart.vertices}
    return CertifiedSolution(values, MIL_MINUS, certs)


def example_coindproof() -> CoinductiveProof:
    """(a*.b*)* = (a+b)* over chart C; right side (a+b)* with 1.(a+b)* after 1-steps."""
    lc = chart_c()
    left = projection_solution(E(C_EXPR), lc)
    g = E("(a+b)*")
    rv = {v: (Prod(E("1"), g) if v in ("v11", "v21") else g) for v in lc.chart.vertices}
    return from_solutions(lc.chart, left, _certified(lc.chart, rv), dict(lc.marks))


INTRO_H = "a.(a+b)+b"


def intro_coindproof() -> CoinductiveProof:
    """(a+b)*.0 = (a.(a+b)+b)*.0 over the 3-vertex 1-chart of the right side."""
    h = E(INTRO_H)
    start = Prod(Star(h), E("0"))
    lc = one_chart_interpretation(start)
    right = projection_solution(start, lc)
    g0 = E("(a+b)*.0")
    inner = E("(1.(a+b)*).0")
    lv = {v: (g0 if v == lc.chart.start else inner) for v in lc.chart.vertices}
    return from_solutions(lc.chart, _certified(lc.chart, lv), right, dict(lc.marks))


def intro_rsp_instance():
    """(e, f, g) of the RSP* instance mimicked by the introductory coinductive proof."""
    return E("(a+b)*.0"), E(INTRO_H), E("0")


def rsp_example_instance():
    """(e, f, g) with the 7-vertex chart of ((a.a*+b).b*)*."""
    return E("(a+b)*"), E("(a.a*+b).b*"), E("1")


def intro_rsp_derivation():
    """Mil derivation of (a+b)*.0 = (a.(a+b)+b)*.0 by a single RSP* step."""
    e, f, g = intro_rsp_instance()
    a, b = E("a"), E("b")
    unfold = prove_solution_step(e, E("a.((a+b)*.0) + b.((a+b)*.0)"))   # e = a.e + b.e
    c = Chain(e).step(unfold)
    c.at((0, 1), unfold)                                                   # a.(a.e + b.e) + b.e
    c.join(E("(a.(a+b)+b).((a+b)*.0) + 0"))
    return RSPStar(c.proof())


NON_EXAMPLE_RSP = ("(a+b)*", "a+1", "1")           # guard fails: f terminates
NON_BISIMILAR = ("(a+c)*", "(a+1)*.1")


# ---------------------------------------------------------------- fixture corpus

SEVEN_EXPR = "((a.a*+b).b*)*"
_F = "((a . a* + b) . b*)*"
SEVEN_PAYLOADS = {
    "v": _F,
    "v11": f"((1 @ a*) . b*) @ {_F}",
    "v11'": f"((1 . a*) . b*) @ {_F}",
    "v1": f"(a* . b*) @ {_F}",
    "v21": f"(1 @ b*) @ {_F}",
    "v21'": f"(1 . b*) @ {_F}",
    "v2": f"b* @ {_F}",
}
SEVEN_MARKS = {("v", "a", "v11'"): 2, ("v", "b", "v21'"): 2,
               ("v1", "a", "v11"): 1, ("v2", "b", "v21"): 1}

# lhs, rhs of the labels of the mimicking proof, keyed by the 1-chart payload
INTRO_LABELS = {
    "(a.(a+b)+b)*.0": ("(a+b)*.0", "(a.(a+b)+b)*.0"),
    "(1.(a+b) @ (a.(a+b)+b)*).0": ("(1.(a+b)).((a+b)*.0)", "((1.(a+b)).(a.(a+b)+b)*).0"),
    "(1 @ (a.(a+b)+b)*).0": ("1.((a+b)*.0)", "(1.(a.(a+b)+b)*).0"),
}


def seven_vertex_chart() -> LabeledChart:
    """1-chart of ((a.a*+b).b*)* with its vertices named by payload."""
    lc = one_chart_interpretation(E(SEVEN_EXPR))
    return rename(lc, _by_payload(lc, SEVEN_PAYLOADS))


def _expect(cond, msg):
    if not cond:
        raise AssertionError(msg)


def _raises(exc, fn, *args, **kw):
    try:
        fn(*args, **kw)
    except exc as x:
        return x
    raise AssertionError(f"{getattr(fn, '__name__', fn)} did not raise {exc.__name__}")


def fx_seven_vertex_chart():
    lc = one_chart_interpretation(E(SEVEN_EXPR))
    want = {E(t, internal=True) for t in SEVEN_PAYLOADS.values()}
    got = set(lc.chart.payload.values())
    _expect(len(lc.chart.vertices) == 7 and got == want, "payloads differ from the expected ones")
    named = seven_vertex_chart()
    marked = {t: m for t, m in named.marks.items() if m > 0}
    _expect(marked == SEVEN_MARKS, f"entry marks {marked}")


def fx_chart_c_witnesses():
    from .lee import eliminate_loop, loop_subchart_at, validate_witness
    _expect(validate_witness(chart_c(), require_guarded=True).valid, "chart C witness rejected")
    alt = chart_c_alternative_witness()
    _expect(validate_witness(alt, require_guarded=True).valid, "alternative witness rejected")
    cur = alt.chart
    for n in (1, 2, 3):
        by_src: dict = {}
        for t, m in alt.marks.items():
            if m == n:
                by_src.setdefault(t[0], []).append(t)
        for v, U in by_src.items():
            cur = eliminate_loop(cur, loop_subchart_at(cur, v, U))
    _expect(list(cur.vertices) == ["vs"],
            f"after three rounds: {cur.vertices}")


def fx_chart_c_extraction():
    from .bisim import bisimilar
    from .extraction import Extractor, simplify
    from .kernel import check_proof
    from .syntax import aci_normalize
    ex = Extractor(chart_c())
    _expect(ex.t("v21", "v2") is E("0*.(1.1)"), f"t(v21,v2) = {ex.t('v21', 'v2')}")
    s = ex.s("vs")
    s2, p = simplify(s)
    if p is not None:
        c = check_proof(MIL_MINUS, p)
        _expect(c.lhs is s and c.rhs is s2, "simplifier certificate has the wrong conclusion")
    _expect(aci_normalize(s2) is aci_normalize(E("(a.(a*.b*)+b.b*)*")), f"simplified to {s2}")
    _expect(bisimilar(s, E(C_EXPR)), "extracted solution not bisimilar to (a*.b*)*")


def fx_chart_e_layering():
    from .lee import validate_witness
    bad = validate_witness(chart_e_bad_witness())
    _expect(not bad.valid and bad.violation[1] == "layering", f"bad witness: {bad}")
    _expect(validate_witness(chart_e_good_witness()).valid, "good witness rejected")


def fx_non_lee_charts():
    from .errors import LoopError, WitnessError
    from .lee import infer_witness, loop_subchart_at
    for c in (chart_g1(), chart_g2()):
        _raises(WitnessError, infer_witness, c, exhaustive=True)
    err = _raises(LoopError, loop_subchart_at, chart_g1(), "x1", [("x1", "a", "x2")])
    _expect(err.condition == "L3", f"G1 loop candidate fails {err.condition}, not L3")


def fx_example_coindproof():
    from .bisim import bisimilar
    from .coind import check_coindproof
    from .kernel import MIL, RSPStar, check_proof, uses_rule
    from .transform import coindproof_to_mil
    cp = example_coindproof()
    claim = FormalEquation(E(C_EXPR), E("(a+b)*"))
    _expect(check_coindproof(MIL_MINUS, cp, claim, witnessed=True), "coinductive proof rejected")
    p = coindproof_to_mil(cp)
    c = check_proof(MIL, p)
    _expect(c.lhs is claim.lhs and c.rhs is claim.rhs, f"Mil proof concludes {c}")
    _expect(uses_rule(p, RSPStar), "Mil proof does not use RSP*")
    _expect(bisimilar(claim.lhs, claim.rhs), "oracle: sides not bisimilar")


def fx_intro_coindproof():
    from .coind import check_coindproof
    from .kernel import MIL, check_proof
    from .transform import coindproof_to_mil
    cp = intro_coindproof()
    claim = FormalEquation(E("(a+b)*.0"), Prod(Star(E(INTRO_H)), E("0")))
    _expect(check_coindproof(MIL_MINUS, cp, claim, witnessed=True), "coinductive proof rejected")
    _expect(len(cp.chart.vertices) == 3, "expected 3 vertices")
    c = check_proof(MIL, coindproof_to_mil(cp))
    _expect((c.lhs, c.rhs) == (claim.lhs, claim.rhs), f"Mil proof concludes {c}")


def fx_rsp_pipeline():
    from .coind import check_coindproof
    from .kernel import CMIL, MIL, check_proof, count_nodes
    from .solutions import rsp_premise
    from .kernel import LCoind
    from .transform import cmil_to_mil, mil_to_cmil1, rsp_to_coindproof
    e, f, g = intro_rsp_instance()
    cp = rsp_to_coindproof(e, f, g)
    _expect(len(cp.chart.vertices) == 3, "expected 3 vertices")
    want = {E(k, internal=True): (E(l), E(r)) for k, (l, r) in INTRO_LABELS.items()}
    for v in cp.chart.vertices:
        eq = cp.labels[v]
        _expect(want.get(cp.chart.payload[v]) == (eq.lhs, eq.rhs), f"label at {v}: {eq}")
    sys = MIL_MINUS.with_assumptions([rsp_premise(e, f, g)])
    _expect(check_coindproof(sys, cp, witnessed=True), "mimicking proof rejected")
    d = intro_rsp_derivation()
    concl = check_proof(MIL, d)
    d1 = mil_to_cmil1(d)
    c1 = check_proof(CMIL, d1)
    _expect(count_nodes(d1, (LCoind,)) == 1, "expected one LCoind node")
    d2 = cmil_to_mil(d1)
    c2 = check_proof(MIL, d2)
    _expect(concl == c1 == c2 and concl.lhs is e and concl.rhs is Prod(Star(f), g),
            f"conclusions {concl} / {c1} / {c2}")


def fx_seven_vertex_rsp():
    from .coind import check_coindproof
    from .solutions import rsp_premise
    from .transform import rsp_to_coindproof
    e, f, g = rsp_example_instance()
    cp = rsp_to_coindproof(e, f, g)
    _expect(len(cp.chart.vertices) == 7, f"{len(cp.chart.vertices)} vertices")
    sys = MIL_MINUS.with_assumptions([rsp_premise(e, f, g)])
    _expect(check_coindproof(sys, cp, witnessed=True), "mimicking proof rejected")


def fx_rsp_guard_violation():
    from .errors import SideConditionViolation
    from .kernel import MIL, Assume, RSPStar, check_proof
    from .solutions import rsp_premise
    e, f, g = (E(x) for x in NON_EXAMPLE_RSP)
    p = RSPStar(Assume(rsp_premise(e, f, g)))
    sys = MIL.with_assumptions([rsp_premise(e, f, g)])
    err = _raises(SideConditionViolation, check_proof, sys, p)
    _expect(err.guard == "a + 1", f"guard reported as {err.guard}")


def fx_non_bisimilar_cc():
    from .errors import NotBisimilar
    from .transform import complete_cc_proof
    _raises(NotBisimilar, complete_cc_proof, *(E(x) for x in NON_BISIMILAR))


def fx_cc_example():
    from .kernel import CC, check_proof
    from .transform import complete_cc_proof
    c = check_proof(CC, complete_cc_proof(E(C_EXPR), E("(a+b)*")))
    _expect(c.lhs is E(C_EXPR) and c.rhs is E("(a+b)*"), f"CC proof concludes {c}")


FIXTURES = {
    "seven-vertex-chart": fx_seven_vertex_chart,
    "chart-c-witnesses": fx_chart_c_witnesses,
    "chart-c-extraction": fx_chart_c_extraction,
    "chart-e-layering": fx_chart_e_layering,
    "non-lee-charts": fx_non_lee_charts,
    "example-coindproof": fx_example_coindproof,
    "intro-coindproof": fx_intro_coindproof,
    "rsp-pipeline": fx_rsp_pipeline,
    "seven-vertex-rsp": fx_seven_vertex_rsp,
    "rsp-guard-violation": fx_rsp_guard_violation,
    "non-bisimilar-cc": fx_non_bisimilar_cc,
    "cc-example": fx_cc_example,
}


def run_fixtures(names=None, fixtures: dict | None = None) -> list:
    """Run the fixture corpus; one dict {name, ok, seconds, message} per fixture."""
    import time
    fixtures = FIXTURES if fixtures is None else fixtures
    out = []
    for name in (names or list(fixtures)):
        t0 = time.perf_counter()
        try:
            fixtures[name]()
            ok, msg = True, ""
        except Exception as exc:  # a failing fixture is reported, not raised
            ok, msg = False, f"{type(exc).__name__}: {exc}"
        out.append({"name": name, "ok": ok, "seconds": round(time.perf_counter() - t0, 4),
                    "message": msg})
    return out
