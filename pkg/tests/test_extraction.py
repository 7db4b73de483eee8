import pytest
from hypothesis import given

from conftest import exprs
from oracles import aci_key, naive_bisimilar
from milnerkit import fixtures as fx
from milnerkit.charts import LabeledChart, OneChart, one_chart_interpretation
from milnerkit.errors import SynthesisError, WitnessError
from milnerkit.extraction import (Extractor, certify_extraction, chain_certificate,
                                  equate_solutions, extract, simplify)
from milnerkit.kernel import MIL, MIL_MINUS, RSPStar, check_proof, iter_nodes
from milnerkit.solutions import correctness_equation, projection_solution, solution_errors
from milnerkit.syntax import parse_expr
from milnerkit.randgen import size

E = parse_expr


def test_chart_c_relative_extraction():
    ex = Extractor(fx.chart_c())
    assert ex.t("v21", "v2") is E("0*.(1.1)")
    tab = extract(fx.chart_c())
    assert tab.relative[("v21", "v2")] is E("0*.(1.1)")
    assert tab.relative[("vs", "vs")] is E("1")
    with pytest.raises(SynthesisError):
        ex.t("vs", "v2")


def test_chart_c_simplified_solution():
    ex = Extractor(fx.chart_c())
    s = ex.s("vs")
    s2, p = simplify(s)
    c = check_proof(MIL_MINUS, p)
    assert c.lhs is s and c.rhs is s2
    assert aci_key(s2) == aci_key(E("(a.(a*.b*)+b.b*)*"))
    assert naive_bisimilar(s, E("(a*.b*)*"))


def test_alternative_witness_extraction():
    lc = fx.chart_c_alternative_witness()
    cs = certify_extraction(lc)
    assert solution_errors(cs, lc.chart) == []
    assert naive_bisimilar(cs[lc.chart.start], E("(a*.b*)*"))


def test_unguarded_witness_rejected():
    c = OneChart.build(["x", "y"], "x", [("x", "1", "y"), ("y", "a", "x")])
    lc = LabeledChart(c, {("x", "1", "y"): 1, ("y", "a", "x"): 0})
    with pytest.raises(WitnessError):
        Extractor(lc)


@given(exprs(("a", "b", "c"), 10))
def test_extraction_certificates(e):
    lc = one_chart_interpretation(e)
    cs = certify_extraction(lc)
    assert solution_errors(cs, lc.chart) == []
    for v in lc.chart.vertices:
        eq = check_proof(MIL_MINUS, Extractor(lc).certificate(v))
        assert eq == correctness_equation(lc.chart, v, cs.values)
    assert naive_bisimilar(cs[lc.chart.start], e)


@given(exprs(max_leaves=10))
def test_chain_certificates(e):
    lc = one_chart_interpretation(e)
    ex = Extractor(lc)
    for (v, w) in ex.desc:
        c = check_proof(MIL_MINUS, chain_certificate(lc, w, v))
        assert c.lhs is ex.s(w) and c.rhs.left is ex.t(w, v) and c.rhs.right is ex.s(v)


@given(exprs(("a", "b", "c"), 10))
def test_equate_solutions(e):
    lc = one_chart_interpretation(e)
    ex = Extractor(lc)
    ps = projection_solution(e, lc)
    for w, p in equate_solutions(lc, ps, ex).items():
        c = check_proof(MIL, p)
        assert c.lhs is ps[w] and c.rhs is ex.s(w)


def test_equate_uses_fixed_point_rule():
    lc = fx.chart_c()
    ps = projection_solution(E(fx.C_EXPR), lc)
    p = equate_solutions(lc, ps)["vs"]
    assert any(isinstance(q, RSPStar) for q in iter_nodes(p))


@given(exprs(max_leaves=12))
def test_simplify_certified(e):
    e2, p = simplify(e)
    if p is None:
        assert e2 is e
    else:
        c = check_proof(MIL_MINUS, p)
        assert c.lhs is e and c.rhs is e2
    assert size(e2) <= size(e)
    assert naive_bisimilar(e, e2)
