import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exprs
from oracles import naive_bisimilar
from milnerkit.charts import chart_interpretation, one_chart_interpretation, project
from milnerkit.errors import SideConditionViolation, SynthesisError
from milnerkit.kernel import MIL_MINUS, check_proof
from milnerkit.randgen import random_rsp_instance
from milnerkit.solutions import (CertifiedSolution, correctness_equation, fundamental_certificate_chart,
                                 guard_transform, projection_solution, rsp_premise, rsp_solution,
                                 solution_errors, unfold)
from milnerkit.syntax import ONE, Prod, Star, Sum, parse_expr, star_height, terminates

E = parse_expr


@given(exprs(("a", "b", "c"), 12))
def test_projection_solution_certificates(e):
    lc = one_chart_interpretation(e)
    cs = projection_solution(e, lc)
    assert solution_errors(cs, lc.chart) == []
    assert cs[lc.chart.start] is e


@given(exprs(max_leaves=10))
def test_fundamental_solution_certificates(e):
    c = chart_interpretation(e)
    cs = fundamental_certificate_chart(e, c)
    assert solution_errors(cs, c) == []


@given(exprs(max_leaves=10).filter(terminates))
def test_guard_transform(e):
    f, p = guard_transform(e)
    assert not terminates(f)
    assert star_height(f) <= star_height(e)
    c = check_proof(MIL_MINUS, p)
    assert c.lhs is e and c.rhs is Sum(ONE, f)
    assert naive_bisimilar(e, Sum(ONE, f))


def test_guard_transform_rejects_non_terminating():
    with pytest.raises(SynthesisError):
        guard_transform(E("a"))


@given(exprs(max_leaves=10))
def test_unfold_proves_projection(e):
    lc = one_chart_interpretation(e)
    for x in lc.chart.payload.values():
        u, p = unfold(x)
        if p is not None:
            c = check_proof(MIL_MINUS, p)
            assert c.lhs is project(x) and c.rhs is u


@given(st.integers(0, 10**6))
def test_rsp_solution(seed):
    _, e, f, g = random_rsp_instance(random.Random(seed))
    cs = rsp_solution(e, f, g)
    lc = one_chart_interpretation(Prod(Star(f), g))
    cs = CertifiedSolution(cs.values, MIL_MINUS.with_assumptions([rsp_premise(e, f, g)]),
                           cs.certificates)
    assert solution_errors(cs, lc.chart) == []
    assert cs[lc.chart.start] is e


def test_rsp_solution_guard():
    with pytest.raises(SideConditionViolation):
        rsp_solution(E("(a+b)*"), E("a+1"), E("1"))


def test_solution_errors_are_per_vertex():
    e = E("a.b")
    lc = one_chart_interpretation(e)
    cs = projection_solution(e, lc)
    v = lc.chart.vertices[1]
    vals = dict(cs.values)
    vals[v] = E("c")
    errs = solution_errors(CertifiedSolution(vals, MIL_MINUS, cs.certificates), lc.chart)
    assert {w for w, _ in errs} >= {v}
    certs = dict(cs.certificates)
    del certs[v]
    errs = solution_errors(CertifiedSolution(cs.values, MIL_MINUS, certs), lc.chart)
    assert errs == [(v, "missing certificate")]
    eq = correctness_equation(lc.chart, lc.chart.start, cs.values)
    assert str(eq) == "a . b = 0 + a . (1 . b)"
