import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exprs
from milnerkit import fixtures as fx
from milnerkit.charts import LabeledChart, OneChart, one_chart_interpretation
from milnerkit.errors import LoopError, WitnessError
from milnerkit.lee import (check_orders_wellfounded, descends_relation, eliminate_loop,
                           has_infinite_path, infer_witness, loop_subchart_at, validate_witness)


@st.composite
def small_charts(draw, max_vertices=4):
    n = draw(st.integers(1, max_vertices))
    vs = [f"x{i}" for i in range(n)]
    trs = draw(st.sets(st.tuples(st.sampled_from(vs), st.sampled_from(["a", "b"]),
                                 st.sampled_from(vs)), max_size=3 * n))
    term = draw(st.sets(st.sampled_from(vs)))
    return OneChart.build(vs, "x0", sorted(trs), sorted(term))


def _paths_avoiding(chart, frm, avoid, length):
    """Does some path of exactly `length` steps start at frm and avoid `avoid` throughout?"""
    layer = {frm}
    for _ in range(length):
        layer = {t for x in layer for (_, _, t) in chart.out(x) if t != avoid}
        if not layer:
            return False
    return True


def loop_oracle(chart, v, U):
    """Failed loop conditions by path enumeration."""
    body, todo = set(), [t for (_, _, t) in U if t != v]
    while todo:
        x = todo.pop()
        if x not in body:
            body.add(x)
            todo.extend(t for (_, _, t) in chart.out(x) if t != v)
    failed = []
    returns = any(t == v for (_, _, t) in U) or any(
        t == v for x in body for (_, _, t) in chart.out(x))
    if not returns:
        failed.append("L1")
    n = len(body)
    if any(_paths_avoiding(chart, x, v, n + 1) for x in body):
        failed.append("L2")
    if any(chart.is_terminating(x) for x in body):
        failed.append("L3")
    return failed


@given(small_charts())
def test_loop_subchart_matches_path_oracle(chart):
    for v in chart.vertices:
        outs = list(chart.out(v))
        for k in range(1, len(outs) + 1):
            for U in itertools.combinations(outs, k):
                want = loop_oracle(chart, v, U)
                if want:
                    with pytest.raises(LoopError) as info:
                        loop_subchart_at(chart, v, U)
                    assert info.value.condition == want[0]
                else:
                    loop = loop_subchart_at(chart, v, U)
                    assert loop.anchor == v and loop.entries == frozenset(U)


@given(small_charts())
def test_inferred_witnesses_validate(chart):
    try:
        lc = infer_witness(chart, exhaustive=True)
    except WitnessError:
        return
    rep = validate_witness(lc)
    assert rep.valid, rep
    assert check_orders_wellfounded(lc)


@given(exprs(("a", "b", "c"), 12))
def test_one_chart_witness_valid_and_guarded(e):
    lc = one_chart_interpretation(e)
    assert validate_witness(lc, require_guarded=True).valid
    assert check_orders_wellfounded(lc)
    re = infer_witness(lc.chart.restrict(lc.chart.transitions, gc=False))
    assert validate_witness(re).valid


def test_loop_preconditions():
    c = fx.chart_g1()
    with pytest.raises(LoopError) as info:
        loop_subchart_at(c, "x1", [])
    assert info.value.condition == "pre"
    with pytest.raises(LoopError):
        loop_subchart_at(c, "x1", [("x2", "b", "x1")])


def test_g1_g2_have_no_witness():
    for c in (fx.chart_g1(), fx.chart_g2()):
        assert has_infinite_path(c)
        with pytest.raises(WitnessError):
            infer_witness(c, exhaustive=True)
        for v in c.vertices:
            outs = list(c.out(v))
            for k in range(1, len(outs) + 1):
                for U in itertools.combinations(outs, k):
                    assert loop_oracle(c, v, U)
    with pytest.raises(LoopError) as info:
        loop_subchart_at(fx.chart_g1(), "x1", [("x1", "a", "x2")])
    assert info.value.condition == "L3"


def test_chart_e_layering():
    bad = validate_witness(fx.chart_e_bad_witness())
    assert not bad.valid and bad.violation == (3, "layering")
    assert "stage" in bad.to_json() and bad.to_json()["reason"] == "layering"
    assert validate_witness(fx.chart_e_good_witness()).valid


def test_chart_c_elimination_rounds():
    lc = fx.chart_c_alternative_witness()
    assert validate_witness(lc, require_guarded=True).valid
    cur = lc.chart
    sizes = []
    for n in (1, 2, 3):
        loops = []
        for v in cur.vertices:
            U = [t for t in cur.out(v) if lc.marks[t] == n]
            if U:
                loops.append(loop_subchart_at(cur, v, U))
        for loop in loops:
            cur = eliminate_loop(cur, loop)
        sizes.append(len(cur.vertices))
    assert sizes[-1] == 1 and list(cur.vertices) == ["vs"]
    assert not has_infinite_path(cur)


def test_leftover_infinite_path():
    c = OneChart.build(["x"], "x", [("x", "a", "x")])
    rep = validate_witness(LabeledChart(c, {("x", "a", "x"): 0}))
    assert not rep.valid and rep.violation[1] == "leftover-infinite-path"
    assert validate_witness(LabeledChart(c, {("x", "a", "x"): 1})).valid


def test_not_a_loop():
    c = OneChart.build(["x", "y"], "x", [("x", "a", "y"), ("y", "a", "x")], ["y"])
    rep = validate_witness(LabeledChart(c, {("x", "a", "y"): 1, ("y", "a", "x"): 0}))
    assert not rep.valid and rep.violation[1] == "not-a-loop"


def test_guarded_entries():
    c = OneChart.build(["x", "y"], "x", [("x", "1", "y"), ("y", "a", "x")])
    lc = LabeledChart(c, {("x", "1", "y"): 1, ("y", "a", "x"): 0})
    assert validate_witness(lc).valid
    rep = validate_witness(lc, require_guarded=True)
    assert not rep.valid and rep.violation[1] == "improper-entry-when-guard-required"
    g = infer_witness(c, guarded=True)
    assert validate_witness(g, require_guarded=True).valid


def test_descends_relation_chart_c():
    d = descends_relation(fx.chart_c())
    assert ("vs", "v11") in d and ("v1", "v11") in d
    assert all(v != w for (v, w) in d)
