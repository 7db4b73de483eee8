import re

import pytest
from hypothesis import given

from conftest import exprs
from oracles import (ONE_CHART, all_exprs, from_term, one_chart_steps, plain_derivatives,
                     reachable_lts, terminates_oracle, to_term)
from milnerkit.charts import (LabeledChart, OneChart, chart_from_json, chart_interpretation,
                              export_dot, one_chart_interpretation, one_steps, partial_derivatives,
                              project)
from milnerkit.errors import CapExceeded, ChartError
from milnerkit.syntax import StackProd, parse_expr, terminates

E = parse_expr


def test_derivatives_exhaustive_small():
    for level in all_exprs(3):
        for e in level:
            for a in "ab":
                assert partial_derivatives(a, e) == plain_derivatives(a, e), e
            assert one_steps(e) == one_chart_steps(e), e


@given(exprs(("a", "b", "c"), 12))
def test_partial_derivatives_match_tss(e):
    for a in "abc":
        assert partial_derivatives(a, e) == plain_derivatives(a, e)


@given(exprs(max_leaves=10))
def test_one_steps_match_tss_on_every_vertex(e):
    lc = one_chart_interpretation(e)
    for v in lc.chart.vertices:
        E_ = lc.chart.payload[v]
        assert one_steps(E_) == one_chart_steps(E_)
        assert terminates(E_) == terminates_oracle(E_)


@given(exprs(max_leaves=10))
def test_chart_interpretation_is_reachable_lts(e):
    c = chart_interpretation(e)
    s0, succ, term = reachable_lts(e)
    assert {to_term(x) for x in c.payload.values()} == set(succ)
    got = {(to_term(c.payload[s]), a, to_term(c.payload[t])) for (s, a, t) in c.transitions}
    assert got == {(x, a, y) for x, ys in succ.items() for (a, y) in ys}
    assert {to_term(c.payload[v]) for v in c.terminating} == term
    assert c.is_one_free()


@given(exprs(max_leaves=10))
def test_one_chart_interpretation_matches_tss_closure(e):
    lc = one_chart_interpretation(e)
    pl = lc.chart.payload
    seen, stack, trans = {to_term(e)}, [to_term(e)], {}
    while stack:
        x = stack.pop()
        for (l, m, y) in ONE_CHART.steps(x):
            trans[(x, l, y)] = max(trans.get((x, l, y), 0), m)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    assert {to_term(x) for x in pl.values()} == seen
    got = {(to_term(pl[s]), a, to_term(pl[t])): m for (s, a, t), m in lc.marks.items()}
    assert got == trans
    assert lc.chart.is_weakly_guarded()


@given(exprs(max_leaves=10))
def test_projection_of_payloads(e):
    lc = one_chart_interpretation(e)
    for x in lc.chart.payload.values():
        p = project(x)
        assert not any(isinstance(y, StackProd) for y in _nodes(p))
        assert project(p) is p


def _nodes(e):
    out = [e]
    for c in e.children:
        out.extend(_nodes(c))
    return out


def test_seven_vertex_chart_size():
    lc = one_chart_interpretation(E("((a.a*+b).b*)*"))
    assert len(lc.chart.vertices) == 7
    assert sorted(m for m in lc.marks.values() if m) == [1, 1, 2, 2]


def test_chart_validation():
    with pytest.raises(ChartError):
        OneChart.build(["x"], "y", [])
    with pytest.raises(ChartError):
        OneChart.build(["x"], "x", [("x", "a", "z")])
    with pytest.raises(ChartError):
        OneChart.build(["x", "x"], "x", [])
    with pytest.raises(ChartError):
        OneChart.build(["x"], "x", [("x", "b", "x")], alphabet=["a"])
    c = OneChart.build(["x"], "x", [("x", "a", "x")])
    with pytest.raises(ChartError):
        LabeledChart(c, {})
    with pytest.raises(ChartError):
        LabeledChart(c, {("x", "a", "x"): -1})


def test_weak_guardedness():
    assert not OneChart.build(["x", "y"], "x", [("x", "1", "y"), ("y", "1", "x")]).is_weakly_guarded()
    assert OneChart.build(["x", "y"], "x", [("x", "1", "y"), ("y", "a", "x")]).is_weakly_guarded()


def test_cap(monkeypatch):
    e = E("(a+b)*.(a+b).(a+b).(a+b).(a+b)")
    with pytest.raises(CapExceeded):
        chart_interpretation(e, cap=3)
    monkeypatch.setenv("MILNERKIT_CAP", "2")
    with pytest.raises(CapExceeded):
        one_chart_interpretation(e)


@given(exprs(max_leaves=10))
def test_json_roundtrip(e):
    lc = one_chart_interpretation(e)
    c2, m2 = chart_from_json(lc.to_json())
    assert c2 == lc.chart
    assert m2 == lc.marks
    c3, m3 = chart_from_json(lc.chart.to_json())
    assert c3 == lc.chart and m3 is None


def test_json_missing_field():
    with pytest.raises(ChartError):
        chart_from_json({"transitions": []})


_NODE = re.compile(r'^\s*(n\d+) \[label="((?:[^"\\]|\\.)*)", shape=(\w+)\];$')
_EDGE = re.compile(r'^\s*(n\d+) -> (n\d+) \[label="((?:[^"\\]|\\.)*)"')


def parse_dot(text):
    names, term, edges = {}, set(), set()
    for line in text.splitlines():
        m = _NODE.match(line)
        if m:
            names[m.group(1)] = m.group(2)
            if m.group(3) == "doublecircle":
                term.add(m.group(2))
            continue
        m = _EDGE.match(line)
        if m:
            lab = m.group(3)
            mark = 0
            if " [" in lab:
                lab, rest = lab.split(" [")
                mark = int(rest.rstrip("]"))
            edges.add((names[m.group(1)], lab, names[m.group(2)], mark))
    return names, term, edges


@given(exprs(max_leaves=10))
def test_dot_roundtrip(e):
    lc = one_chart_interpretation(e)
    names, term, edges = parse_dot(export_dot(lc))
    assert sorted(names.values()) == sorted(lc.chart.vertices)
    assert term == set(lc.chart.terminating)
    assert edges == {(s, a, t, lc.marks[(s, a, t)]) for (s, a, t) in lc.chart.transitions}
