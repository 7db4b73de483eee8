import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exprs
from oracles import naive_bisimilar
from milnerkit.bisim import (bisimilar, bisimilar_charts, check_one_bisimulation,
                             check_projection_bisimulation, find_one_bisimulation, induced_steps)
from milnerkit.charts import OneChart, chart_interpretation, one_chart_interpretation
from milnerkit.errors import NotWeaklyGuarded
from milnerkit.randgen import random_rewrites
from milnerkit.syntax import parse_expr

E = parse_expr


@pytest.mark.parametrize("e,f,expected", [
    ("(a*.b*)*", "(a+b)*", True),
    ("(a+c)*", "(a+1)*.1", False),
    ("a.(b+c)", "a.b+a.c", False),
    ("(a+b).c", "a.c+b.c", True),
    ("a*", "1+a.a*", True),
    ("a*.0", "a*.0+0", True),
    ("(1+a)*", "a*", True),
])
def test_known_pairs(e, f, expected):
    assert bisimilar(E(e), E(f)) is expected
    assert naive_bisimilar(E(e), E(f)) is expected


@given(exprs(max_leaves=6), exprs(max_leaves=6))
def test_bisimilar_matches_naive_fixpoint(e, f):
    assert bisimilar(e, f) == naive_bisimilar(e, f)


@given(exprs(max_leaves=8), st.integers(0, 10**6))
def test_rewrites_are_bisimilar(e, seed):
    e2, _ = random_rewrites(random.Random(seed), e, 4)
    assert bisimilar(e, e2)
    assert naive_bisimilar(e, e2)


@given(exprs(max_leaves=8), exprs(max_leaves=8))
def test_found_relation_is_a_bisimulation(e, f):
    c1, c2 = chart_interpretation(e), chart_interpretation(f)
    rel = find_one_bisimulation(c1, c2)
    if rel is not None:
        assert check_one_bisimulation(c1, c2, rel)


@given(exprs(max_leaves=10))
def test_projection_is_one_bisimulation(e):
    assert check_projection_bisimulation(e)
    assert bisimilar_charts(one_chart_interpretation(e).chart, chart_interpretation(e))


def test_wrong_relation_rejected():
    c1, c2 = chart_interpretation(E("a.b")), chart_interpretation(E("a.c"))
    pairs = {(u, w) for u in c1.vertices for w in c2.vertices}
    assert not check_one_bisimulation(c1, c2, pairs)
    assert not check_one_bisimulation(c1, c1, set())


def test_induced_steps_follow_empty_steps():
    c = OneChart.build(["x", "y", "z"], "x", [("x", "1", "y"), ("y", "a", "z")], ["y"])
    steps, term = induced_steps(c, "x")
    assert steps == {("a", "z")} and term
    bad = OneChart.build(["x", "y"], "x", [("x", "1", "y"), ("y", "1", "x")])
    with pytest.raises(NotWeaklyGuarded):
        induced_steps(bad, "x")
