"""Induced steps, 1-bisimulation checking and 1-bisimilarity by partition refinement."""
from __future__ import annotations

from .charts import OneChart, chart_interpretation
from .errors import NotWeaklyGuarded
from .syntax import EMPTY, Expr


def induced_steps(chart: OneChart, v) -> tuple:
    """(set of (action, target) reachable by empty steps then one proper step, induced termination)."""
    if not chart.is_weakly_guarded():
        raise NotWeaklyGuarded("induced steps need a weakly guarded chart")
    return _induced(chart, v)


def _induced(chart, v):
    seen = {v}
    stack = [v]
    steps = set()
    term = False
    while stack:
        x = stack.pop()
        if x in chart.terminating:
            term = True
        for (_, a, w) in chart.out(x):
            if a == EMPTY:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
            else:
                steps.add((a, w))
    return frozenset(steps), term


def saturate(chart: OneChart) -> dict:
    """Induced steps and termination for every vertex."""
    if not chart.is_weakly_guarded():
        raise NotWeaklyGuarded("induced steps need a weakly guarded chart")
    return {v: _induced(chart, v) for v in chart.vertices}


def check_one_bisimulation(c1: OneChart, c2: OneChart, B) -> bool:
    """Start pair, forth, back and termination conditions over induced steps."""
    B = set(B)
    if (c1.start, c2.start) not in B:
        return False
    s1, s2 = saturate(c1), saturate(c2)
    for (u, w) in B:
        if u not in s1 or w not in s2:
            return False
        (st1, t1), (st2, t2) = s1[u], s2[w]
        if t1 != t2:
            return False
        for (a, u2) in st1:
            if not any(b == a and (u2, w2) in B for (b, w2) in st2):
                return False
        for (a, w2) in st2:
            if not any(b == a and (u2, w2) in B for (b, u2) in st1):
                return False
    return True


def _refine(sat: dict) -> dict:
    """Coarsest stable partition of the saturated system (strong bisimilarity)."""
    block = {v: (1 if t else 0) for v, (_, t) in sat.items()}
    nblocks = len(set(block.values()))
    while True:
        sigs = {}
        new = {}
        for v, (steps, t) in sat.items():
            sig = (block[v], frozenset((a, block[w]) for (a, w) in steps))
            new[v] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == nblocks:
            return new
        block, nblocks = new, len(sigs)


def find_one_bisimulation(c1: OneChart, c2: OneChart):
    """A 1-bisimulation between c1 and c2 as a set of pairs, or None."""
    sat = {}
    for v, (st, t) in saturate(c1).items():
        sat[(1, v)] = (frozenset((a, (1, w)) for (a, w) in st), t)
    for v, (st, t) in saturate(c2).items():
        sat[(2, v)] = (frozenset((a, (2, w)) for (a, w) in st), t)
    block = _refine(sat)
    if block[(1, c1.start)] != block[(2, c2.start)]:
        return None
    by_block: dict = {}
    for (side, v), b in block.items():
        by_block.setdefault(b, ([], []))[side - 1].append(v)
    return {(u, w) for (l, r) in by_block.values() for u in l for w in r}


def bisimilar_charts(c1: OneChart, c2: OneChart) -> bool:
    return find_one_bisimulation(c1, c2) is not None


def bisimilar(e: Expr, f: Expr) -> bool:
    """Bisimilarity of the chart interpretations of e and f."""
    return bisimilar_charts(chart_interpretation(e), chart_interpretation(f))


def check_projection_bisimulation(e: Expr) -> bool:
    """Is the graph of the projection a 1-bisimulation from 1C(e) into the derivative chart?

    Projected 1-chart vertices need not be derivatives of e, so the target chart is
    generated from e together with all projected vertices.
    """
    from .charts import one_chart_interpretation, project
    from .syntax import sort_key
    lc = one_chart_interpretation(e)
    pis = {v: project(lc.chart.payload[v]) for v in lc.chart.vertices}
    target = chart_interpretation(e, alphabet=lc.chart.alphabet.actions,
                                  extra=sorted(set(pis.values()), key=sort_key))
    ids = {x: v for v, x in target.payload.items()}
    return check_one_bisimulation(lc.chart, target, {(v, ids[pis[v]]) for v in lc.chart.vertices})
