"""Loop sub-1-charts, loop elimination, and inference/validation of LLEE-witnesses."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .charts import LabeledChart, OneChart, _has_cycle
from .errors import LoopError, WitnessError
from .syntax import EMPTY


@dataclass(frozen=True)
class LoopSubchart:
    anchor: str
    entries: frozenset        # transitions from the anchor
    body: frozenset           # body vertices (anchor excluded)
    body_transitions: frozenset

    @property
    def transitions(self) -> frozenset:
        return self.entries | self.body_transitions


@dataclass(frozen=True)
class WitnessReport:
    valid: bool
    violation: tuple | None = None   # (stage, reason)
    message: str = ""

    def to_json(self) -> dict:
        d = {"valid": self.valid}
        if self.violation is not None:
            d["stage"], d["reason"] = self.violation
            d["message"] = self.message
        return d


REASONS = ("not-a-loop", "layering", "leftover-infinite-path", "improper-entry-when-guard-required")


def _body_of(chart: OneChart, v, U) -> set:
    body = set()
    q = deque(t for (_, _, t) in U if t != v)
    body.update(q)
    while q:
        x = q.popleft()
        for (_, _, y) in chart.out(x):
            if y != v and y not in body:
                body.add(y)
                q.append(y)
    return body


def _loop_conditions(chart: OneChart, v, U):
    """(body, body transitions, list of failed conditions with messages)."""
    body = _body_of(chart, v, U)
    btrans = frozenset(t for x in body for t in chart.out(x))
    failed = []
    returns = any(t == v for (_, _, t) in U) or any(t[2] == v for t in btrans)
    if not returns:
        failed.append(("L1", f"no infinite path from {v} inside the generated subchart"))
    succ = {x: [y for (_, _, y) in chart.out(x) if y != v] for x in body}
    if _has_cycle(list(body), succ):
        failed.append(("L2", f"an infinite path from {v} never returns to {v}"))
    term = sorted(x for x in body if chart.is_terminating(x))
    if term:
        failed.append(("L3", f"body vertex {term[0]} permits immediate termination"))
    return body, btrans, failed


def _loop_check(chart: OneChart, v, U):
    """(LoopSubchart, None) or (None, (condition, message)) for the first failed condition."""
    body, btrans, failed = _loop_conditions(chart, v, U)
    if failed:
        return None, failed[0]
    return LoopSubchart(v, frozenset(U), frozenset(body), btrans), None


def loop_subchart_at(chart: OneChart, v, U) -> LoopSubchart:
    """The loop sub-1-chart generated at v by the entry transitions U; raises LoopError."""
    U = [tuple(t) for t in U]
    if not U:
        raise LoopError("pre", "the entry set must be nonempty")
    for t in U:
        if t[0] != v or t not in set(chart.out(v)):
            raise LoopError("pre", f"{t} is not a transition from {v}")
    loop, err = _loop_check(chart, v, U)
    if loop is None:
        raise LoopError(*err)
    return loop


def eliminate_loop(chart: OneChart, loop: LoopSubchart) -> OneChart:
    """Remove the loop-entry transitions, then drop what became unreachable."""
    return chart.restrict([t for t in chart.transitions if t not in loop.entries])


def has_infinite_path(chart: OneChart) -> bool:
    reach = set(chart.reachable())
    succ = {x: [y for (_, _, y) in chart.out(x)] for x in reach}
    return _has_cycle(list(reach), succ)


def _maximal_loop(chart, v, forbidden, guarded):
    """Maximal valid entry set at v: all transitions satisfying L2/L3 alone, if one returns."""
    keep = []
    some_returns = False
    for t in chart.out(v):
        if t in forbidden or (guarded and t[1] == EMPTY):
            continue
        _, _, failed = _loop_conditions(chart, v, [t])
        conds = {c for c, _ in failed}
        if not conds & {"L2", "L3"}:
            keep.append(t)
            some_returns = some_returns or "L1" not in conds
    if not some_returns:
        return None
    loop, err = _loop_check(chart, v, keep)
    return loop


def infer_witness(chart: OneChart, exhaustive: bool = False, guarded: bool = False,
                  cap: int = 100_000) -> LabeledChart:
    """Run loop elimination greedily and record the run as an entry/body labeling."""
    try:
        return _infer_greedy(chart, guarded)
    except WitnessError:
        if not exhaustive:
            raise
    return _infer_exhaustive(chart, guarded, cap)


def _infer_greedy(chart, guarded):
    marks = {t: 0 for t in chart.transitions}
    cur = chart.garbage_collect()
    recorded: set = set()
    stage = 0
    while has_infinite_path(cur):
        stage += 1
        chosen = []
        used: set = set()
        for v in cur.vertices:
            if v in used:
                continue
            loop = _maximal_loop(cur, v, recorded, guarded)
            if loop is None:
                continue
            span = {v} | loop.body
            if span & used:
                continue
            chosen.append(loop)
            used |= span
        if not chosen:
            raise WitnessError("no-loop-found-but-infinite-path-remains")
        gone = set()
        for loop in chosen:
            for t in loop.entries:
                marks[t] = stage
            gone |= loop.entries
            recorded |= loop.body_transitions
        cur = cur.restrict([t for t in cur.transitions if t not in gone])
    return LabeledChart(chart, marks)


def _infer_exhaustive(chart, guarded, cap):
    budget = [cap]
    dead: set = set()

    def search(cur, recorded, stage, marks):
        if not has_infinite_path(cur):
            return marks
        key = (cur.transitions, frozenset(recorded))
        if key in dead:
            return None
        for v in cur.vertices:
            outs = [t for t in cur.out(v) if t not in recorded and not (guarded and t[1] == EMPTY)]
            for k in range(len(outs), 0, -1):
                for U in itertools.combinations(outs, k):
                    budget[0] -= 1
                    if budget[0] < 0:
                        raise WitnessError("exhaustive witness search exceeded its cap")
                    loop, _ = _loop_check(cur, v, U)
                    if loop is None:
                        continue
                    m2 = dict(marks)
                    for t in U:
                        m2[t] = stage
                    nxt = cur.restrict([t for t in cur.transitions if t not in loop.entries])
                    r = search(nxt, recorded | loop.body_transitions, stage + 1, m2)
                    if r is not None:
                        return r
        dead.add(key)
        return None

    r = search(chart.garbage_collect(), frozenset(), 1, {t: 0 for t in chart.transitions})
    if r is None:
        raise WitnessError("no-loop-found-but-infinite-path-remains")
    return LabeledChart(chart, r)


def validate_witness(lc: LabeledChart, require_guarded: bool = False) -> WitnessReport:
    """Replay the recorded elimination run stage by stage."""
    chart = lc.chart.garbage_collect()
    live = set(chart.transitions)
    stages = sorted({m for t, m in lc.marks.items() if m > 0 and t in live})
    cur = chart
    recorded: set = set()
    for n in stages:
        present = set(cur.transitions)
        entries = [t for t in chart.transitions if lc.marks[t] == n]
        missing = [t for t in entries if t not in present]
        if missing:
            return WitnessReport(False, (n, "layering"),
                                 f"entry {missing[0]} was removed together with an earlier loop")
        by_src: dict = {}
        for t in entries:
            by_src.setdefault(t[0], []).append(t)
        loops = []
        for v in sorted(by_src, key=cur.vertices.index):
            U = by_src[v]
            bad = [t for t in U if t in recorded]
            if bad:
                return WitnessReport(False, (n, "layering"),
                                     f"entry {bad[0]} lies in the body of an earlier loop")
            loop, err = _loop_check(cur, v, U)
            if loop is None:
                return WitnessReport(False, (n, "not-a-loop"), f"at {v}: {err[0]}: {err[1]}")
            loops.append(loop)
        for x in loops:
            for y in loops:
                if x is not y and y.entries & x.body_transitions:
                    return WitnessReport(False, (n, "layering"),
                                         f"stage-{n} entries at {y.anchor} lie in the body of the "
                                         f"stage-{n} loop at {x.anchor}")
        for loop in loops:
            recorded |= loop.body_transitions
        gone = {t for loop in loops for t in loop.entries}
        cur = cur.restrict([t for t in cur.transitions if t not in gone])
    if has_infinite_path(cur):
        return WitnessReport(False, (stages[-1] if stages else 0, "leftover-infinite-path"),
                             "an infinite path remains after the last elimination step")
    if require_guarded:
        for t in chart.transitions:
            if lc.marks[t] > 0 and t[1] == EMPTY:
                return WitnessReport(False, (lc.marks[t], "improper-entry-when-guard-required"),
                                     f"loop-entry transition {t} is an empty step")
    return WitnessReport(True)


def descends_relation(lc: LabeledChart) -> set:
    """(v, w) with a path v -[n]-> v' -bo->* w that does not revisit v, w != v."""
    chart = lc.chart
    rel = set()
    for v in chart.vertices:
        starts = [t[2] for t in lc.entries(v) if t[2] != v]
        seen = set(starts)
        q = deque(starts)
        while q:
            x = q.popleft()
            for t in lc.body(x):
                y = t[2]
                if y != v and y not in seen:
                    seen.add(y)
                    q.append(y)
        rel |= {(v, w) for w in seen}
    return rel


def check_orders_wellfounded(lc: LabeledChart) -> bool:
    """Descends relation and body steps are both acyclic on the reachable part."""
    vs = lc.chart.reachable()
    keep = set(vs)
    d = {(v, w) for (v, w) in descends_relation(lc) if v in keep}
    succ = {v: [] for v in vs}
    for (v, w) in d:
        succ[v].append(w)
    if any(v == w for (v, w) in d) or _has_cycle(vs, succ):
        return False
    body = {v: [t[2] for t in lc.body(v)] for v in vs}
    return not _has_cycle(vs, body)
