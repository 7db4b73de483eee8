"""1-charts, the chart interpretation and the 1-chart interpretation with markings."""
from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .errors import CapExceeded, ChartError
from .syntax import (EMPTY, ONE, Act, Alphabet, Expr, One, Prod, StackProd, Star,
                     Sum, Zero, actions_of, normed_plus, render_expr, star_height,
                     terminates)

DEFAULT_CAP = 100_000


def default_cap() -> int:
    env = os.environ.get("MILNERKIT_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_CAP


def _label_key(label: str):
    # the empty step sorts before every proper action
    return (0, "") if label == EMPTY else (1, label)


def transition_key(t):
    return (t[0], _label_key(t[1]), t[2])


@dataclass(frozen=True)
class OneChart:
    """A finite rooted LTS whose transitions may carry the empty-step label "1"."""

    vertices: tuple
    alphabet: Alphabet
    start: str
    transitions: tuple  # sorted tuple of (source, label, target)
    terminating: frozenset
    payload: dict | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ChartError("duplicate vertex identifiers")
        if self.start not in vs:
            raise ChartError(f"start vertex {self.start!r} is not a vertex")
        for (s, a, t) in self.transitions:
            if s not in vs or t not in vs:
                raise ChartError(f"transition {(s, a, t)} has an endpoint outside the vertex set")
            if a != EMPTY and a not in self.alphabet:
                raise ChartError(f"transition label {a!r} not in the alphabet")
        if not set(self.terminating) <= vs:
            raise ChartError("terminating set is not a subset of the vertices")
        ts = tuple(sorted(set(self.transitions), key=transition_key))
        object.__setattr__(self, "transitions", ts)
        object.__setattr__(self, "terminating", frozenset(self.terminating))
        out: dict = {v: [] for v in self.vertices}
        for t in ts:
            out[t[0]].append(t)
        object.__setattr__(self, "_out", {v: tuple(sorted(l, key=lambda t: (_label_key(t[1]), t[2])))
                                          for v, l in out.items()})

    @classmethod
    def build(cls, vertices, start, transitions, terminating=(), alphabet=None, payload=None):
        transitions = [tuple(t) for t in transitions]
        if alphabet is None:
            alphabet = Alphabet(tuple({a for (_, a, _) in transitions if a != EMPTY}))
        elif not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(tuple(alphabet))
        return cls(tuple(vertices), alphabet, start, tuple(transitions), frozenset(terminating), payload)

    def out(self, v) -> tuple:
        """Transitions from v in canonical order (label, then target id)."""
        return self._out[v]

    def is_terminating(self, v) -> bool:
        return v in self.terminating

    def is_one_free(self) -> bool:
        return all(a != EMPTY for (_, a, _) in self.transitions)

    def is_weakly_guarded(self) -> bool:
        """No cycle of empty-step transitions."""
        succ = {v: [t for (_, a, t) in self.out(v) if a == EMPTY] for v in self.vertices}
        return not _has_cycle(self.vertices, succ)

    def reachable(self, frm=None) -> list:
        seen = {self.start if frm is None else frm}
        order = [self.start if frm is None else frm]
        q = deque(order)
        while q:
            v = q.popleft()
            for (_, _, w) in self.out(v):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    q.append(w)
        return order

    def restrict(self, transitions: Iterable, gc: bool = True) -> "OneChart":
        """Same vertices with the given transitions, optionally garbage-collected from the start."""
        c = OneChart(self.vertices, self.alphabet, self.start, tuple(transitions),
                     self.terminating, self.payload)
        return c.garbage_collect() if gc else c

    def garbage_collect(self) -> "OneChart":
        keep = set(self.reachable())
        vs = tuple(v for v in self.vertices if v in keep)
        ts = tuple(t for t in self.transitions if t[0] in keep)
        pl = None if self.payload is None else {v: self.payload[v] for v in vs}
        return OneChart(vs, self.alphabet, self.start, ts,
                        frozenset(v for v in self.terminating if v in keep), pl)

    def to_json(self, marks: dict | None = None) -> dict:
        trs = []
        for t in self.transitions:
            d = {"from": t[0], "label": t[1], "to": t[2]}
            if marks is not None:
                d["mark"] = marks.get(t, 0)
            trs.append(d)
        d = {"alphabet": list(self.alphabet.actions), "start": self.start,
             "vertices": list(self.vertices),
             "terminating": sorted(self.terminating), "transitions": trs}
        if marks is not None:
            d["witness"] = True
        return d


def _has_cycle(vertices, succ) -> bool:
    color = {v: 0 for v in vertices}
    for root in vertices:
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[v] = 2
                stack.pop()
            elif color[nxt] == 1:
                return True
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succ[nxt])))
    return False


@dataclass(frozen=True)
class LabeledChart:
    """A 1-chart together with a marking (0 = body, n >= 1 = loop entry of stage n)."""

    chart: OneChart
    marks: dict = field(compare=False, hash=False)

    def __post_init__(self):
        for t in self.chart.transitions:
            if t not in self.marks:
                raise ChartError(f"transition {t} carries no marking")
            m = self.marks[t]
            if not isinstance(m, int) or m < 0:
                raise ChartError(f"marking of {t} must be a natural number")
        extra = set(self.marks) - set(self.chart.transitions)
        if extra:
            raise ChartError(f"markings for unknown transitions: {sorted(extra)[:3]}")

    def mark(self, t) -> int:
        return self.marks[t]

    def entries(self, v) -> list:
        return [t for t in self.chart.out(v) if self.marks[t] > 0]

    def body(self, v) -> list:
        return [t for t in self.chart.out(v) if self.marks[t] == 0]

    def to_json(self) -> dict:
        return self.chart.to_json(self.marks)


def chart_from_json(d: dict) -> tuple:
    """Parse the chart file format; returns (OneChart, marks or None)."""
    try:
        trs = [(t["from"], str(t["label"]), t["to"]) for t in d["transitions"]]
        has_marks = bool(d.get("witness")) or any("mark" in t for t in d["transitions"])
        vertices = d.get("vertices")
        if vertices is None:
            vertices = sorted({d["start"]} | {x for (s, _, t) in trs for x in (s, t)})
        c = OneChart.build(vertices, d["start"], trs, d.get("terminating", ()),
                           d.get("alphabet"))
    except KeyError as exc:
        raise ChartError(f"chart file lacks field {exc}") from None
    marks = None
    if has_marks:
        marks = {}
        for t in d["transitions"]:
            key = (t["from"], str(t["label"]), t["to"])
            marks[key] = max(marks.get(key, 0), int(t.get("mark", 0)))
    return c, marks


def load_chart(path: str) -> tuple:
    with open(path) as fh:
        return chart_from_json(json.load(fh))


# ---------------------------------------------------------------- derivatives

def partial_derivatives(a: str, e: Expr) -> frozenset:
    """Antimirov partial derivatives of e by action a."""
    if isinstance(e, (Zero, One)):
        return frozenset()
    if isinstance(e, Act):
        return frozenset([ONE]) if e.name == a else frozenset()
    if isinstance(e, Sum):
        return partial_derivatives(a, e.left) | partial_derivatives(a, e.right)
    if isinstance(e, Prod):
        s = {Prod(d, e.right) for d in partial_derivatives(a, e.left)}
        if terminates(e.left):
            s |= partial_derivatives(a, e.right)
        return frozenset(s)
    if isinstance(e, Star):
        return frozenset(Prod(d, e) for d in partial_derivatives(a, e.body))
    raise TypeError(f"partial derivatives are defined on plain expressions, got {e!r}")


def one_steps(E: Expr) -> frozenset:
    """Labelled 1-steps of a stacked star expression: triples (label, marking, target)."""
    if isinstance(E, (Zero, One)):
        return frozenset()
    if isinstance(E, Act):
        return frozenset([(E.name, 0, ONE)])
    if isinstance(E, Sum):
        return frozenset((a, 0, t) for (a, _, t) in one_steps(E.left) | one_steps(E.right))
    if isinstance(E, Star):
        m = star_height(E) if normed_plus(E.body) else 0
        return frozenset((a, m, StackProd(t, E)) for (a, _, t) in one_steps(E.body))
    if isinstance(E, Prod):
        s = {(a, l, Prod(t, E.right)) for (a, l, t) in one_steps(E.left)}
        if terminates(E.left):
            s |= {(a, 0, t) for (a, _, t) in one_steps(E.right)}
        return frozenset(s)
    if isinstance(E, StackProd):
        s = {(a, l, StackProd(t, E.right)) for (a, l, t) in one_steps(E.left)}
        if terminates(E.left):
            s.add((EMPTY, 0, E.right))
        return frozenset(s)
    raise TypeError(f"unexpected expression {E!r}")


def stacked_one_derivatives(E: Expr) -> frozenset:
    """The set of (label, target) 1-derivatives of a stacked star expression."""
    return frozenset((a, t) for (a, _, t) in one_steps(E))


def project(E: Expr) -> Expr:
    """Replace every stacked product by a product."""
    if isinstance(E, StackProd):
        return Prod(project(E.left), project(E.right))
    if isinstance(E, Sum):
        return Sum(project(E.left), project(E.right))
    if isinstance(E, Prod):
        return Prod(project(E.left), project(E.right))
    if isinstance(E, Star):
        return Star(project(E.body))
    return E


def _closure(e: Expr, steps, cap: int, extra=()):
    ids = {e: render_expr(e)}
    order = [e]
    for x in extra:
        if x not in ids:
            ids[x] = render_expr(x)
            order.append(x)
    trans = []
    q = deque(order)
    while q:
        x = q.popleft()
        for (a, m, y) in steps(x):
            if y not in ids:
                if len(ids) >= cap:
                    raise CapExceeded(f"interpretation exceeded {cap} vertices")
                ids[y] = render_expr(y)
                order.append(y)
                q.append(y)
            trans.append((ids[x], a, ids[y], m))
    return ids, order, trans


def chart_interpretation(e: Expr, alphabet=None, cap: int | None = None, extra=()) -> OneChart:
    """The (1-free) chart C(e) generated by iterated partial derivatives.

    Expressions in `extra` are added as further (possibly unreachable) roots.
    """
    cap = default_cap() if cap is None else cap
    acts = sorted(actions_of(e) | set(alphabet or ()))

    def steps(x):
        return [(a, 0, d) for a in acts for d in partial_derivatives(a, x)]

    ids, order, trans = _closure(e, steps, cap, extra)
    return OneChart.build([ids[x] for x in order], ids[e], [t[:3] for t in trans],
                          [ids[x] for x in order if terminates(x)], acts,
                          {ids[x]: x for x in order})


def one_chart_interpretation(e: Expr, alphabet=None, cap: int | None = None) -> LabeledChart:
    """The 1-chart 1C(e) together with its entry/body labeling."""
    cap = default_cap() if cap is None else cap
    acts = sorted(actions_of(e) | set(alphabet or ()))
    ids, order, trans = _closure(e, one_steps, cap)
    chart = OneChart.build([ids[x] for x in order], ids[e], [t[:3] for t in trans],
                           [ids[x] for x in order if terminates(x)], acts,
                           {ids[x]: x for x in order})
    marks: dict = {}
    for (s, a, t, m) in trans:
        # on a collision of (source, label, target) the entry marking wins
        marks[(s, a, t)] = max(marks.get((s, a, t), 0), m)
    return LabeledChart(chart, marks)


def export_dot(chart: OneChart | LabeledChart, name: str = "chart") -> str:
    marks = None
    if isinstance(chart, LabeledChart):
        marks = chart.marks
        chart = chart.chart
    idx = {v: f"n{i}" for i, v in enumerate(chart.vertices)}

    def q(s):
        return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = [f"digraph {q(name)} {{", "  rankdir=TB;", "  __start [shape=point, style=invis];"]
    for v in chart.vertices:
        shape = "doublecircle" if v in chart.terminating else "circle"
        lines.append(f"  {idx[v]} [label={q(v)}, shape={shape}];")
    lines.append(f"  __start -> {idx[chart.start]};")
    for t in chart.transitions:
        s, a, w = t
        lab = a
        attrs = []
        if marks is not None and marks.get(t, 0) > 0:
            lab = f"{a} [{marks[t]}]"
            attrs.append("penwidth=2")
        if a == EMPTY:
            attrs.append("style=dotted")
        attrs.insert(0, f"label={q(lab)}")
        lines.append(f"  {idx[s]} -> {idx[w]} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
