"""Proof terms as s-expressions.

    (refl "e") (symm P) (trans P Q) (cxt "C[]" P) (ax name (var "e") ...)
    (assume "l = r") (rsp* P) (usp* P Q)
    (usp ((P Q) ...) (("f" ...) ...) ("g" ...))
    (lcoind (P ...) #file) or (lcoind (P ...) (cp "json")); coind likewise
    (let ((%1 P) (%2 Q) ...) body) introduces shared subproofs referenced as %n.
"""
from __future__ import annotations

import json
import os
import re

from .errors import ParseError
from .kernel import (USP, Assume, Axiom, Coind, Cxt, LCoind, ProofTerm, Refl, RSPStar, Symm,
                     Trans, USPStar)
from .syntax import parse_equation, parse_expr, render_expr

_TOK = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()"]+))')


def _q(s: str) -> str:
    return json.dumps(s)


def _e(x) -> str:
    return _q(render_expr(x))


def _children(p):
    if isinstance(p, (Symm, RSPStar, Cxt)):
        return (p.sub,)
    if isinstance(p, (Trans, USPStar)):
        return (p.left, p.right)
    if isinstance(p, USP):
        return tuple(q for pair in p.premises for q in pair)
    if isinstance(p, (LCoind, Coind)):
        return tuple(p.premises)
    return ()


def dump_proof(p: ProofTerm) -> str:
    """Serialize, sharing every compound node that is referenced more than once."""
    counts: dict = {}
    order: list = []
    stack = [(p, False)]
    while stack:
        q, done = stack.pop()
        if done:
            order.append(q)
            continue
        k = id(q)
        counts[k] = counts.get(k, 0) + 1
        if counts[k] > 1:
            continue
        stack.append((q, True))
        for c in _children(q):
            stack.append((c, False))
    names: dict = {}
    defs = []
    for q in order:   # postorder: children before parents
        if q is not p and counts[id(q)] > 1 and _children(q):
            text = _node(q, names)
            names[id(q)] = f"%{len(names) + 1}"
            defs.append(f"({names[id(q)]} {text})")
    body = _node(p, names)
    if not defs:
        return body
    return "(let (" + " ".join(defs) + ") " + body + ")"


def _ref(q, names) -> str:
    n = names.get(id(q))
    return n if n is not None else _node(q, names)


def _node(p, names) -> str:
    r = lambda q: _ref(q, names)  # noqa: E731
    if isinstance(p, Axiom):
        args = "".join(f" ({v} {_e(x)})" for v, x in p.subst)
        return f"(ax {p.name}{args})"
    if isinstance(p, Refl):
        return f"(refl {_e(p.expr)})"
    if isinstance(p, Symm):
        return f"(symm {r(p.sub)})"
    if isinstance(p, Trans):
        return f"(trans {r(p.left)} {r(p.right)})"
    if isinstance(p, Cxt):
        return f"(cxt {_e(p.ctx)} {r(p.sub)})"
    if isinstance(p, Assume):
        return f"(assume {_q(str(p.eq))})"
    if isinstance(p, RSPStar):
        return f"(rsp* {r(p.sub)})"
    if isinstance(p, USPStar):
        return f"(usp* {r(p.left)} {r(p.right)})"
    if isinstance(p, USP):
        prem = " ".join(f"({r(a)} {r(b)})" for a, b in p.premises)
        rows = " ".join("(" + " ".join(_e(f) for f in row) + ")" for row in p.coeffs)
        consts = " ".join(_e(g) for g in p.consts)
        return f"(usp ({prem}) ({rows}) ({consts}))"
    if isinstance(p, (LCoind, Coind)):
        from .coind import coindproof_to_json
        tag = "lcoind" if isinstance(p, LCoind) else "coind"
        prem = " ".join(r(q) for q in p.premises)
        cp = _q(json.dumps(coindproof_to_json(p.proof), separators=(",", ":")))
        return f"({tag} ({prem}) (cp {cp}))"
    raise TypeError(f"cannot serialize {type(p).__name__}")


# ---------------------------------------------------------------- reading

def _tokens(text: str):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOK.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"bad character {text[pos]!r}", pos)
        if m.lastindex is None:
            break
        out.append((m.lastindex, m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    return out


def read_sexpr(text: str):
    """Nested lists of ('sym', s) / ('str', s) atoms."""
    toks = _tokens(text)
    stack: list = [[]]
    for kind, val, pos in toks:
        if kind == 1:
            stack.append([])
        elif kind == 2:
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", pos)
            done = stack.pop()
            stack[-1].append(done)
        elif kind == 3:
            stack[-1].append(("str", json.loads(val)))
        else:
            stack[-1].append(("sym", val))
    if len(stack) != 1:
        raise ParseError("unbalanced '('", len(text))
    if len(stack[0]) != 1:
        raise ParseError("expected exactly one top-level form", 0)
    return stack[0][0]


def load_proof(text: str, base_dir: str | None = None) -> ProofTerm:
    return _Reader(base_dir).proof(read_sexpr(text))


def load_proof_file(path: str) -> ProofTerm:
    with open(path) as fh:
        return load_proof(fh.read(), os.path.dirname(os.path.abspath(path)))


class _Reader:
    def __init__(self, base_dir):
        self.base = base_dir or "."
        self.env: dict = {}

    def _str(self, x, what="string"):
        if not (isinstance(x, tuple) and x[0] == "str"):
            raise ParseError(f"expected a quoted {what}", None)
        return x[1]

    def expr(self, x):
        return parse_expr(self._str(x, "expression"), internal=True)

    def proof(self, x) -> ProofTerm:
        if isinstance(x, tuple):
            if x[0] == "sym" and x[1] in self.env:
                return self.env[x[1]]
            raise ParseError(f"expected a proof, found {x[1]!r}", None)
        if not x or not isinstance(x[0], tuple) or x[0][0] != "sym":
            raise ParseError("proof form must start with a tag", None)
        tag, args = x[0][1], x[1:]

        def arity(n):
            if len(args) != n:
                raise ParseError(f"({tag} ...) takes {n} argument(s), got {len(args)}", None)

        if tag == "let":
            arity(2)
            for d in args[0]:
                if not isinstance(d, list) or len(d) != 2 or d[0][0] != "sym":
                    raise ParseError("let binding must be (name proof)", None)
                self.env[d[0][1]] = self.proof(d[1])
            return self.proof(args[1])
        if tag == "refl":
            arity(1)
            return Refl(self.expr(args[0]))
        if tag == "symm":
            arity(1)
            return Symm(self.proof(args[0]))
        if tag == "trans":
            arity(2)
            return Trans(self.proof(args[0]), self.proof(args[1]))
        if tag == "cxt":
            arity(2)
            return Cxt(self.expr(args[0]), self.proof(args[1]))
        if tag == "ax":
            if not args or args[0][0] != "sym":
                raise ParseError("(ax name ...) needs an axiom name", None)
            subst = []
            for b in args[1:]:
                if not isinstance(b, list) or len(b) != 2 or b[0][0] != "sym":
                    raise ParseError("axiom substitution must be (var \"expr\")", None)
                subst.append((b[0][1], self.expr(b[1])))
            return Axiom(args[0][1], tuple(subst))
        if tag == "assume":
            arity(1)
            return Assume(parse_equation(self._str(args[0], "equation")))
        if tag == "rsp*":
            arity(1)
            return RSPStar(self.proof(args[0]))
        if tag == "usp*":
            arity(2)
            return USPStar(self.proof(args[0]), self.proof(args[1]))
        if tag == "usp":
            arity(3)
            prem = tuple(tuple(self.proof(q) for q in pair) for pair in args[0])
            rows = tuple(tuple(self.expr(f) for f in row) for row in args[1])
            consts = tuple(self.expr(g) for g in args[2])
            return USP(prem, rows, consts)
        if tag in ("lcoind", "coind"):
            arity(2)
            from .coind import coindproof_from_json
            prem = tuple(self.proof(q) for q in args[0])
            src = args[1]
            if isinstance(src, tuple) and src[0] == "sym" and src[1].startswith("#"):
                path = os.path.join(self.base, src[1][1:])
                with open(path) as fh:
                    d = json.load(fh)
                cp = coindproof_from_json(d, os.path.dirname(os.path.abspath(path)))
            elif isinstance(src, list) and len(src) == 2 and src[0] == ("sym", "cp"):
                cp = coindproof_from_json(json.loads(self._str(src[1], "JSON")), self.base)
            else:
                raise ParseError("coinductive payload must be #file or (cp \"json\")", None)
            return (LCoind if tag == "lcoind" else Coind)(prem, cp)
        raise ParseError(f"unknown proof tag {tag!r}", None)
