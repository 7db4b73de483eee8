"""Star expressions, stacked star expressions, parsing, printing and static predicates.

Expressions are hash-consed: structurally equal terms are the same object, so
equality is identity and hashing is constant time.
"""
from __future__ import annotations

import re
import weakref
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ParseError

EMPTY = "1"  # reserved name of the empty step

_PREC_SUM, _PREC_PROD, _PREC_STAR = 1, 2, 3


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ("_hash", "_key", "_size", "_memo", "__weakref__")
    rank = -1
    children: tuple = ()

    def __repr__(self):
        return f"<{type(self).__name__} {render_expr(self)}>"

    def __str__(self):
        return render_expr(self)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)

    def __reduce__(self):
        return (parse_expr, (render_expr(self), None, True))

    @property
    def size(self):
        return self._size


_TABLE: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


def _make(cls, key, init):
    obj = _TABLE.get(key)
    if obj is None:
        obj = object.__new__(cls)
        init(obj)
        obj._hash = hash(key)
        obj._key = None
        obj._memo = None
        _TABLE[key] = obj
    return obj


class Zero(Expr):
    __slots__ = ()
    rank = 0

    def __new__(cls):
        def init(o):
            o._size = 1
        return _make(cls, ("0",), init)


class One(Expr):
    __slots__ = ()
    rank = 1

    def __new__(cls):
        def init(o):
            o._size = 1
        return _make(cls, ("1",), init)


class Act(Expr):
    __slots__ = ("name",)
    rank = 2

    def __new__(cls, name: str):
        if name in ("0", EMPTY):
            raise ValueError(f"reserved name {name!r} cannot be an action")

        def init(o):
            o.name = name
            o._size = 1
        return _make(cls, ("a", name), init)


class _Binary(Expr):
    __slots__ = ("left", "right")
    tag = ""

    def __new__(cls, left: Expr, right: Expr):
        def init(o):
            o.left = left
            o.right = right
            o._size = left._size + right._size + 1
        return _make(cls, (cls.tag, id(left), id(right)), init)

    @property
    def children(self):
        return (self.left, self.right)


class Sum(_Binary):
    __slots__ = ()
    rank = 5
    tag = "+"


class Prod(_Binary):
    __slots__ = ()
    rank = 4
    tag = "."


class StackProd(_Binary):
    """Stacked product E (*) f*; the right operand must be a Star."""

    __slots__ = ()
    rank = 6
    tag = "@"

    def __new__(cls, left: Expr, right: Expr):
        if not isinstance(right, Star):
            raise ValueError("right operand of a stacked product must be a star")
        return super().__new__(cls, left, right)


class Star(Expr):
    __slots__ = ("body",)
    rank = 3

    def __new__(cls, body: Expr):
        def init(o):
            o.body = body
            o._size = body._size + 1
        return _make(cls, ("*", id(body)), init)

    @property
    def children(self):
        return (self.body,)


class Hole(Expr):
    """The hole of a one-hole context."""

    __slots__ = ()
    rank = 7

    def __new__(cls):
        def init(o):
            o._size = 1
        return _make(cls, ("[]",), init)


ZERO = Zero()
ONE = One()
HOLE = Hole()


def sort_key(e: Expr):
    """Total order on syntax: constructor rank, then children lexicographically."""
    k = e._key
    if k is None:
        if isinstance(e, Act):
            k = (e.rank, e.name)
        else:
            k = (e.rank,) + tuple(sort_key(c) for c in e.children)
        e._key = k
    return k


@dataclass(frozen=True)
class FormalEquation:
    lhs: Expr
    rhs: Expr

    def __str__(self):
        return f"{render_expr(self.lhs)} = {render_expr(self.rhs)}"

    def swap(self) -> "FormalEquation":
        return FormalEquation(self.rhs, self.lhs)


@dataclass(frozen=True)
class Alphabet:
    actions: tuple

    def __post_init__(self):
        for a in self.actions:
            if a in ("0", EMPTY):
                raise ValueError(f"alphabet may not contain reserved name {a!r}")
        object.__setattr__(self, "actions", tuple(sorted(set(self.actions))))

    def __contains__(self, a):
        return a in self.actions

    def __iter__(self):
        return iter(self.actions)


# ---------------------------------------------------------------- printing

def _prec(e: Expr) -> int:
    if isinstance(e, Sum):
        return _PREC_SUM
    if isinstance(e, (Prod, StackProd)):
        return _PREC_PROD
    if isinstance(e, Star):
        return _PREC_STAR
    return 4


def render_expr(e: Expr) -> str:
    """Minimal-parenthesis rendering; + and . are left-associative."""
    out: list = []
    _render(e, out)
    return "".join(out)


def _render(e: Expr, out: list):
    # explicit stack to survive deep terms
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, str):
            out.append(x)
        elif isinstance(x, Zero):
            out.append("0")
        elif isinstance(x, One):
            out.append("1")
        elif isinstance(x, Act):
            out.append(x.name)
        elif isinstance(x, Hole):
            out.append("[]")
        elif isinstance(x, Star):
            stack.append("*")
            if _prec(x.body) < _PREC_STAR:
                stack.extend([")", x.body, "("])
            else:
                stack.append(x.body)
        else:
            p = _prec(x)
            op = {Sum: " + ", Prod: " . ", StackProd: " @ "}[type(x)]
            r, l = x.right, x.left
            if _prec(r) <= p:
                stack.extend([")", r, "("])
            else:
                stack.append(r)
            stack.append(op)
            if _prec(l) < p:
                stack.extend([")", l, "("])
            else:
                stack.append(l)


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:([a-z0-9]+)|(\[\])|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        toks.append((m.group(m.lastindex), start))
        pos = m.end()
    toks.append(("<end>", len(text)))
    return toks


class _Parser:
    def __init__(self, text, alphabet, internal):
        self.toks = _tokenize(text)
        self.i = 0
        self.alphabet = alphabet
        self.internal = internal

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, tok=None):
        t, p = self.toks[self.i]
        if tok is not None and t != tok:
            raise ParseError(f"expected {tok!r}, found {t!r}", p)
        self.i += 1
        return t

    def parse(self):
        e = self.sum()
        if self.peek() != "<end>":
            raise ParseError(f"unexpected token {self.peek()!r}", self.pos())
        return e

    def sum(self):
        e = self.prod()
        while self.peek() == "+":
            self.take()
            e = Sum(e, self.prod())
        return e

    def prod(self):
        e = self.star()
        while self.peek() in (".", "@"):
            op = self.take()
            p = self.pos()
            r = self.star()
            if op == ".":
                e = Prod(e, r)
            else:
                if not self.internal:
                    raise ParseError("stacked product '@' is not part of the input grammar", p)
                if not isinstance(r, Star):
                    raise ParseError("right operand of '@' must be a star", p)
                e = StackProd(e, r)
        return e

    def star(self):
        e = self.atom()
        while self.peek() == "*":
            self.take()
            e = Star(e)
        return e

    def atom(self):
        t, p = self.toks[self.i]
        if t == "(":
            self.take()
            e = self.sum()
            self.take(")")
            return e
        if t == "[]":
            if not self.internal:
                raise ParseError("context hole '[]' not allowed here", p)
            self.take()
            return HOLE
        if t == "0":
            self.take()
            return ZERO
        if t == "1":
            self.take()
            return ONE
        if t != "<end>" and re.fullmatch(r"[a-z0-9]+", t):
            self.take()
            if self.alphabet is not None and t not in self.alphabet:
                raise ParseError(f"unknown action {t!r}", p)
            return Act(t)
        raise ParseError(f"unexpected token {t!r}", p)


def parse_expr(text: str, alphabet: Alphabet | Iterable[str] | None = None,
               internal: bool = False) -> Expr:
    """Parse the concrete grammar; `internal` also admits '@' and the hole '[]'."""
    if alphabet is not None and not isinstance(alphabet, Alphabet):
        alphabet = Alphabet(tuple(alphabet))
    return _Parser(text, alphabet, internal).parse()


def parse_equation(text: str, alphabet=None) -> FormalEquation:
    if text.count("=") != 1:
        raise ParseError("an equation needs exactly one '='", text.find("=") if "=" in text else None)
    l, r = text.split("=")
    try:
        rhs = parse_expr(r, alphabet)
    except ParseError as exc:
        off = len(l) + 1
        raise ParseError(str(exc).split(" (at")[0], (exc.position or 0) + off) from None
    return FormalEquation(parse_expr(l, alphabet), rhs)


# ---------------------------------------------------------------- predicates

_MISSING = object()


def _per_node(fn):
    """Cache a structural function on each (shared) node, so DAGs cost linear time."""
    name = fn.__name__

    def wrapper(e):
        m = e._memo
        if m is None:
            m = e._memo = {}
        r = m.get(name, _MISSING)
        if r is _MISSING:
            r = m[name] = fn(e)
        return r

    wrapper.__name__ = name
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_per_node
def star_height(e: Expr) -> int:
    if isinstance(e, Star):
        return star_height(e.body) + 1
    if isinstance(e, (Sum, Prod, StackProd)):
        return max(star_height(e.left), star_height(e.right))
    return 0


@_per_node
def terminates(e: Expr) -> bool:
    """Immediate termination; stacked products never terminate."""
    if isinstance(e, (One, Star)):
        return True
    if isinstance(e, Sum):
        return terminates(e.left) or terminates(e.right)
    if isinstance(e, Prod):
        return terminates(e.left) and terminates(e.right)
    return False


@_per_node
def normed(e: Expr) -> bool:
    """Some path of length >= 0 reaches a terminating expression."""
    if isinstance(e, Zero):
        return False
    if isinstance(e, (One, Act, Star)):
        return True
    if isinstance(e, Sum):
        return normed(e.left) or normed(e.right)
    if isinstance(e, Prod):
        return normed(e.left) and normed(e.right)
    if isinstance(e, StackProd):
        return normed(e.left)
    return False


@_per_node
def normed_plus(e: Expr) -> bool:
    """Some path of length >= 1 reaches a terminating expression."""
    if isinstance(e, (Zero, One)):
        return False
    if isinstance(e, Act):
        return True
    if isinstance(e, Sum):
        return normed_plus(e.left) or normed_plus(e.right)
    if isinstance(e, Prod):
        return ((normed_plus(e.left) and normed(e.right))
                or (terminates(e.left) and normed_plus(e.right)))
    if isinstance(e, Star):
        return normed_plus(e.body)
    raise TypeError(f"normed_plus is defined on plain expressions, got {e!r}")


@_per_node
def is_plain(e: Expr) -> bool:
    if isinstance(e, (StackProd, Hole)):
        return False
    return all(is_plain(c) for c in e.children)


@_per_node
def _actions(e: Expr) -> frozenset:
    if isinstance(e, Act):
        return frozenset([e.name])
    return frozenset().union(*(_actions(c) for c in e.children))


def actions_of(e: Expr) -> set:
    return set(_actions(e))


def sum_of(summands: Sequence[Expr]) -> Expr:
    """0 for [], the element for [x], else the left-nested sum."""
    if not summands:
        return ZERO
    e = summands[0]
    for s in summands[1:]:
        e = Sum(e, s)
    return e


def summands(e: Expr) -> list:
    """Leaves of the maximal sum tree rooted at e, left to right."""
    out = []
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Sum):
            stack.append(x.right)
            stack.append(x.left)
        else:
            out.append(x)
    return out


def aci_normalize(e: Expr) -> Expr:
    """Flatten sums, sort summands by `sort_key`, drop duplicates; recursively."""
    memo: dict = {}
    return _aci(e, memo)


def _aci(e, memo):
    r = memo.get(e)
    if r is not None:
        return r
    if isinstance(e, Sum):
        leaves = {}
        for s in summands(e):
            n = _aci(s, memo)
            for leaf in summands(n):
                leaves[leaf] = None
        r = sum_of(sorted(leaves, key=sort_key))
    elif isinstance(e, Prod):
        r = Prod(_aci(e.left, memo), _aci(e.right, memo))
    elif isinstance(e, StackProd):
        r = StackProd(_aci(e.left, memo), _aci(e.right, memo))
    elif isinstance(e, Star):
        r = Star(_aci(e.body, memo))
    else:
        r = e
    memo[e] = r
    return r


# ---------------------------------------------------------------- contexts

def plug(ctx: Expr, e: Expr) -> Expr:
    """Replace the (unique) hole of ctx by e."""
    if isinstance(ctx, Hole):
        return e
    if isinstance(ctx, Star):
        return Star(plug(ctx.body, e))
    if isinstance(ctx, _Binary):
        if has_hole(ctx.left):
            return type(ctx)(plug(ctx.left, e), ctx.right)
        return type(ctx)(ctx.left, plug(ctx.right, e))
    raise ValueError("context has no hole")


@_per_node
def count_holes(e: Expr) -> int:
    if isinstance(e, Hole):
        return 1
    return sum(count_holes(c) for c in e.children)


def has_hole(e: Expr) -> bool:
    return count_holes(e) > 0


def context_at(e: Expr, path: Sequence[int]) -> tuple:
    """Split e at `path` (child indices) into (context, subterm)."""
    if not path:
        return HOLE, e
    i = path[0]
    if isinstance(e, Star):
        if i != 0:
            raise IndexError(path)
        c, s = context_at(e.body, path[1:])
        return Star(c), s
    if isinstance(e, _Binary):
        if i == 0:
            c, s = context_at(e.left, path[1:])
            return type(e)(c, e.right), s
        if i == 1:
            c, s = context_at(e.right, path[1:])
            return type(e)(e.left, c), s
    raise IndexError(path)


def subterm_at(e: Expr, path: Sequence[int]) -> Expr:
    for i in path:
        e = e.children[i]
    return e


def positions(e: Expr):
    """All paths into e (preorder)."""
    out = []
    stack = [(e, ())]
    while stack:
        x, p = stack.pop()
        out.append(p)
        for i, c in reversed(list(enumerate(x.children))):
            stack.append((c, p + (i,)))
    return out


def sum_path(n: int, k: int) -> tuple:
    """Path to the k-th summand (0-based) of a left-nested sum_of of n summands."""
    if n <= 1:
        return ()
    if k == n - 1:
        return (1,)
    return (0,) + sum_path(n - 1, k)
