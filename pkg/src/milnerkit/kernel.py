"""Proof systems as data, proof terms, and the proof checker."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import (CoinductiveProofInvalid, MilnerkitError, ProofError, RuleNotInSystem,
                     ShapeMismatch, SideConditionViolation)
from .syntax import (HOLE, ONE, ZERO, Act, Expr, FormalEquation, Hole, Prod, Star, Sum,
                     count_holes, is_plain, plug, render_expr, sum_of, terminates)

# ---------------------------------------------------------------- axioms

_e, _f, _g = Act("e"), Act("f"), Act("g")

AXIOMS = {
    "assoc-sum": (("e", "f", "g"), Sum(Sum(_e, _f), _g), Sum(_e, Sum(_f, _g))),
    "neutral-sum": (("e",), Sum(_e, ZERO), _e),
    "comm-sum": (("e", "f"), Sum(_e, _f), Sum(_f, _e)),
    "idempot-sum": (("e",), Sum(_e, _e), _e),
    "assoc-prod": (("e", "f", "g"), Prod(Prod(_e, _f), _g), Prod(_e, Prod(_f, _g))),
    "r-distr": (("e", "f", "g"), Prod(Sum(_e, _f), _g), Sum(Prod(_e, _g), Prod(_f, _g))),
    "id-left": (("e",), Prod(ONE, _e), _e),
    "id-right": (("e",), Prod(_e, ONE), _e),
    "deadlock": (("e",), Prod(ZERO, _e), ZERO),
    "rec-star": (("e",), Star(_e), Sum(ONE, Prod(_e, Star(_e)))),
    "trm-body": (("e",), Star(_e), Star(Sum(ONE, _e))),
}

ACI_AXIOMS = frozenset({"assoc-sum", "comm-sum", "idempot-sum"})
ALL_AXIOMS = frozenset(AXIOMS)

EL_RULES = frozenset({"Refl", "Symm", "Trans", "Cxt"})
RULES = EL_RULES | {"RSP*", "USP*", "USP", "LCoindProof", "CoindProof"}


def _subst(t: Expr, s: dict) -> Expr:
    if isinstance(t, Act):
        return s[t.name]
    if isinstance(t, Star):
        return Star(_subst(t.body, s))
    if isinstance(t, (Sum, Prod)):
        return type(t)(_subst(t.left, s), _subst(t.right, s))
    return t


def instantiate_axiom(name: str, subst) -> FormalEquation:
    """The instance of the named axiom scheme under a substitution of its variables."""
    if name not in AXIOMS:
        raise ProofError(f"unknown axiom {name!r}")
    subst = dict(subst)
    vars_, l, r = AXIOMS[name]
    if set(subst) != set(vars_):
        missing = sorted(set(vars_) - set(subst))
        extra = sorted(set(subst) - set(vars_))
        raise ProofError(f"axiom {name}: missing variables {missing}, extra variables {extra}")
    for v, x in subst.items():
        if not isinstance(x, Expr) or not is_plain(x):
            raise ProofError(f"axiom {name}: variable {v} must be a plain star expression")
    return FormalEquation(_subst(l, subst), _subst(r, subst))


# ---------------------------------------------------------------- systems

@dataclass(frozen=True)
class SystemSpec:
    name: str
    axioms: frozenset
    rules: frozenset
    assumptions: frozenset = frozenset()
    witnessed_coind: bool = False
    coind_arity: int | None = None

    def with_assumptions(self, eqs) -> "SystemSpec":
        return SystemSpec(self.name, self.axioms, self.rules,
                          frozenset(self.assumptions) | frozenset(eqs),
                          self.witnessed_coind, self.coind_arity)

    def without_assumptions(self) -> "SystemSpec":
        return SystemSpec(self.name, self.axioms, self.rules, frozenset(),
                          self.witnessed_coind, self.coind_arity)


ACI = SystemSpec("aci", ACI_AXIOMS, EL_RULES)
MIL_MINUS = SystemSpec("mil-", ALL_AXIOMS, EL_RULES)
MIL = SystemSpec("mil", ALL_AXIOMS, EL_RULES | {"RSP*"})
MIL_PRIME = SystemSpec("mil'", ALL_AXIOMS, EL_RULES | {"USP*"})
MIL_BAR_PRIME = SystemSpec("milbar'", ALL_AXIOMS, EL_RULES | {"USP"})
CMIL = SystemSpec("cmil", ALL_AXIOMS, EL_RULES | {"LCoindProof"}, witnessed_coind=True)
CMIL1 = SystemSpec("cmil1", ALL_AXIOMS, EL_RULES | {"LCoindProof"}, witnessed_coind=True,
                   coind_arity=1)
CMIL_BAR = SystemSpec("cmilbar", ALL_AXIOMS, EL_RULES | {"CoindProof"})
CLC = SystemSpec("clc", frozenset(), frozenset({"LCoindProof"}), witnessed_coind=True)
CC = SystemSpec("cc", frozenset(), frozenset({"CoindProof"}))

PRESETS = {s.name: s for s in (ACI, MIL_MINUS, MIL, MIL_PRIME, MIL_BAR_PRIME, CMIL, CMIL1,
                               CMIL_BAR, CLC, CC)}


def system(name: str) -> SystemSpec:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ProofError(f"unknown system {name!r}; known: {sorted(PRESETS)}") from None


# ---------------------------------------------------------------- proof terms

class ProofTerm:
    """Base class; `conclusion()` is computed without checking side conditions."""

    __slots__ = ("_concl",)

    def conclusion(self) -> FormalEquation:
        c = getattr(self, "_concl", None)
        if c is None:
            c = self._conclude()
            object.__setattr__(self, "_concl", c)
        return c

    @property
    def lhs(self) -> Expr:
        return self.conclusion().lhs

    @property
    def rhs(self) -> Expr:
        return self.conclusion().rhs

    def subproofs(self) -> tuple:
        return ()

    def __repr__(self):
        from .sexpr import dump_proof
        s = dump_proof(self)
        return s if len(s) < 200 else s[:197] + "..."


@dataclass(frozen=True, eq=False, repr=False)
class Axiom(ProofTerm):
    name: str
    subst: tuple  # of (variable, Expr)

    def _conclude(self):
        return instantiate_axiom(self.name, self.subst)


@dataclass(frozen=True, eq=False, repr=False)
class Refl(ProofTerm):
    expr: Expr

    def _conclude(self):
        return FormalEquation(self.expr, self.expr)


@dataclass(frozen=True, eq=False, repr=False)
class Symm(ProofTerm):
    sub: ProofTerm

    def _conclude(self):
        return self.sub.conclusion().swap()

    def subproofs(self):
        return (self.sub,)


@dataclass(frozen=True, eq=False, repr=False)
class Trans(ProofTerm):
    left: ProofTerm
    right: ProofTerm

    def _conclude(self):
        return FormalEquation(self.left.lhs, self.right.rhs)

    def subproofs(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class Cxt(ProofTerm):
    ctx: Expr
    sub: ProofTerm

    def _conclude(self):
        c = self.sub.conclusion()
        return FormalEquation(plug(self.ctx, c.lhs), plug(self.ctx, c.rhs))

    def subproofs(self):
        return (self.sub,)


@dataclass(frozen=True, eq=False, repr=False)
class Assume(ProofTerm):
    eq: FormalEquation

    def _conclude(self):
        return self.eq


def _rsp_shape(c: FormalEquation):
    """Split e = f.e + g into (e, f, g) or raise ShapeMismatch."""
    e, r = c.lhs, c.rhs
    if isinstance(r, Sum) and isinstance(r.left, Prod) and r.left.right is e:
        return e, r.left.left, r.right
    raise ShapeMismatch(f"premise {c} is not of the form e = f . e + g")


@dataclass(frozen=True, eq=False, repr=False)
class RSPStar(ProofTerm):
    sub: ProofTerm

    def _conclude(self):
        e, f, g = _rsp_shape(self.sub.conclusion())
        return FormalEquation(e, Prod(Star(f), g))

    def subproofs(self):
        return (self.sub,)


@dataclass(frozen=True, eq=False, repr=False)
class USPStar(ProofTerm):
    left: ProofTerm
    right: ProofTerm

    def _conclude(self):
        e1, _, _ = _rsp_shape(self.left.conclusion())
        e2, _, _ = _rsp_shape(self.right.conclusion())
        return FormalEquation(e1, e2)

    def subproofs(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=False, repr=False)
class USP(ProofTerm):
    """Unique solvability of a guarded linear system.

    premises[i] = (P_i1, P_i2) with P_ik concluding
    x_ik = (coeffs[i][0] . x_0k + ... + coeffs[i][n_i - 1] . x_(n_i - 1)k) + consts[i].
    """

    premises: tuple
    coeffs: tuple
    consts: tuple

    def _conclude(self):
        if not self.premises:
            raise ShapeMismatch("USP needs at least one equation")
        return FormalEquation(self.premises[0][0].lhs, self.premises[0][1].lhs)

    def subproofs(self):
        return tuple(p for pair in self.premises for p in pair)


@dataclass(frozen=True, eq=False, repr=False)
class LCoind(ProofTerm):
    """LLEE-witnessed coinductive proof over Mil- plus the premises' conclusions."""

    premises: tuple
    proof: object  # coind.CoinductiveProof

    def _conclude(self):
        return self.proof.claim()

    def subproofs(self):
        return tuple(self.premises)


@dataclass(frozen=True, eq=False, repr=False)
class Coind(ProofTerm):
    """Coinductive proof (no witness required) over Mil- plus the premises' conclusions."""

    premises: tuple
    proof: object

    def _conclude(self):
        return self.proof.claim()

    def subproofs(self):
        return tuple(self.premises)


def axiom(name: str, **subst) -> Axiom:
    vars_ = AXIOMS[name][0] if name in AXIOMS else tuple(sorted(subst))
    return Axiom(name, tuple((v, subst[v]) for v in vars_ if v in subst)
                 + tuple((v, x) for v, x in sorted(subst.items()) if v not in vars_))


# ---------------------------------------------------------------- checking

def check_proof(sys: SystemSpec, p: ProofTerm) -> FormalEquation:
    """The conclusion of p if every node is a legal rule instance in sys; raises ProofError otherwise."""
    return _Checker(sys).check(p)


def checks(sys: SystemSpec, p: ProofTerm, expected: FormalEquation | None = None) -> bool:
    try:
        c = check_proof(sys, p)
    except ProofError:
        return False
    return expected is None or c == expected


class _Checker:
    def __init__(self, sys: SystemSpec):
        self.sys = sys
        self.memo: dict = {}

    def need(self, rule: str):
        if rule not in self.sys.rules:
            raise RuleNotInSystem(f"rule {rule} is not available in system {self.sys.name}")

    def check(self, p: ProofTerm) -> FormalEquation:
        r = self.memo.get(id(p))
        if r is not None:
            return r[1]
        c = self._check(p)
        self.memo[id(p)] = (p, c)
        return c

    def _check(self, p: ProofTerm) -> FormalEquation:
        if isinstance(p, Axiom):
            if p.name not in self.sys.axioms:
                raise RuleNotInSystem(f"axiom {p.name} is not available in system {self.sys.name}")
            return instantiate_axiom(p.name, p.subst)
        if isinstance(p, Refl):
            self.need("Refl")
            if not is_plain(p.expr):
                raise ShapeMismatch("Refl needs a plain star expression")
            return FormalEquation(p.expr, p.expr)
        if isinstance(p, Symm):
            self.need("Symm")
            return self.check(p.sub).swap()
        if isinstance(p, Trans):
            self.need("Trans")
            a = self.check(p.left)
            b = self.check(p.right)
            if a.rhs is not b.lhs:
                raise ShapeMismatch(f"Trans: middle terms differ: {render_expr(a.rhs)} vs {render_expr(b.lhs)}")
            return FormalEquation(a.lhs, b.rhs)
        if isinstance(p, Cxt):
            self.need("Cxt")
            if count_holes(p.ctx) != 1 or not is_plain(_unhole(p.ctx)):
                raise ShapeMismatch("Cxt needs a plain context with exactly one hole")
            c = self.check(p.sub)
            return FormalEquation(plug(p.ctx, c.lhs), plug(p.ctx, c.rhs))
        if isinstance(p, Assume):
            if p.eq not in self.sys.assumptions:
                raise ProofError(f"assumption {p.eq} is not in the assumption set of {self.sys.name}")
            return p.eq
        if isinstance(p, RSPStar):
            self.need("RSP*")
            self._guard_first("RSP*", p.sub)
            e, f, g = _rsp_shape(self.check(p.sub))
            if terminates(f):
                raise SideConditionViolation("RSP*", render_expr(f))
            return FormalEquation(e, Prod(Star(f), g))
        if isinstance(p, USPStar):
            self.need("USP*")
            self._guard_first("USP*", p.left)
            e1, f1, g1 = _rsp_shape(self.check(p.left))
            e2, f2, g2 = _rsp_shape(self.check(p.right))
            if f1 is not f2 or g1 is not g2:
                raise ShapeMismatch("USP*: the two premises must share f and g")
            if terminates(f1):
                raise SideConditionViolation("USP*", render_expr(f1))
            return FormalEquation(e1, e2)
        if isinstance(p, USP):
            self.need("USP")
            return self._check_usp(p)
        if isinstance(p, (LCoind, Coind)):
            rule = "LCoindProof" if isinstance(p, LCoind) else "CoindProof"
            self.need(rule)
            if self.sys.coind_arity is not None and len(p.premises) != self.sys.coind_arity:
                raise ShapeMismatch(f"{rule}: system {self.sys.name} admits exactly "
                                    f"{self.sys.coind_arity} premise(s), got {len(p.premises)}")
            prem = [self.check(q) for q in p.premises]
            from .coind import coindproof_errors
            inner = MIL_MINUS.with_assumptions(prem)
            claim = p.proof.claim()
            err = coindproof_errors(inner, p.proof, claim, witnessed=isinstance(p, LCoind))
            if err is not None:
                raise CoinductiveProofInvalid(f"{rule}: embedded coinductive proof invalid: {err}")
            return claim
        raise ProofError(f"unknown proof node {type(p).__name__}")

    def _guard_first(self, rule: str, premise: ProofTerm):
        """Report a terminating guard before descending into the premise's proof."""
        try:
            _, f, _ = _rsp_shape(premise.conclusion())
        except MilnerkitError:
            return
        if terminates(f):
            raise SideConditionViolation(rule, render_expr(f))

    def _check_usp(self, p: USP) -> FormalEquation:
        n = len(p.premises)
        if n == 0 or len(p.coeffs) != n or len(p.consts) != n:
            raise ShapeMismatch("USP: premises, coefficient rows and constants must have equal length n >= 1")
        concl = [[self.check(q) for q in pair] for pair in p.premises]
        if any(len(pair) != 2 for pair in concl):
            raise ShapeMismatch("USP: every equation needs exactly two solution premises")
        for i, row in enumerate(p.coeffs):
            if len(row) > n:
                raise ShapeMismatch(f"USP: row {i} has more than n coefficients")
            for f in row:
                if terminates(f):
                    raise SideConditionViolation("USP", render_expr(f))
        for k in range(2):
            xs = [concl[i][k].lhs for i in range(n)]
            for i in range(n):
                want = Sum(sum_of([Prod(f, xs[j]) for j, f in enumerate(p.coeffs[i])]), p.consts[i])
                if concl[i][k].rhs is not want:
                    raise ShapeMismatch(f"USP: premise ({i}, {k}) is not the expected linear equation")
        return FormalEquation(concl[0][0].lhs, concl[0][1].lhs)


def _unhole(e: Expr) -> Expr:
    return plug(e, ONE) if count_holes(e) == 1 else e


def iter_nodes(p: ProofTerm):
    """All distinct nodes of a proof DAG."""
    seen = set()
    stack = [p]
    while stack:
        q = stack.pop()
        if id(q) in seen:
            continue
        seen.add(id(q))
        yield q
        stack.extend(q.subproofs())


def count_nodes(p: ProofTerm, kinds=None) -> int:
    return sum(1 for q in iter_nodes(p) if kinds is None or isinstance(q, kinds))


def uses_rule(p: ProofTerm, kinds) -> bool:
    return any(isinstance(q, kinds) for q in iter_nodes(p))


def prove_aci(e: Expr, f: Expr):
    """An ACI proof of e = f, or None when the ACI normal forms differ."""
    from .rewriting import aci_join
    return aci_join(e, f)


def interderive_fixed_point_rules(direction: str, premises: Sequence[ProofTerm]) -> ProofTerm:
    """Express an RSP* instance through USP* ("rsp*->mil'") or a USP* instance via RSP* ("usp*->mil")."""
    from .rewriting import star_fixpoint_proof
    d = direction.lower().replace(" ", "")
    if d in ("rsp*->mil'", "rsp*", "rsp"):
        (prem,) = premises
        e, f, g = _rsp_shape(prem.conclusion())
        if terminates(f):
            raise SideConditionViolation("RSP*", render_expr(f))
        return USPStar(prem, star_fixpoint_proof(f, g))
    if d in ("usp*->mil", "usp*", "usp"):
        p1, p2 = premises
        _, f, _ = _rsp_shape(p1.conclusion())
        if terminates(f):
            raise SideConditionViolation("USP*", render_expr(f))
        return Trans(RSPStar(p1), Symm(RSPStar(p2)))
    raise ProofError(f"unknown interderivation direction {direction!r}")
