import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exprs
from oracles import naive_bisimilar
from milnerkit.errors import ProofError, RuleNotInSystem, ShapeMismatch, SideConditionViolation
from milnerkit.kernel import (ACI, AXIOMS, CC, CLC, CMIL, MIL, MIL_MINUS, MIL_PRIME, PRESETS, USP,
                              Assume, Cxt, Refl, RSPStar, Symm, Trans, USPStar, axiom, check_proof,
                              checks, count_nodes, instantiate_axiom, interderive_fixed_point_rules,
                              system)
from milnerkit.randgen import random_mil_proof, random_rsp_instance
from milnerkit.rewriting import star_fixpoint_proof
from milnerkit.solutions import prove_solution_step, rsp_premise
from milnerkit.syntax import HOLE, FormalEquation, Prod, Star, Sum, parse_equation, parse_expr

E = parse_expr


@pytest.mark.parametrize("name", sorted(AXIOMS))
def test_axioms_sound_under_oracle(name):
    rng = random.Random(name)
    from milnerkit.randgen import random_expr
    for _ in range(15):
        sub = {v: random_expr(rng, rng.randint(0, 3)) for v in AXIOMS[name][0]}
        eq = instantiate_axiom(name, sub)
        assert naive_bisimilar(eq.lhs, eq.rhs), (name, str(eq))
        assert check_proof(MIL_MINUS, axiom(name, **sub)) == eq


def test_axiom_shapes():
    eq = check_proof(MIL_MINUS, axiom("rec-star", e=E("a")))
    assert str(eq) == "a* = 1 + a . a*"
    eq = check_proof(MIL_MINUS, axiom("trm-body", e=E("a")))
    assert str(eq) == "a* = (1 + a)*"
    eq = check_proof(MIL_MINUS, axiom("r-distr", e=E("a"), f=E("b"), g=E("c")))
    assert str(eq) == "(a + b) . c = a . c + b . c"


def test_systems():
    assert set(PRESETS) >= {"aci", "mil-", "mil", "mil'", "cmil", "cmil1", "clc", "cc"}
    assert system("MIL") is MIL
    with pytest.raises(ProofError):
        system("nope")
    with pytest.raises(RuleNotInSystem):
        check_proof(ACI, axiom("rec-star", e=E("a")))
    assert check_proof(ACI, axiom("comm-sum", e=E("a"), f=E("b")))
    with pytest.raises(RuleNotInSystem):
        check_proof(CLC, Refl(E("a")))
    with pytest.raises(RuleNotInSystem):
        check_proof(MIL_MINUS, RSPStar(Assume(rsp_premise(E("x"), E("a"), E("1")))))


def test_structural_rules():
    p = axiom("comm-sum", e=E("a"), f=E("b"))
    assert check_proof(MIL_MINUS, Symm(p)) == parse_equation("b + a = a + b")
    q = axiom("comm-sum", e=E("b"), f=E("a"))
    assert check_proof(MIL_MINUS, Trans(p, q)) == parse_equation("a + b = a + b")
    with pytest.raises(ShapeMismatch):
        check_proof(MIL_MINUS, Trans(p, p))
    c = Cxt(Prod(HOLE, E("c")), p)
    assert check_proof(MIL_MINUS, c) == parse_equation("(a + b) . c = (b + a) . c")
    with pytest.raises(ShapeMismatch):
        check_proof(MIL_MINUS, Cxt(Sum(HOLE, HOLE), p))
    with pytest.raises(ShapeMismatch):
        check_proof(MIL_MINUS, Cxt(E("a"), p))


def test_assumptions():
    eq = parse_equation("x = a . x + b")
    with pytest.raises(ProofError):
        check_proof(MIL, Assume(eq))
    s = MIL.with_assumptions([eq])
    assert check_proof(s, RSPStar(Assume(eq))) == parse_equation("x = a* . b")
    assert s.without_assumptions().assumptions == frozenset()


def test_rsp_guard():
    eq = parse_equation("x = (a + 1) . x + b")
    s = MIL.with_assumptions([eq])
    with pytest.raises(SideConditionViolation) as info:
        check_proof(s, RSPStar(Assume(eq)))
    assert info.value.guard == "a + 1"
    with pytest.raises(ShapeMismatch):
        check_proof(s, RSPStar(axiom("comm-sum", e=E("a"), f=E("b"))))


def test_usp_star():
    a_star = E("a*")
    p1 = prove_solution_step(a_star, E("a . a* + 1"))
    p2 = star_fixpoint_proof(E("a"), E("1"))
    c = check_proof(MIL_PRIME, USPStar(p1, p2))
    assert c == FormalEquation(a_star, E("a* . 1"))
    bad = prove_solution_step(E("(a+1)*"), E("(a+1) . (a+1)* + 1"))
    with pytest.raises(SideConditionViolation):
        check_proof(MIL_PRIME, USPStar(bad, bad))
    other = prove_solution_step(E("b*"), E("b . b* + 1"))
    with pytest.raises(ShapeMismatch):
        check_proof(MIL_PRIME, USPStar(p1, other))


def test_usp_linear_system():
    # x0 = 0 . x0 + a . x1 + 1 and x1 = b . x0 + 0, solved in two syntactically different ways
    from milnerkit.kernel import MIL_BAR_PRIME
    coeffs = ((E("0"), E("a")), (E("b"),))
    consts = (E("1"), E("0"))

    def rhs(i, xs):
        row = sum(([Prod(f, xs[j])] for j, f in enumerate(coeffs[i])), [])
        return Sum(row[0] if len(row) == 1 else Sum(*row), consts[i])
    sol_a = [E("(a . b)*"), E("b . (a . b)*")]
    sol_b = [E("(a . b)* . 1"), E("b . ((a . b)* . 1)")]
    prem = tuple((prove_solution_step(sol_a[i], rhs(i, sol_a)),
                  prove_solution_step(sol_b[i], rhs(i, sol_b))) for i in range(2))
    c = check_proof(MIL_BAR_PRIME, USP(prem, coeffs, consts))
    assert c == FormalEquation(sol_a[0], sol_b[0])
    assert naive_bisimilar(c.lhs, c.rhs)
    with pytest.raises(SideConditionViolation):
        check_proof(MIL_BAR_PRIME, USP(prem, ((E("1"), E("a")), (E("b"),)), consts))
    with pytest.raises(ShapeMismatch):
        check_proof(MIL_BAR_PRIME, USP(prem, coeffs, (E("0"), E("0"))))
    with pytest.raises(RuleNotInSystem):
        check_proof(MIL, USP(prem, coeffs, consts))


@given(st.integers(0, 10**6))
def test_random_mil_proofs_sound(seed):
    p = random_mil_proof(random.Random(seed))
    c = check_proof(MIL, p)
    assert naive_bisimilar(c.lhs, c.rhs)
    assert checks(MIL, p, c)
    assert not checks(MIL, p, c.swap()) or c.lhs is c.rhs


@given(st.integers(0, 10**6))
def test_interderivation(seed):
    prem, e, f, g = random_rsp_instance(random.Random(seed))
    want = FormalEquation(e, Prod(Star(f), g))
    assert check_proof(MIL_PRIME, interderive_fixed_point_rules("rsp*->mil'", [prem])) == want
    p = interderive_fixed_point_rules("usp*->mil", [prem, star_fixpoint_proof(f, g)])
    assert check_proof(MIL, p) == want


def test_interderivation_errors():
    eq = parse_equation("x = (a + 1) . x + b")
    with pytest.raises(SideConditionViolation):
        interderive_fixed_point_rules("rsp*->mil'", [Assume(eq)])
    with pytest.raises(ProofError):
        interderive_fixed_point_rules("sideways", [Assume(eq)])


def test_count_nodes():
    p = Trans(axiom("comm-sum", e=E("a"), f=E("b")), axiom("comm-sum", e=E("b"), f=E("a")))
    assert count_nodes(p) == 3
    assert count_nodes(p, (Trans,)) == 1
    assert CMIL.witnessed_coind and not CC.witnessed_coind
