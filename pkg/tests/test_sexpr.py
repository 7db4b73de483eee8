import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from milnerkit import fixtures as fx
from milnerkit.errors import ParseError
from milnerkit.kernel import CLC, CMIL, MIL, Trans, axiom, check_proof
from milnerkit.randgen import random_mil_proof
from milnerkit.sexpr import dump_proof, load_proof, load_proof_file
from milnerkit.syntax import parse_expr
from milnerkit.transform import cmil_to_clc, mil_to_cmil1

E = parse_expr


@given(st.integers(0, 10**6))
def test_roundtrip_random_proofs(seed):
    p = random_mil_proof(random.Random(seed))
    text = dump_proof(p)
    q = load_proof(text)
    assert check_proof(MIL, q) == check_proof(MIL, p)
    assert dump_proof(q) == text


def test_sharing_uses_let():
    a = axiom("comm-sum", e=E("a"), f=E("b"))
    b = axiom("comm-sum", e=E("b"), f=E("a"))
    t = Trans(a, b)
    p = Trans(t, t)
    text = dump_proof(p)
    assert text.startswith("(let ((%1 ")
    q = load_proof(text)
    assert q.left is q.right
    assert check_proof(MIL, q) == check_proof(MIL, p)


def test_roundtrip_coinductive_nodes(tmp_path):
    d = mil_to_cmil1(fx.intro_rsp_derivation())
    q = load_proof(dump_proof(d))
    assert check_proof(CMIL, q) == check_proof(CMIL, d)
    clc = cmil_to_clc(d)
    path = tmp_path / "clc.prf"
    path.write_text(dump_proof(clc))
    assert check_proof(CLC, load_proof_file(str(path))) == check_proof(CLC, clc)


def test_coinductive_payload_from_file(tmp_path):
    from milnerkit.coind import save_coindproof
    save_coindproof(fx.example_coindproof(), str(tmp_path / "c.json"))
    (tmp_path / "p.prf").write_text("(coind () #c.json)")
    from milnerkit.kernel import CMIL_BAR
    c = check_proof(CMIL_BAR, load_proof_file(str(tmp_path / "p.prf")))
    assert str(c) == "(a* . b*)* = (a + b)*"


@pytest.mark.parametrize("text", [
    "", "(", "(refl)", "(refl \"a\" \"b\")", "(frob \"a\")", "(trans (refl \"a\"))",
    "(ax)", "(ax comm-sum e)", "(lcoind () nope)", "(refl \"a +\")", "(refl \"a\") extra", "%1",
])
def test_malformed(text):
    with pytest.raises(ParseError):
        load_proof(text)
