import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from milnerkit.syntax import ONE, ZERO, Act, Prod, Star, Sum  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def exprs(letters=("a", "b"), max_leaves=8):
    base = st.sampled_from([ZERO, ONE] + [Act(x) for x in letters])
    return st.recursive(
        base,
        lambda ch: st.one_of(
            ch.map(Star),
            st.tuples(ch, ch).map(lambda t: Sum(*t)),
            st.tuples(ch, ch).map(lambda t: Prod(*t)),
        ),
        max_leaves=max_leaves,
    )


# ---------------------------------------------------------------- acceptance report

ACCEPTANCE: dict = {}


@pytest.fixture
def criterion():
    def record(n: int, ok: bool, text: str):
        ACCEPTANCE[n] = (ok, text)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        tr.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {text}")
