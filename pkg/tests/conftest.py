import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tmodules.algebra import get_field
from tmodules.skew import SkewPoly

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).resolve().parent.parent / "data"

# filled in by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {text}")


@pytest.fixture
def data_dir():
    return DATA


primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def polys(draw, p, max_degree=3):
    coeffs = draw(st.lists(st.integers(0, p - 1), max_size=max_degree + 1))
    return get_field(p).poly(coeffs)


@st.composite
def ratfuncs(draw, p, max_degree=3, nonzero=False):
    num = draw(polys(p, max_degree))
    den = draw(polys(p, max_degree).filter(lambda x: not x.is_zero()))
    x = num / den
    if nonzero and x.is_zero():
        x = get_field(p).one
    return x


@st.composite
def skewpolys(draw, p, max_degree=3, coeff_degree=2):
    n = draw(st.integers(0, max_degree + 1))
    return SkewPoly([draw(ratfuncs(p, coeff_degree)) for _ in range(n)], p)
