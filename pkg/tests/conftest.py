from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gkcheck.catalog import get_entry
from gkcheck.exterior import KForm
from gkcheck.scalar import field_for

settings.register_profile("gk", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("gk")

AB = field_for(("a", "b"))


@st.composite
def polys(draw, field=AB, max_deg: int = 2, max_terms: int = 3):
    """Small random polynomial in the field's parameters, as a Scalar."""
    n = len(field.params)
    out = field.zero
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        c = draw(st.integers(-5, 5))
        term = field(c)
        for name, k in zip(field.params, exps):
            for _ in range(k):
                term = term * field.param(name)
        out = out + term
    return out


@st.composite
def scalars(draw, field=AB):
    num = draw(polys(field))
    den = draw(polys(field).filter(lambda p: not p.is_zero()))
    return num / den


@st.composite
def forms(draw, dim: int, degree: int, field=AB, coeffs=None):
    """Sparse random ``degree``-form with up to four terms."""
    coeffs = coeffs if coeffs is not None else polys(field, max_deg=1)
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        idx = tuple(sorted(draw(st.sets(st.integers(1, dim), min_size=degree, max_size=degree))))
        terms[idx] = draw(coeffs)
    return KForm(dim, degree, terms, field)


@st.composite
def rationals(draw, lo: int = -9, hi: int = 9):
    n = draw(st.integers(lo, hi))
    d = draw(st.integers(1, 7))
    return Fraction(n, d)


@pytest.fixture(scope="session")
def s_ab():
    return get_entry("s_ab")


@pytest.fixture(scope="session")
def l6():
    return get_entry("l6")


@pytest.fixture(scope="session")
def s_point(s_ab):
    return s_ab.at_point()


_ACCEPTANCE: dict[str, str] = {}
_SECONDS: dict[str, float] = {}


def criterion_seconds(label: str) -> float:
    """Time spent so far in the call phase of tests marked with ``label``."""
    return _SECONDS.get(label, 0.0)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if rep.when == "call":
        _SECONDS[label] = _SECONDS.get(label, 0.0) + rep.duration
    # one failing test (or fixture) fails the whole criterion
    if rep.failed:
        _ACCEPTANCE[label] = "FAIL"
    elif rep.when == "call":
        _ACCEPTANCE.setdefault(label, "PASS")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion covered by the test")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(f"{_ACCEPTANCE[key]}  criterion {key}")


def semidirect(matrix, basis: str = "e"):
    """R acting on R^m through ``matrix``: d e^{i+2} = -sum_j M[i][j] e^1 ^ e^{j+2}.

    Always a Lie algebra; unimodular iff trace M = 0.
    """
    from gkcheck.exterior import StructureEquations

    m = len(matrix)
    d = {}
    for i in range(m):
        row = {(1, j + 2): -Fraction(matrix[i][j]) for j in range(m) if matrix[i][j]}
        if row:
            d[i + 2] = row
    return StructureEquations.from_dict(m + 1, (), d, basis)


@st.composite
def square_matrices(draw, size: int, lo: int = -3, hi: int = 3):
    return [[draw(st.integers(lo, hi)) for _ in range(size)] for _ in range(size)]
