"""One test per acceptance criterion; the terminal summary lists each as PASS or FAIL."""

from __future__ import annotations

import json
import math
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkcheck import linalg
from gkcheck.catalog import get_entry, numeric_coframe_check
from gkcheck.cli import main
from gkcheck.cohomology import betti_numbers, build_complex, is_exact
from gkcheck.complexgeom import ComplexStructure, HermitianMetric, HermitianPair, gk_check, is_integrable, \
    lee_form
from gkcheck.curvature import levi_civita, ricci
from gkcheck.exterior import abelian, wedge
from gkcheck.generalized import from_complex, from_symplectic, gualtieri_pair, involutivity_check, \
    pairing_matrix, definiteness
from gkcheck.groups import (IntegerMatrix, abelianization, companion, derived_subgroup_rank,
                            inoue_lattice_presentation, lattice_matrix_check, smith_normal_form)
from gkcheck.pipeline import emit_report, verify_pipeline
from gkcheck.scalar import CScalar

from conftest import criterion_seconds, forms, rationals, semidirect, square_matrices

GAMMA = companion([-1, -1, 0])  # x^3 - x - 1
PROPERTY = settings(max_examples=200, deadline=None)


def _pairs(entry):
    return HermitianPair(entry.plus, entry.metric), HermitianPair(entry.minus, entry.metric)


@pytest.mark.criterion("1 jacobi/solvability")
@pytest.mark.parametrize("name", ["s_ab", "l6", "family_1", "family_2", "family_3"])
def test_jacobi_and_solvability(name, capsys):
    start = time.perf_counter()
    code = main(["verify", name, "--machine"])
    elapsed = time.perf_counter() - start
    doc = json.loads(capsys.readouterr().out)
    assert code == 0
    assert doc["jacobi"] is True and doc["solvable_steps"] == 2
    assert elapsed < 1.0
    # the symbolic check, not just the specialised one
    assert get_entry(name).algebra.jacobi_check()


@pytest.mark.criterion("2 unimodularity")
def test_unimodularity(s_ab, l6):
    assert verify_pipeline(s_ab, ["unimodular"]).unimodular is True
    assert verify_pipeline(l6, ["unimodular"]).unimodular is False


@pytest.mark.criterion("3 integrability certificates")
def test_integrability_lines(s_ab):
    def lines():
        e = get_entry("s_ab").at_point()
        return is_integrable(e.plus).lines(), is_integrable(e.minus).lines()

    plus, minus = lines()
    assert plus == ["d w1 = i/2 w1^wb1", "d w2 = -i/4 w1^w2 + -i/4 w2^wb1", "d w3 = -b/2 w1^w3 + -b/2 w3^wb1"]
    assert minus[0] == "d w1 = -i/2 w1^wb1"
    assert lines() == (plus, minus)
    first = emit_report(verify_pipeline(s_ab, ["integrability"]), "machine")
    assert first == emit_report(verify_pipeline(get_entry("s_ab"), ["integrability"]), "machine")


@pytest.mark.criterion("4 generalized kaehler")
def test_generalized_kaehler(s_point, l6):
    g = s_point.algebra
    rep = gk_check(*_pairs(s_point))
    assert rep.holds and not rep.trivial
    assert rep.H == g.form({(1, 3, 4): -1})
    assert g.d(rep.H).is_zero()
    assert not is_exact(build_complex(g), rep.H)
    assert verify_pipeline(get_entry("s_ab")).torsion_class == "non-exact"
    rep6 = gk_check(*_pairs(l6))
    assert rep6.holds
    assert rep6.H == l6.algebra.form({(1, 3, 4): -1, (1, 5, 6): -1})
    assert l6.algebra.d(rep6.H).is_zero()


@pytest.mark.criterion("5 ricci")
def test_ricci(s_ab, s_point, l6):
    ric = ricci(levi_civita(s_point.algebra, s_point.metric))
    for i in range(6):
        for j in range(6):
            assert ric[i][j].to_fraction() == (Fraction(-3, 2) if i == j == 1 else 0)
    generic = ricci(levi_civita(s_ab.algebra, s_ab.metric))
    assert all("b" not in c.parameters() for r in generic for c in r)
    ric6 = ricci(levi_civita(l6.algebra, l6.metric))
    diag = [Fraction(1), Fraction(-2)] + [Fraction(-1, 2)] * 4
    assert [[c.to_fraction() for c in r] for r in ric6] == \
        [[diag[i] if i == j else Fraction(0) for j in range(6)] for i in range(6)]


@pytest.mark.criterion("6 lee form")
def test_lee_form(s_point, l6):
    assert lee_form(_pairs(s_point)[0]) is None
    lee = lee_form(_pairs(l6)[0])
    assert lee is not None and lee.lck
    assert lee.theta == l6.algebra.coframe(2)
    assert l6.algebra.d(lee.theta).is_zero()


@pytest.mark.criterion("7 betti triangle")
def test_betti_triangle(s_ab):
    assert betti_numbers(build_complex(s_ab.algebra))[1] == 1
    P = inoue_lattice_presentation(GAMMA, 4)
    ab = abelianization(P)
    rank = derived_subgroup_rank(P)
    assert ab.free_rank == 1 and rank == 5
    assert ab.free_rank + rank == len(P.generators) == 6
    M = P.relation_matrix()
    s = smith_normal_form(M)
    assert (s.U @ M) @ s.V == s.D


@pytest.mark.criterion("8 lattice")
def test_lattice():
    rep = lattice_matrix_check(GAMMA)
    assert rep.passes and rep.det == 1 and rep.discriminant < 0
    assert 1.3247 < rep.real_root < 1.3248
    assert abs(rep.real_root ** 3 - rep.real_root - 1) < 1e-10
    assert not lattice_matrix_check(IntegerMatrix.identity(3)).passes


@pytest.mark.criterion("9 generalized geometry")
@pytest.mark.parametrize("name", ["s_ab", "l6"])
def test_generalized_layer(name, request):
    entry = request.getfixturevalue("s_point" if name == "s_ab" else "l6")
    g = entry.algebra
    f = g.field
    P, M = _pairs(entry)
    j1, j2 = gualtieri_pair(P, M)
    minus_id = linalg.neg(linalg.identity(2 * g.dim, f.zero, f.one))
    assert linalg.equal(j1 * j2, j2 * j1)
    pm = pairing_matrix(g.dim, f)
    for J in (j1, j2):
        assert linalg.equal(J * J, minus_id)
        assert linalg.equal(linalg.matmul(linalg.matmul(linalg.transpose(J.matrix), pm), J.matrix), pm)
    d = definiteness(j1, j2, {"b": math.pi / 2})
    assert d.sign == 1 and all(m > 1e-9 for m in d.minors)
    H = gk_check(P, M).H
    assert involutivity_check(j1, H) and involutivity_check(j2, H)


@pytest.mark.criterion("9 generalized geometry")
def test_kaehler_degeneration():
    g = abelian(4)
    e, i = g.coframe, CScalar.i(g.field)
    K = HermitianPair(ComplexStructure(g, [e(1) + e(2) * i, e(3) + e(4) * i]), HermitianMetric.identity(g))
    j1, j2 = gualtieri_pair(K, K)
    z = linalg.zeros(4, 4, g.field.zero)
    J = K.J.endo
    assert linalg.equal(j1.matrix, linalg.block([[linalg.neg(J), z], [z, linalg.transpose(J)]]))
    assert j1 == from_complex(K.J)
    # omega = e12 + e34: iota_X omega has matrix W, and the inverse is -W
    W = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    Wm = [[g.field(c) for c in r] for r in W]
    assert K.F == g.form({(1, 2): 1, (3, 4): 1})
    assert linalg.equal(j2.matrix, linalg.block([[z, linalg.neg(linalg.inverse(Wm))], [Wm, z]]))
    assert j2 == from_symplectic(K.F, g)


@pytest.mark.criterion("10 numeric cross-check")
def test_numeric_coframe(s_ab):
    assign = {"a": 1, "b": "pi/2"}
    dev = numeric_coframe_check(s_ab.model, s_ab.algebra, assign, samples=100, step=1e-5)
    half = numeric_coframe_check(s_ab.model, s_ab.algebra, assign, samples=100, step=5e-6)
    assert dev <= 1e-6
    assert 3 <= dev / half <= 5


# property suites: each runs at least 200 examples


def _g():
    return get_entry("s_ab").algebra


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_property_antiderivation(p, q, data):
    g = _g()
    x, y = data.draw(forms(6, p)), data.draw(forms(6, q))
    assert g.d(wedge(x, y)) == wedge(g.d(x), y) + wedge(x, g.d(y)) * (-1) ** p


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_property_wedge_associativity(p, q, r, data):
    x, y, z = (data.draw(forms(6, k)) for k in (p, q, r))
    assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(st.integers(0, 4), st.data())
def test_property_d_squared(k, data):
    g = _g()
    assert g.d(g.d(data.draw(forms(6, k)))).is_zero()


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(square_matrices(3))
def test_property_euler_characteristic(m):
    b = betti_numbers(build_complex(semidirect(m)))
    assert sum((-1) ** k * x for k, x in enumerate(b)) == 0


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(rationals(1, 9), rationals(1, 9))
def test_property_poincare_duality(a, b):
    g = _g().specialize({"a": a, "b": b})
    betti = betti_numbers(build_complex(g))
    assert all(betti[k] == betti[6 - k] for k in range(7))


@st.composite
def _int_matrices(draw):
    n, m = draw(st.integers(1, 5)), draw(st.integers(1, 5))
    return IntegerMatrix([[draw(st.integers(-9, 9)) for _ in range(m)] for _ in range(n)])


@pytest.mark.criterion("11 property suites")
@PROPERTY
@given(_int_matrices())
def test_property_snf_reconstruction(M):
    s = smith_normal_form(M)
    assert (s.U @ M) @ s.V == s.D
    d = [abs(x) for x in s.diagonal]
    assert all(d[k + 1] % d[k] == 0 for k in range(len(d) - 1) if d[k])


@pytest.mark.criterion("11 property suites")
def test_property_suites_budget():
    # runs last in this module, after every property suite above
    assert 0 < criterion_seconds("11 property suites") < 30
