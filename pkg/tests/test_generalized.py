from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkcheck import linalg
from gkcheck.complexgeom import ComplexStructure, HermitianMetric, HermitianPair, gk_check
from gkcheck.exterior import abelian
from gkcheck.generalized import (GeneralizedStructure, GeneralizedVector, courant_bracket, definiteness,
                                 from_complex, from_symplectic, gualtieri_pair, involutivity_check, pairing,
                                 pairing_matrix)
from gkcheck.scalar import CScalar


def _sec(g, vec=None, covec=None):
    v = g.vector(vec or [0] * g.dim)
    c = g.form(covec) if covec else g.zero_form(1)
    return GeneralizedVector(v, c)


def _pairs(entry):
    return HermitianPair(entry.plus, entry.metric), HermitianPair(entry.minus, entry.metric)


def _kahler(n: int = 4):
    g = abelian(n)
    e, i = g.coframe, CScalar.i(g.field)
    J = ComplexStructure(g, [e(k) + e(k + 1) * i for k in range(1, n, 2)])
    return g, HermitianPair(J, HermitianMetric.identity(g))


def _frac(m):
    return np.array([[float(c.to_fraction()) for c in r] for r in m])


def test_pairing_examples():
    g = abelian(6)
    assert pairing(_sec(g, [1, 0, 0, 0, 0, 0]), _sec(g, covec={(1,): 1})).to_fraction() == 0.5
    assert pairing(_sec(g, [1, 0, 0, 0, 0, 0]), _sec(g, [0, 1, 0, 0, 0, 0])).is_zero()


def test_pairing_signature():
    g = abelian(6)
    eig = np.linalg.eigvalsh(_frac(pairing_matrix(6, g.field)))
    assert (eig > 0).sum() == 6 and (eig < 0).sum() == 6


@given(st.lists(st.integers(-4, 4), min_size=8, max_size=8), st.lists(st.integers(-4, 4), min_size=8, max_size=8))
def test_pairing_is_symmetric_and_matches_matrix(x, y):
    g = abelian(4)
    u = _sec(g, x[:4], {(k + 1,): c for k, c in enumerate(x[4:])})
    v = _sec(g, y[:4], {(k + 1,): c for k, c in enumerate(y[4:])})
    assert pairing(u, v) == pairing(v, u)
    P = _frac(pairing_matrix(4, g.field))
    assert float(pairing(u, v).to_fraction()) == pytest.approx(np.array(x) @ P @ np.array(y))


def test_from_complex_blocks(s_point):
    Jg = from_complex(s_point.plus)
    assert linalg.equal(Jg.A, linalg.neg(s_point.plus.endo))
    assert linalg.is_zero(Jg.pi) and linalg.is_zero(Jg.sigma)
    n = 12
    assert linalg.equal(Jg * Jg, linalg.neg(linalg.identity(n, s_point.algebra.field.zero,
                                                             s_point.algebra.field.one)))


def test_from_symplectic_blocks():
    g, K = _kahler()
    Js = from_symplectic(K.F, g)
    assert linalg.is_zero(Js.A) and not linalg.is_zero(Js.sigma)
    # iota_{e1} (e12 + e34) = e2
    assert Js.sigma[1][0].to_fraction() == 1 and Js.sigma[0][1].to_fraction() == -1


def test_from_symplectic_errors(s_point):
    g = s_point.algebra
    with pytest.raises(ValueError):
        from_symplectic(HermitianPair(s_point.plus, s_point.metric).F, g)  # not closed
    ab = abelian(4)
    with pytest.raises(ValueError):
        from_symplectic(ab.form({(1, 2): 1}), ab)  # degenerate
    with pytest.raises(ValueError):
        from_symplectic(ab.coframe(1), ab)


def test_bad_matrices_are_rejected():
    g = abelian(2)
    f = g.field
    with pytest.raises(AssertionError):
        GeneralizedStructure(g, linalg.identity(4, f.zero, f.one))
    # squares to -1 but is not orthogonal for the pairing
    m = linalg.zeros(4, 4, f.zero)
    m[0][1], m[1][0] = f(2), f.fraction(-1, 2)
    m[2][3], m[3][2] = f(1), f(-1)
    with pytest.raises(AssertionError):
        GeneralizedStructure(g, m)
    with pytest.raises(ValueError):
        GeneralizedStructure(g, [[f.zero]])


def test_courant_reduces_to_lie_bracket(s_point):
    g = s_point.algebra
    u, v = _sec(g, [1, 0, 0, 0, 0, 0]), _sec(g, [0, 1, 0, 0, 0, 0])
    w = courant_bracket(g.zero_form(3), u, v, g)
    assert w.vec == g.bracket(g.frame(1), g.frame(2))
    assert w.covec.is_zero()


def test_courant_twist_term(s_point):
    g = s_point.algebra
    H = g.form({(1, 3, 4): -1})
    w = courant_bracket(H, _sec(g, [0, 0, 1, 0, 0, 0]), _sec(g, [0, 0, 0, 1, 0, 0]), g)
    assert w.vec.is_zero()
    assert w.covec == -g.coframe(1)


def test_courant_diagonal_is_zero(s_point):
    g = s_point.algebra
    H = g.form({(1, 3, 4): -1})
    u = _sec(g, [1, 2, 0, 1, 0, 3], {(1,): 1, (5,): -2})
    w = courant_bracket(H, u, u, g)
    assert w.vec.is_zero() and w.covec.is_zero()


def test_courant_needs_closed_h(s_point):
    g = s_point.algebra
    with pytest.raises(ValueError):
        courant_bracket(g.form({(3, 4, 5): 1}), _sec(g, [1, 0, 0, 0, 0, 0]), _sec(g, [0, 1, 0, 0, 0, 0]), g)


@pytest.mark.parametrize("name", ["s_ab", "l6"])
def test_gualtieri_pair_calibrated(name, request):
    entry = request.getfixturevalue("s_point" if name == "s_ab" else "l6")
    P, M = _pairs(entry)
    H = gk_check(P, M).H
    j1, j2 = gualtieri_pair(P, M)
    assert linalg.equal(j1 * j2, j2 * j1)
    assert involutivity_check(j1, H) and involutivity_check(j2, H)
    assert not involutivity_check(j2, -H)
    d = definiteness(j1, j2, {"b": 1.5707963267948966})
    assert d.sign == 1


@pytest.mark.parametrize("name", ["s_ab", "l6"])
def test_gualtieri_pair_imported(name, request):
    entry = request.getfixturevalue("s_point" if name == "s_ab" else "l6")
    P, M = _pairs(entry)
    H = gk_check(P, M).H
    j1, j2 = gualtieri_pair(P, M, "imported")
    # the printed formula needs the opposite twist and gives a negative definite form
    assert involutivity_check(j1, -H) and involutivity_check(j2, -H)
    assert not involutivity_check(j2, H)
    assert definiteness(j1, j2, {"b": 1.5707963267948966}).sign == -1


def test_definiteness_exact_on_l6(l6):
    d = definiteness(*gualtieri_pair(*_pairs(l6)))
    assert d.exact and d.sign == 1 and all(m > 0 for m in d.minors)


def test_kahler_reduction():
    g, K = _kahler()
    j1, j2 = gualtieri_pair(K, K)
    assert j1 == from_complex(K.J)
    assert j2 == from_symplectic(K.F, g)
    assert definiteness(j1, j2).sign == 1


def test_involutivity_examples(s_point):
    g, K = _kahler()
    assert involutivity_check(from_symplectic(K.F, g), g.zero_form(3))
    gs = s_point.algebra
    Jp = from_complex(s_point.plus)
    assert involutivity_check(Jp, gs.form({(1, 3, 4): -1}))
    # e2^e3^e4 is of type (2,1)+(1,2) and cannot obstruct; e2^e3^e5 has a (3,0) part
    assert involutivity_check(Jp, gs.form({(2, 3, 4): 1}))
    wrong = gs.form({(2, 3, 5): 1})
    assert gs.d(wrong).is_zero()
    assert not involutivity_check(Jp, wrong)


def test_unknown_convention(s_point):
    with pytest.raises(ValueError):
        gualtieri_pair(*_pairs(s_point), convention="other")


def test_apply_round_trip(s_point):
    Jg = from_complex(s_point.plus)
    g = s_point.algebra
    u = _sec(g, [1, 0, 2, 0, 0, 1], {(2,): 3})
    back = Jg.apply(Jg.apply(u))
    assert back.vec == -u.vec and back.covec == -u.covec
    assert pairing(Jg.apply(u), Jg.apply(u)) == pairing(u, u)
