from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gkcheck.exterior import KForm, StructureEquations, abelian, contract, sort_sign, wedge

from conftest import AB, forms, semidirect, square_matrices

a = AB.param("a")
b = AB.param("b")


def brute_force_d(g: StructureEquations, alpha: KForm) -> KForm:
    """Invariant formula d alpha(X0..Xk) = sum_{i<j} (-1)^{i+j} alpha([Xi,Xj], ...)."""
    k = alpha.degree
    terms = {}
    for key in combinations(range(1, g.dim + 1), k + 1):
        xs = [g.frame(i) for i in key]
        total = g.field.zero
        for i, j in combinations(range(k + 1), 2):
            rest = [x for t, x in enumerate(xs) if t not in (i, j)]
            val = alpha.evaluate([g.bracket(xs[i], xs[j])] + rest)
            total = total + (val if (i + j) % 2 == 0 else -val)
        terms[key] = total
    return KForm(g.dim, k + 1, terms, g.field)


def test_sort_sign():
    assert sort_sign((2, 1)) == (-1, (1, 2))
    assert sort_sign((1, 3, 2)) == (-1, (1, 2, 3))
    assert sort_sign((3, 1, 2)) == (1, (1, 2, 3))
    assert sort_sign((1, 1))[0] == 0


def test_wedge_examples(s_ab):
    e = s_ab.algebra.coframe
    assert wedge(e(1), e(2)).terms == {(1, 2): AB.one}
    assert wedge(e(2), e(1)).terms == {(1, 2): -AB.one}
    assert wedge(e(1) + e(2), e(1) - e(2)) == wedge(e(1), e(2)) * -2
    assert wedge(e(3), e(3)).is_zero()


def test_kform_rejects_bad_keys():
    with pytest.raises(ValueError):
        KForm(3, 2, {(2, 1): AB.one})
    with pytest.raises(ValueError):
        KForm(3, 2, {(1, 4): AB.one})
    with pytest.raises(ValueError):
        KForm(3, 2, {(1,): AB.one})


def test_zero_coefficients_are_dropped():
    f = KForm(3, 1, {(1,): AB.zero, (2,): AB.one})
    assert list(f.terms) == [(2,)]


def test_d_examples(s_ab, l6):
    g = s_ab.algebra
    e = g.coframe
    assert g.d(e(1)) == wedge(e(1), e(2)) * a
    assert g.d(e(2)).is_zero()
    assert g.d(wedge(wedge(e(1), e(3)), e(4))).is_zero()
    f = l6.algebra.coframe
    assert l6.algebra.d(wedge(f(3), f(4))) == wedge(wedge(f(2), f(3)), f(4))


def test_d_matches_invariant_formula(s_ab, l6):
    for g in (s_ab.algebra, l6.algebra):
        e = g.coframe
        samples = [e(1), e(5), wedge(e(1), e(3)), wedge(e(3), e(4)) + wedge(e(2), e(6)),
                   wedge(wedge(e(1), e(3)), e(4))]
        for alpha in samples:
            assert g.d(alpha) == brute_force_d(g, alpha)


def test_contract_examples(s_ab):
    g = s_ab.algebra
    e = g.coframe
    assert contract(g.frame(1), wedge(e(1), e(2))) == e(2)
    assert contract(g.frame(3), wedge(e(1), e(2))).is_zero()
    assert contract(g.frame(2), wedge(wedge(e(1), e(3)), e(4))).is_zero()
    assert contract(g.frame(1), wedge(wedge(e(1), e(3)), e(4))) == wedge(e(3), e(4))
    assert contract(g.frame(3), wedge(wedge(e(1), e(3)), e(4))) == -wedge(e(1), e(4))
    with pytest.raises(ValueError):
        contract(g.frame(1), g.zero_form(0))


def test_jacobi_holds_on_catalog(s_ab, l6):
    assert s_ab.algebra.jacobi_check()
    assert l6.algebra.jacobi_check()


def test_corrupted_algebra_fails_jacobi():
    d = {1: {(1, 2): a}, 3: {(2, 3): a / 2}, 4: {(2, 4): a / 2}, 5: {(1, 6): b}, 6: {(2, 5): -b}}
    g = StructureEquations.from_dict(6, ("a", "b"), d)
    res = g.jacobi_check()
    assert not res
    # by hand: d(d e5) = b (d e1 ^ e6 - e1 ^ d e6) = a b e1^e2^e6 + b^2 e1^e2^e5
    assert res.index == 5
    assert res.witness == g.form({(1, 2, 6): a * b, (1, 2, 5): b * b})


def test_unimodularity(s_ab, l6):
    assert s_ab.algebra.unimodularity_check()
    assert not l6.algebra.unimodularity_check()
    assert abelian(5).unimodularity_check()


def test_derived_series(s_ab, l6):
    assert s_ab.algebra.derived_series() == [6, 5, 0]
    assert l6.algebra.derived_series() == [6, 5, 0]
    assert abelian(4).derived_series() == [4, 0]
    assert s_ab.algebra.solvable_steps() == 2


def test_nilradical_of_s_ab(s_ab):
    nil = s_ab.algebra.nilradical()
    assert nil is not None and len(nil) == 5
    assert all(v.components[1].is_zero() for v in nil)
    assert s_ab.algebra.is_abelian_subspace(nil)


def test_specialize(s_ab):
    g1 = s_ab.algebra.specialize({"a": 1})
    assert g1.params == ("b",)
    assert g1.d(g1.coframe(1)) == g1.form({(1, 2): 1})
    with pytest.raises(KeyError):
        s_ab.algebra.specialize({"z": 1})


def test_structure_equation_errors():
    with pytest.raises(ValueError):
        StructureEquations.from_dict(3, (), {1: {(2, 1): 1}})
    with pytest.raises(ValueError):
        StructureEquations(2, (), [KForm.zero(2, 2, AB)])


def _algebra():
    from gkcheck.catalog import get_entry
    return get_entry("s_ab").algebra


G = _algebra()


@given(st.integers(0, 3), st.integers(0, 3), st.data())
def test_antiderivation(p, q, data):
    alpha = data.draw(forms(6, p))
    beta = data.draw(forms(6, q))
    lhs = G.d(wedge(alpha, beta))
    rhs = wedge(G.d(alpha), beta) + wedge(alpha, G.d(beta)) * (-1) ** p
    assert lhs == rhs


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_wedge_associativity(p, q, r, data):
    x, y, z = (data.draw(forms(6, k)) for k in (p, q, r))
    assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_graded_commutativity(p, q, data):
    x, y = data.draw(forms(6, p)), data.draw(forms(6, q))
    assert wedge(x, y) == wedge(y, x) * (-1) ** (p * q)


@given(st.integers(0, 4), st.data())
def test_d_squared_on_random_forms(k, data):
    alpha = data.draw(forms(6, k))
    assert G.d(G.d(alpha)).is_zero()


@given(square_matrices(3), st.integers(0, 3), st.data())
def test_d_squared_on_random_algebras(m, k, data):
    g = semidirect(m)
    assert g.jacobi_check()
    alpha = data.draw(forms(4, k, field=g.field, coeffs=st.integers(-3, 3).map(g.field)))
    assert g.d(g.d(alpha)).is_zero()


@given(st.integers(1, 3), st.integers(1, 6), st.data())
def test_contraction_is_antiderivation(p, i, data):
    x = G.frame(i)
    alpha, beta = data.draw(forms(6, p)), data.draw(forms(6, 2))
    lhs = contract(x, wedge(alpha, beta))
    rhs = wedge(contract(x, alpha), beta) + wedge(alpha, contract(x, beta)) * (-1) ** p
    assert lhs == rhs


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6))
def test_cartan_consistency(k, i, j):
    alpha = G.coframe(k)
    x, y = G.frame(i), G.frame(j)
    assert G.d(alpha).evaluate([x, y]) == -alpha.evaluate([G.bracket(x, y)])


@given(square_matrices(3))
def test_semidirect_unimodularity_matches_trace(m):
    g = semidirect(m)
    assert g.unimodularity_check() == (m[0][0] + m[1][1] + m[2][2] == 0)


def test_evaluate_uses_unit_normalisation():
    g = abelian(3)
    e = g.coframe
    assert wedge(e(1), e(2)).evaluate([g.frame(1), g.frame(2)]) == g.field.one
    assert wedge(e(1), e(2)).evaluate([g.frame(2), g.frame(1)]) == -g.field.one


def test_format():
    g = abelian(4)
    alpha = g.form({(1, 3, 4): -1, (2, 3, 4): Fraction(1, 2)})
    assert alpha.format() == "-1 e1^e3^e4 + 1/2 e2^e3^e4"
    assert alpha.format("f") == "-1 f1^f3^f4 + 1/2 f2^f3^f4"
    assert g.zero_form(2).format() == "0"
