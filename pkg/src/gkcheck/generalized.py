"""Generalized geometry on T + T* for invariant sections of a Lie algebra.

A section X + xi is stored as a column (X components; xi components) of
length 2n.  Operators are 2n x 2n matrices in that basis.  ``W(s)`` below is
the matrix of X -> iota_X s for a 2-form s, which is the transpose of the
component matrix s(e_j, e_k).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from . import linalg
from .complexgeom import ComplexStructure, HermitianPair, MetricMismatchError, NotIntegrableError, is_integrable
from .exterior import KForm, StructureEquations, Vector, contract
from .scalar import CScalar, evaluate_numeric

__all__ = [
    "GeneralizedVector", "GeneralizedStructure", "pairing", "pairing_matrix", "from_complex", "from_symplectic",
    "courant_bracket", "gualtieri_pair", "involutivity_check", "Definiteness", "definiteness",
    "GUALTIERI_PROVENANCE",
]

GUALTIERI_PROVENANCE = ("bi-Hermitian to generalized Kaehler map imported from Gualtieri's thesis; "
                        "sign of J calibrated so the Kaehler case reduces to (J_J, J_omega)")


@dataclass(frozen=True)
class GeneralizedVector:
    vec: Vector
    covec: KForm

    def __post_init__(self):
        if self.covec.degree != 1 and self.covec.terms:
            raise ValueError("covector part must be a 1-form")
        if self.vec.dim != self.covec.dim:
            raise ValueError("vector and covector live in different dimensions")

    @property
    def dim(self) -> int:
        return self.vec.dim

    def column(self) -> list:
        n = self.dim
        zero = self.covec.field.zero
        return list(self.vec.components) + [self.covec.terms.get((j,), zero) for j in range(1, n + 1)]

    @classmethod
    def from_column(cls, col, field) -> "GeneralizedVector":
        n = len(col) // 2
        return cls(Vector(col[:n]), KForm.from_accumulator(n, 1, {(j + 1,): col[n + j] for j in range(n)}, field))


def pairing_matrix(n: int, field) -> list:
    """Gram matrix of <X + xi, Y + eta> = (eta(X) + xi(Y)) / 2 in the standard basis."""
    half = field.fraction(1, 2)
    m = linalg.zeros(2 * n, 2 * n, field.zero)
    for j in range(n):
        m[j][n + j] = half
        m[n + j][j] = half
    return m


def pairing(u: GeneralizedVector, v: GeneralizedVector):
    if u.dim != v.dim:
        raise ValueError("sections of different algebras")
    a, b = u.column(), v.column()
    n = u.dim
    acc = a[0] * 0
    for j in range(n):
        acc = acc + a[j] * b[n + j] + a[n + j] * b[j]
    return acc * u.covec.field.fraction(1, 2)


class GeneralizedStructure:
    """A 2n x 2n operator [[A, pi], [sigma, B]] squaring to -Id and preserving the pairing."""

    def __init__(self, ambient: StructureEquations, matrix: list):
        n = ambient.dim
        if len(matrix) != 2 * n or any(len(r) != 2 * n for r in matrix):
            raise ValueError(f"expected a {2 * n}x{2 * n} matrix")
        f = ambient.field
        self.ambient = ambient
        self.matrix = matrix
        one = linalg.identity(2 * n, f.zero, f.one)
        if not linalg.equal(linalg.matmul(matrix, matrix), linalg.neg(one)):
            raise AssertionError("generalized structure does not square to -Id")
        P = pairing_matrix(n, f)
        if not linalg.equal(linalg.matmul(linalg.matmul(linalg.transpose(matrix), P), matrix), P):
            raise AssertionError("generalized structure is not orthogonal for the pairing")

    @property
    def n(self) -> int:
        return self.ambient.dim

    def _blk(self, r: int, c: int) -> list:
        n = self.n
        return [row[c * n:(c + 1) * n] for row in self.matrix[r * n:(r + 1) * n]]

    @property
    def A(self) -> list:
        return self._blk(0, 0)

    @property
    def pi(self) -> list:
        return self._blk(0, 1)

    @property
    def sigma(self) -> list:
        return self._blk(1, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneralizedStructure):
            return NotImplemented
        return self.ambient == other.ambient and linalg.equal(self.matrix, other.matrix)

    def __hash__(self) -> int:
        return hash(self.ambient)

    def __mul__(self, other: "GeneralizedStructure") -> list:
        return linalg.matmul(self.matrix, other.matrix)

    def apply(self, u: GeneralizedVector) -> GeneralizedVector:
        return GeneralizedVector.from_column(linalg.matvec(self.matrix, u.column()), self.ambient.field)

    def specialize(self, ambient: StructureEquations, values) -> "GeneralizedStructure":
        from .exterior import _restrict
        return GeneralizedStructure(ambient, [[_restrict(c.subs(values), ambient.field) for c in r]
                                              for r in self.matrix])


def _form_matrix(F: KForm, n: int, zero) -> list:
    """W with (iota_X F)_k = sum_j W[k][j] X_j."""
    m = linalg.zeros(n, n, zero)
    for (j, k), c in F.terms.items():
        # F(e_j, e_k) = c, iota_{e_j} F = c e^k, iota_{e_k} F = -c e^j
        m[k - 1][j - 1] = c
        m[j - 1][k - 1] = -c
    return m


def from_complex(J: ComplexStructure) -> GeneralizedStructure:
    g = J.ambient
    n = g.dim
    z = linalg.zeros(n, n, g.field.zero)
    return GeneralizedStructure(g, linalg.block([[linalg.neg(J.endo), z], [z, linalg.transpose(J.endo)]]))


def from_symplectic(omega: KForm, g: StructureEquations) -> GeneralizedStructure:
    n = g.dim
    if omega.degree != 2:
        raise ValueError("need a 2-form")
    if not g.d(omega).is_zero():
        raise ValueError("symplectic form must be closed")
    W = _form_matrix(omega, n, g.field.zero)
    try:
        Winv = linalg.inverse(W)
    except ZeroDivisionError:
        raise ValueError("degenerate 2-form") from None
    z = linalg.zeros(n, n, g.field.zero)
    return GeneralizedStructure(g, linalg.block([[z, linalg.neg(Winv)], [W, z]]))


def courant_bracket(H: KForm, u: GeneralizedVector, v: GeneralizedVector,
                    g: StructureEquations) -> GeneralizedVector:
    """Twisted bracket of invariant sections.

    eta(X) is constant, so the d(...) term drops and L_X eta = iota_X d eta.
    """
    if not H.is_zero() and not g.d(H).is_zero():
        raise ValueError("twisting form is not closed")
    vec = g.bracket(u.vec, v.vec)
    cov = KForm.zero(g.dim, 1, g.field)
    if not v.covec.is_zero():
        cov = cov + contract(u.vec, g.d(v.covec))
    if not u.covec.is_zero():
        cov = cov - contract(v.vec, g.d(u.covec))
    if not H.is_zero():
        cov = cov + contract(v.vec, contract(u.vec, H))
    return GeneralizedVector(vec, cov)


def gualtieri_pair(plus: HermitianPair, minus: HermitianPair,
                   convention: str = "calibrated") -> tuple[GeneralizedStructure, GeneralizedStructure]:
    """J_{1,2} from (J+, J-, g).

    ``imported`` is the formula as usually printed,
    1/2 [[J+ +- J-, -(w+^-1 -+ w-^-1)], [w+ -+ w-, -(J+* +- J-*)]];
    ``calibrated`` replaces J by -J in it, so that J = J+ = J- gives exactly
    J_1 = (-J, 0; 0, J*) and J_2 = (0, -w^-1; w, 0).
    """
    if plus.g != minus.g:
        raise MetricMismatchError("the two Hermitian pairs use different metrics")
    for pair in (plus, minus):
        if not is_integrable(pair.J):
            raise NotIntegrableError("both complex structures must be integrable")
    g = plus.ambient
    n = g.dim
    if convention not in ("calibrated", "imported"):
        raise ValueError(f"unknown convention {convention!r}")
    s = -1 if convention == "calibrated" else 1
    half = g.field.fraction(1, 2)
    Wp = _form_matrix(plus.F, n, g.field.zero)
    Wm = _form_matrix(minus.F, n, g.field.zero)
    Wpi, Wmi = linalg.inverse(Wp), linalg.inverse(Wm)
    Jp, Jm = plus.J.endo, minus.J.endo
    out = []
    for sgn in (1, -1):
        JJ = linalg.add(Jp, linalg.scale(g.field(sgn), Jm))
        inv = linalg.sub(Wpi, linalg.scale(g.field(sgn), Wmi))
        W = linalg.sub(Wp, linalg.scale(g.field(sgn), Wm))
        blocks = [[linalg.scale(g.field(s), JJ), linalg.neg(inv)],
                  [W, linalg.scale(g.field(-s), linalg.transpose(JJ))]]
        out.append(GeneralizedStructure(g, linalg.scale(half, linalg.block(blocks))))
    j1, j2 = out
    if not linalg.equal(j1 * j2, j2 * j1):
        raise AssertionError("J1 and J2 do not commute")
    return j1, j2


def _eigenspace(J: GeneralizedStructure) -> list[list]:
    f = J.ambient.field
    i = CScalar.i(f)
    m = [[CScalar(c) - (i if r == k else CScalar(f.zero)) for k, c in enumerate(row)]
         for r, row in enumerate(J.matrix)]
    return m, linalg.nullspace(m, CScalar(f.zero), CScalar(f.one))


def involutivity_check(J: GeneralizedStructure, H: KForm) -> bool:
    """Is the +i eigenspace closed under the H-twisted Courant bracket?"""
    g = J.ambient
    if not H.is_zero() and not g.d(H).is_zero():
        raise ValueError("twisting form is not closed")
    shifted, basis = _eigenspace(J)
    if len(basis) != g.dim:
        raise AssertionError(f"+i eigenspace has dimension {len(basis)}, expected {g.dim}")
    Hc = H.complexify() if not H.is_zero() else H
    sections = [GeneralizedVector.from_column(v, g.field) for v in basis]
    for a in range(len(sections)):
        for b in range(a + 1, len(sections)):
            w = courant_bracket(Hc, sections[a], sections[b], g)
            col = w.column()
            if any(not x.is_zero() for x in linalg.matvec(shifted, [x if isinstance(x, CScalar) else CScalar(x)
                                                                    for x in col])):
                return False
    return True


@dataclass
class Definiteness:
    sign: int  # +1 positive definite, -1 negative definite, 0 indefinite or degenerate
    minors: list
    exact: bool

    @property
    def definite(self) -> bool:
        return self.sign != 0


def _quadratic_form(j1: GeneralizedStructure, j2: GeneralizedStructure) -> list:
    g = j1.ambient
    P = pairing_matrix(g.dim, g.field)
    G = linalg.matmul(linalg.transpose(j1 * j2), P)  # <J1J2 u, v> = u^T (J1J2)^T P v
    half = g.field.fraction(1, 2)
    return [[(G[r][c] + G[c][r]) * half for c in range(len(G))] for r in range(len(G))]


def _sign_of(minors, tol: float) -> int:
    if all(m > tol for m in minors):
        return 1
    if all((m > tol if k % 2 else m < -tol) for k, m in enumerate(minors)):
        return -1
    return 0


def definiteness(j1: GeneralizedStructure, j2: GeneralizedStructure,
                 assignment: Mapping[str, float] | None = None, tol: float = 1e-9) -> Definiteness:
    """Sign of u -> <J1 J2 u, u> via leading principal minors.

    Exact when the entries are parameter-free, otherwise numeric (numpy) at ``assignment``.
    """
    import numpy as np

    Q = _quadratic_form(j1, j2)
    size = len(Q)
    if all(c.is_constant() for r in Q for c in r):
        minors = [linalg.det([r[:k] for r in Q[:k]]).to_fraction() for k in range(1, size + 1)]
        return Definiteness(_sign_of(minors, 0), minors, True)
    assignment = dict(assignment or {})
    arr = np.array([[evaluate_numeric(c, assignment) for c in r] for r in Q], dtype=float)
    minors = [float(np.linalg.det(arr[:k, :k])) for k in range(1, size + 1)]
    return Definiteness(_sign_of(minors, tol), minors, False)
