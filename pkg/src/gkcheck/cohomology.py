"""Chevalley-Eilenberg cohomology of a Lie algebra over QQ(params).

Ranks are exact (sparse elimination over the function field), so the
Betti numbers are those for generic parameter values.  These are invariant
(Lie algebra) cohomology groups; they agree with the de Rham cohomology of a
compact quotient only under extra hypotheses, e.g. complete solvability.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from . import linalg
from .exterior import KForm, StructureEquations

__all__ = ["CEComplex", "ExactnessResult", "build_complex", "betti_numbers", "is_exact", "NotClosedError"]

CE_CAVEAT = ("CE (invariant) cohomology; equals de Rham cohomology of a compact quotient only under extra "
             "hypotheses such as complete solvability, which need not hold here")


class NotClosedError(ValueError):
    pass


class CEComplex:
    """The complex (Lambda^k g*, d) with matrices in the sorted-monomial basis."""

    def __init__(self, ambient: StructureEquations, max_degree: int | None = None):
        jac = ambient.jacobi_check()
        if not jac:
            raise ValueError(f"Jacobi identity fails at d(d e^{jac.index}) = {jac.witness}")
        n = ambient.dim
        top = n if max_degree is None else min(n, max_degree)
        self.ambient = ambient
        self.top = top
        self.bases = [list(combinations(range(1, n + 1), k)) for k in range(n + 2)]
        self.index = [{key: pos for pos, key in enumerate(b)} for b in self.bases]
        zero = ambient.field.zero
        self.d_matrices = []
        # d_k : Lambda^k -> Lambda^{k+1}, rows indexed by (k+1)-monomials
        for k in range(0, min(top, n - 1) + 1):
            rows = linalg.zeros(len(self.bases[k + 1]), len(self.bases[k]), zero)
            for col, key in enumerate(self.bases[k]):
                for new, c in ambient._d_monomial(key):
                    rows[self.index[k + 1][new]][col] = c
            self.d_matrices.append(rows)
        for k in range(len(self.d_matrices) - 1):
            if not linalg.is_zero(linalg.matmul(self.d_matrices[k + 1], self.d_matrices[k])):
                raise AssertionError(f"d_{k + 1} d_{k} != 0")
        self._ranks: dict[int, int] = {}

    def rank(self, k: int) -> int:
        """Rank of d_k : Lambda^k -> Lambda^{k+1} (0 outside 0..n-1)."""
        if k < 0 or k >= self.ambient.dim:
            return 0
        if k >= len(self.d_matrices):
            raise ValueError(f"degree {k} exceeds the computed range")
        if k not in self._ranks:
            m = self.d_matrices[k]
            self._ranks[k] = linalg.sparse_rank(m) if m and m[0] else 0
        return self._ranks[k]

    def vector(self, alpha: KForm) -> list:
        zero = self.ambient.field.zero
        return [alpha.terms.get(key, zero) for key in self.bases[alpha.degree]]


def build_complex(g: StructureEquations, max_degree: int | None = None) -> CEComplex:
    return CEComplex(g, max_degree)


def betti_numbers(c: CEComplex) -> list[int]:
    """dim H^k = dim ker d_k - rank d_{k-1}, for k = 0..top."""
    n = c.ambient.dim
    return [comb(n, k) - c.rank(k) - c.rank(k - 1) for k in range(c.top + 1)]


@dataclass
class ExactnessResult:
    exact: bool
    primitive: KForm | None = None
    certificate: KForm | None = None  # functional on Lambda^k vanishing on im d, nonzero on alpha

    def __bool__(self) -> bool:
        return self.exact


def is_exact(c: CEComplex, alpha: KForm) -> ExactnessResult:
    """Solve d beta = alpha; otherwise return a separating cohomology functional."""
    g = c.ambient
    if g.d(alpha):
        raise NotClosedError("form is not closed")
    k = alpha.degree
    if alpha.is_zero():
        return ExactnessResult(True, g.zero_form(max(k - 1, 0)))
    if k == 0:
        return ExactnessResult(False, None, alpha)
    m = c.d_matrices[k - 1]
    target = c.vector(alpha)
    sol = linalg.solve(m, target)
    if sol is not None:
        beta = KForm.from_accumulator(g.dim, k - 1, {key: v for key, v in zip(c.bases[k - 1], sol)}, g.field)
        if g.d(beta) != alpha:
            raise AssertionError("primitive does not reproduce the form")
        return ExactnessResult(True, beta)
    for y in linalg.nullspace(linalg.transpose(m), g.field.zero, g.field.one):
        pairing = sum((a * b for a, b in zip(y, target)), g.field.zero)
        if not pairing.is_zero():
            cert = KForm.from_accumulator(g.dim, k, {key: v for key, v in zip(c.bases[k], y)}, g.field)
            return ExactnessResult(False, None, cert)
    raise AssertionError("no separating functional for a non-exact form")
