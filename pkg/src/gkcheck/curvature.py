"""Levi-Civita connection and curvature of a left-invariant metric.

All objects are constant in the frame e_1..e_n, so covariant derivatives of
frame fields are matrices: ``gamma[i]`` is the matrix of ``nabla_{e_i}``
(column j holds the components of ``nabla_{e_i} e_j``).

Sign conventions: R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_[X,Y]
and Ric(X,Y) = tr(Z -> R(Z,X)Y).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .complexgeom import HermitianMetric
from .exterior import StructureEquations

__all__ = ["Connection", "levi_civita", "riemann", "ricci", "bianchi_defect", "riemann_witness"]


@dataclass
class Connection:
    ambient: StructureEquations
    gamma: list  # gamma[i-1][k][j] = e^k(nabla_{e_i} e_j), 0-based inside

    def nabla(self, i: int) -> list:
        return self.gamma[i - 1]


def _bracket_vec(g: StructureEquations, i: int, j: int) -> list:
    z = g.field.zero
    out = [z] * g.dim
    for k, c in g.bracket_basis(i, j).items():
        out[k - 1] = c
    return out


def levi_civita(g_alg: StructureEquations, metric: HermitianMetric) -> Connection:
    """Koszul formula for invariant fields:
    2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y).
    """
    n = g_alg.dim
    G = metric.gram
    ginv = linalg.inverse(G)
    half = g_alg.field.fraction(1, 2)
    br = {(i, j): _bracket_vec(g_alg, i, j) for i in range(1, n + 1) for j in range(1, n + 1)}

    def gdot(v, k):  # g(v, e_k)
        return sum((v[l] * G[l][k - 1] for l in range(n) if not v[l].is_zero()), g_alg.field.zero)

    gamma = []
    for i in range(1, n + 1):
        mat = linalg.zeros(n, n, g_alg.field.zero)
        for j in range(1, n + 1):
            lowered = [(gdot(br[i, j], l) - gdot(br[j, l], i) + gdot(br[l, i], j)) * half for l in range(1, n + 1)]
            for k in range(n):
                mat[k][j - 1] = sum((ginv[k][l] * lowered[l] for l in range(n) if not lowered[l].is_zero()),
                                    g_alg.field.zero)
        gamma.append(mat)
    conn = Connection(g_alg, gamma)
    _assert_levi_civita(conn, metric)
    return conn


def _assert_levi_civita(conn: Connection, metric: HermitianMetric) -> None:
    g = conn.ambient
    G = metric.gram
    n = g.dim
    for i in range(1, n + 1):
        A = conn.nabla(i)
        compat = linalg.add(linalg.matmul(linalg.transpose(A), G), linalg.matmul(G, A))
        if not linalg.is_zero(compat):
            raise AssertionError(f"nabla_e{i} is not metric")
        for j in range(i + 1, n + 1):
            torsion = [A[k][j - 1] - conn.nabla(j)[k][i - 1] for k in range(n)]
            if torsion != _bracket_vec(g, i, j):
                raise AssertionError(f"torsion of (e{i}, e{j}) does not vanish")


def riemann(conn: Connection) -> dict[tuple[int, int], list]:
    """R(e_i, e_j) as endomorphism matrices, for all ordered pairs."""
    g = conn.ambient
    n = g.dim
    out = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            A, B = conn.nabla(i), conn.nabla(j)
            R = linalg.sub(linalg.matmul(A, B), linalg.matmul(B, A))
            for k, c in g.bracket_basis(i, j).items():
                R = linalg.sub(R, linalg.scale(c, conn.nabla(k)))
            out[i, j] = R
    return out


def ricci(conn: Connection, metric: HermitianMetric | None = None) -> list:
    """Ric(e_j, e_l) = sum_i e^i(R(e_i, e_j) e_l); the metric argument is not needed for the trace."""
    g = conn.ambient
    n = g.dim
    R = riemann(conn)
    ric = linalg.zeros(n, n, g.field.zero)
    for j in range(n):
        for l in range(n):
            ric[j][l] = sum((R[i + 1, j + 1][i][l] for i in range(n)), g.field.zero)
    if not linalg.equal(ric, linalg.transpose(ric)):
        raise AssertionError("Ricci tensor is not symmetric")
    return ric


def bianchi_defect(conn: Connection) -> list[tuple[int, int, int]]:
    """Frame triples where R(X,Y)Z + R(Y,Z)X + R(Z,X)Y fails to vanish."""
    n = conn.ambient.dim
    R = riemann(conn)
    bad = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                tot = [R[i + 1, j + 1][r][k] + R[j + 1, k + 1][r][i] + R[k + 1, i + 1][r][j] for r in range(n)]
                if any(not c.is_zero() for c in tot):
                    bad.append((i + 1, j + 1, k + 1))
    return bad


def riemann_witness(conn: Connection):
    """First (i, j, k, r) with e^r(R(e_i,e_j)e_k) != 0, or None if flat."""
    n = conn.ambient.dim
    R = riemann(conn)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(n):
                for r in range(n):
                    if not R[i, j][r][k].is_zero():
                        return (i, j, k + 1, r + 1, R[i, j][r][k])
    return None
