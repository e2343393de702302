"""Exact dense linear algebra over Scalar / CScalar entries.

Matrices are lists of rows.  Entries only need ``+ - * /`` and ``is_zero``;
zero tests are exact, so pivoting never has to worry about conditioning.
"""

from __future__ import annotations

from typing import Sequence

Matrix = list


def zeros(rows: int, cols: int, zero) -> Matrix:
    return [[zero] * cols for _ in range(rows)]


def identity(n: int, zero, one) -> Matrix:
    m = zeros(n, n, zero)
    for i in range(n):
        m[i][i] = one
    return m


def copy(m: Sequence[Sequence]) -> Matrix:
    return [list(r) for r in m]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(c) for c in zip(*m)]


def matmul(x: Sequence[Sequence], y: Sequence[Sequence]) -> Matrix:
    # row-by-row accumulation over nonzero entries only
    ncols = len(y[0]) if y else 0
    ynz = [[(j, w) for j, w in enumerate(r) if not w.is_zero()] for r in y]
    out = []
    for row in x:
        zero = row[0] * 0
        acc: dict = {}
        for k, v in enumerate(row):
            if v.is_zero():
                continue
            for j, w in ynz[k]:
                t = v * w
                acc[j] = acc[j] + t if j in acc else t
        out.append([acc.get(j, zero) for j in range(ncols)])
    return out


def matvec(m: Sequence[Sequence], v: Sequence) -> list:
    return [r[0] for r in matmul(m, [[x] for x in v])]


def add(x, y) -> Matrix:
    return [[a + b for a, b in zip(r, s)] for r, s in zip(x, y)]


def sub(x, y) -> Matrix:
    return [[a - b for a, b in zip(r, s)] for r, s in zip(x, y)]


def scale(c, m) -> Matrix:
    return [[c * a for a in r] for r in m]


def neg(m) -> Matrix:
    return [[-a for a in r] for r in m]


def is_zero(m) -> bool:
    return all(a.is_zero() for r in m for a in r)


def equal(x, y) -> bool:
    return len(x) == len(y) and all(a == b for r, s in zip(x, y) for a, b in zip(r, s))


def block(rows: Sequence[Sequence[Matrix]]) -> Matrix:
    """Assemble a block matrix from a grid of equally sized blocks."""
    out = []
    for brow in rows:
        for i in range(len(brow[0])):
            out.append([a for b in brow for a in b[i]])
    return out


def bareiss_rank(m: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination with column skipping."""
    a = copy(m)
    if not a or not a[0]:
        return 0
    rows, cols = len(a), len(a[0])
    prev = None
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not a[i][c].is_zero()), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, rows):
            f = a[i][c]
            for j in range(c + 1, cols):
                v = p * a[i][j]
                if not f.is_zero() and not a[r][j].is_zero():
                    v = v - f * a[r][j]
                a[i][j] = v if prev is None else v / prev
            a[i][c] = f * 0
        prev = p
        r += 1
    return r


def sparse_rank(m: Sequence[Sequence]) -> int:
    """Rank by Gaussian elimination on sparse rows over the field.

    Pivots come from the shortest remaining row, preferring constant entries,
    which keeps fill-in and expression growth small on coboundary matrices.
    """
    rows = [{j: v for j, v in enumerate(r) if not v.is_zero()} for r in m]
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        k = min(range(len(rows)), key=lambda t: len(rows[t]))
        piv = rows.pop(k)
        consts = [j for j, v in piv.items() if getattr(v, "is_constant", lambda: False)()]
        c = consts[0] if consts else next(iter(piv))
        p = piv[c]
        rank += 1
        kept = []
        for r in rows:
            f = r.get(c)
            if f is not None:
                q = f / p
                for j, v in piv.items():
                    x = r.get(j)
                    nv = -(q * v) if x is None else x - q * v
                    if nv.is_zero():
                        r.pop(j, None)
                    else:
                        r[j] = nv
            if r:
                kept.append(r)
        rows = kept
    return rank


def det(m: Sequence[Sequence]):
    """Determinant by Bareiss elimination (exact division by previous pivot)."""
    a = copy(m)
    n = len(a)
    if n == 0:
        raise ValueError("empty matrix")
    sign = 1
    prev = None
    for k in range(n - 1):
        piv = next((i for i in range(k, n) if not a[i][k].is_zero()), None)
        if piv is None:
            return a[0][0] * 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = v if prev is None else v / prev
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def rref(m: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan over the field)."""
    a = copy(m)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if not a[i][c].is_zero()), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv if not x.is_zero() else x for x in a[r]]
        for i in range(rows):
            if i != r and not a[i][c].is_zero():
                f = a[i][c]
                a[i] = [x - f * y if not y.is_zero() else x for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace(m: Sequence[Sequence], zero=None, one=None) -> list[list]:
    """Basis of {x : m x = 0}; one vector per free column."""
    if zero is None:
        zero = m[0][0] * 0
    if one is None:
        one = zero + 1
    cols = len(m[0])
    red, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for row, p in zip(red, pivots):
            if not row[f].is_zero():
                v[p] = -row[f]
        basis.append(v)
    return basis


def solve(m: Sequence[Sequence], b: Sequence):
    """One solution of ``m x = b`` (free variables set to 0), or None."""
    aug = [list(r) + [v] for r, v in zip(m, b)]
    cols = len(m[0])
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    zero = b[0] * 0
    x = [zero] * cols
    for row, p in zip(red, pivots):
        x[p] = row[cols]
    return x


def inverse(m: Sequence[Sequence]) -> Matrix:
    n = len(m)
    zero = m[0][0] * 0
    one = zero + 1
    aug = [list(r) + e for r, e in zip(m, identity(n, zero, one))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red]


def span_basis(vectors: Sequence[Sequence]) -> list[list]:
    """Row-reduced basis of the span of the given vectors."""
    if not vectors:
        return []
    red, pivots = rref(vectors)
    return red[: len(pivots)]
