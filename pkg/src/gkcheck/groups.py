"""Integer matrices, Smith normal form and lattice presentations.

The lattice is generated by g0 (t -> t + 1, acting by M on (u, z) and by an
order-p rotation on w) and translations g1..g3 (the M-block) and g4, g5 (the
w-plane).  Relators encode [g0, g_j] = prod_k g_k^{R[j][k]} g_j^{-1}, i.e. the
row convention: the image of the j-th translation under g0 is row j.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "IntegerMatrix", "SmithForm", "smith_normal_form", "LatticeReport", "lattice_matrix_check",
    "GroupPresentation", "inoue_lattice_presentation", "rotation_matrix", "Abelianization", "abelianization",
    "derived_subgroup_rank", "UnsupportedPresentationError", "companion",
]


class UnsupportedPresentationError(ValueError):
    pass


@dataclass(frozen=True)
class IntegerMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __init__(self, rows: Iterable[Iterable[int]]):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if data and len({len(r) for r in data}) != 1:
            raise ValueError("ragged integer matrix")
        object.__setattr__(self, "rows", data)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def parse(cls, text: str) -> "IntegerMatrix":
        """Rows on separate lines or separated by ';'; entries by spaces or commas."""
        rows = []
        for raw in text.splitlines():
            for line in raw.split("#", 1)[0].split(";"):
                line = line.strip()
                if line:
                    rows.append([int(x) for x in line.replace(",", " ").split()])
        return cls(rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0]) if self.rows else 0

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.rows[ij[0]][ij[1]]

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        cols = list(zip(*other.rows))
        return IntegerMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])

    def __sub__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        return IntegerMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix(zip(*self.rows))

    def det(self) -> int:
        n, m = self.shape
        if n != m:
            raise ValueError("determinant of a non-square matrix")
        a = [[Fraction(x) for x in r] for r in self.rows]
        sign = 1
        out = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                return 0
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            out *= a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] / a[k][k]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        return int(sign * out)

    def rank(self) -> int:
        return sum(1 for d in smith_normal_form(self).diagonal if d)

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)


def companion(coeffs: Sequence[int]) -> IntegerMatrix:
    """Companion matrix of x^n + c[n-1] x^(n-1) + ... + c[0], coefficients low to high."""
    n = len(coeffs)
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -coeffs[i]
    return IntegerMatrix(rows)


@dataclass(frozen=True)
class SmithForm:
    U: IntegerMatrix
    D: IntegerMatrix
    V: IntegerMatrix

    @property
    def diagonal(self) -> list[int]:
        n, m = self.D.shape
        return [self.D[i, i] for i in range(min(n, m))]


def smith_normal_form(M: IntegerMatrix) -> SmithForm:
    """U M V = D, U and V unimodular, d1 | d2 | ... ; verified before returning."""
    n, m = M.shape
    A = [list(r) for r in M.rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def row_op(i, j, q):  # row_i -= q row_j
        A[i] = [x - q * y for x, y in zip(A[i], A[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q col_j
        for r in A:
            r[i] -= q * r[j]
        for r in V:
            r[i] -= q * r[j]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    t = 0
    while t < min(n, m):
        nz = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, m) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, n):
                if A[i][t]:
                    row_op(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, m):
                if A[t][j]:
                    col_op(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m) if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            row_op(t, bad[0], -1)  # pull a non-divisible entry into the pivot row
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    form = SmithForm(IntegerMatrix(U), IntegerMatrix(A), IntegerMatrix(V))
    _verify_smith(M, form)
    return form


def _verify_smith(M: IntegerMatrix, s: SmithForm) -> None:
    if (s.U @ M) @ s.V != s.D:
        raise AssertionError("Smith form does not reconstruct: U M V != D")
    if abs(s.U.det()) != 1 or abs(s.V.det()) != 1:
        raise AssertionError("Smith transforms are not unimodular")
    n, m = s.D.shape
    if any(s.D[i, j] for i in range(n) for j in range(m) if i != j):
        raise AssertionError("Smith form is not diagonal")
    d = s.diagonal
    for a, b in zip(d, d[1:]):
        if (a == 0 and b != 0) or (a and b % a):
            raise AssertionError("Smith diagonal is not a divisor chain")


# lattice matrices

@dataclass
class LatticeReport:
    det: int
    charpoly: tuple[int, int, int, int]  # x^3 + c2 x^2 + c1 x + c0 as (1, c2, c1, c0)
    discriminant: int
    real_root: float | None
    bracket: tuple[Fraction, Fraction] | None
    root_gt_one: bool
    irrational: bool
    modulus_product: int  # |alpha|^2 c, equal to the product of the roots
    passes: bool
    reasons: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        c2, c1, c0 = self.charpoly[1:]
        out = [f"det = {self.det}",
               f"charpoly = x^3 + ({c2}) x^2 + ({c1}) x + ({c0})",
               f"discriminant = {self.discriminant}"]
        if self.real_root is not None:
            out.append(f"real root c = {self.real_root:.10f} in [{self.bracket[0]}, {self.bracket[1]}]")
        out.append(f"|alpha|^2 c = {self.modulus_product}")
        out.append("verdict: " + ("pass" if self.passes else "fail (" + "; ".join(self.reasons) + ")"))
        return out


def _cubic_value(cp, x):
    return ((cp[0] * x + cp[1]) * x + cp[2]) * x + cp[3]


def lattice_matrix_check(M: IntegerMatrix, tol: Fraction = Fraction(1, 10 ** 10)) -> LatticeReport:
    if M.shape != (3, 3):
        raise ValueError("lattice check needs a 3x3 matrix")
    r = M.rows
    tr = r[0][0] + r[1][1] + r[2][2]
    s2 = (r[0][0] * r[1][1] - r[0][1] * r[1][0] + r[0][0] * r[2][2] - r[0][2] * r[2][0]
          + r[1][1] * r[2][2] - r[1][2] * r[2][1])
    det = M.det()
    cp = (1, -tr, s2, -det)
    a, b, c, d = cp
    disc = 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d
    reasons = []
    if det != 1:
        reasons.append(f"det = {det} != 1")
    if disc >= 0:
        reasons.append("discriminant not negative: no complex-conjugate pair")
    root = None
    bracket = None
    gt_one = False
    irrational = False
    if disc < 0:
        # exactly one real root; monic cubic is negative at -B and positive at B
        B = Fraction(1 + max(abs(b), abs(c), abs(d)))
        lo, hi = -B, B
        while hi - lo > tol:
            mid = (lo + hi) / 2
            v = _cubic_value(cp, mid)
            if v == 0:
                lo = hi = mid
                break
            if v < 0:
                lo = mid
            else:
                hi = mid
        bracket = (lo, hi)
        root = float((lo + hi) / 2)
        # root > 1 iff p(1) < 0 (p increases through its only real zero)
        gt_one = _cubic_value(cp, 1) < 0
        if not gt_one:
            reasons.append("real root is not > 1")
        divisors = [k for k in range(1, abs(d) + 1) if d % k == 0] if d else [0]
        irrational = all(_cubic_value(cp, s * k) != 0 for k in divisors for s in (1, -1))
        if not irrational:
            reasons.append("real root is rational")
    return LatticeReport(det, cp, disc, root, bracket, gt_one, irrational, det, not reasons, reasons)


# presentations

_TOKEN = re.compile(r"^([A-Za-z_]\w*?)(?:\^(-?\d+))?$")

Word = tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]

    def __post_init__(self):
        known = set(self.generators)
        for w in self.relators:
            for g, _ in w:
                if g not in known:
                    raise ValueError(f"relator uses undeclared generator {g!r}")

    @staticmethod
    def parse_word(text: str) -> Word:
        out = []
        for tok in text.split():
            m = _TOKEN.match(tok)
            if not m:
                raise ValueError(f"bad word token {tok!r}")
            e = int(m.group(2)) if m.group(2) is not None else 1
            if e:
                out.append((m.group(1), e))
        return tuple(out)

    @staticmethod
    def format_word(w: Word) -> str:
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in w)

    @classmethod
    def parse(cls, text: str) -> "GroupPresentation":
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines or not lines[0].startswith("generators"):
            raise ValueError("first line must be 'generators g0 g1 ...'")
        gens = tuple(lines[0].split()[1:])
        return cls(gens, tuple(cls.parse_word(ln) for ln in lines[1:]))

    def format(self) -> str:
        return "\n".join(["generators " + " ".join(self.generators)]
                         + [self.format_word(w) for w in self.relators]) + "\n"

    def relation_matrix(self) -> IntegerMatrix:
        """Exponent sums: one row per relator, one column per generator."""
        idx = {g: k for k, g in enumerate(self.generators)}
        rows = []
        for w in self.relators:
            row = [0] * len(self.generators)
            for g, e in w:
                row[idx[g]] += e
            rows.append(row)
        return IntegerMatrix(rows or [[0] * len(self.generators)])


def _commutator(x: str, y: str) -> list[tuple[str, int]]:
    return [(x, 1), (y, 1), (x, -1), (y, -1)]


def rotation_matrix(p: int) -> IntegerMatrix:
    """Order-p rotation on the w-lattice in the row convention above.

    p = 2, 4 use the basis (1, i); p = 3, 6 the basis (1, w), w = exp(2 pi i / 3).
    """
    if p == 2:
        return IntegerMatrix([[-1, 0], [0, -1]])
    if p == 4:   # i * 1 = i, i * i = -1
        return IntegerMatrix([[0, 1], [-1, 0]])
    if p == 3:   # w * 1 = w, w * w = -1 - w
        return IntegerMatrix([[0, 1], [-1, -1]])
    if p == 6:   # -w^2 = 1 + w ; (1 + w) w = -1
        return IntegerMatrix([[1, 1], [-1, 0]])
    raise ValueError(f"rotation order must be one of 2, 3, 4, 6 (got {p})")


def inoue_lattice_presentation(M: IntegerMatrix, p: int | None = 4, blocks: int = 1,
                               check: bool = True) -> GroupPresentation:
    """Presentation of the lattice; ``p=None`` gives the surface lattice on g0..g3.

    ``blocks`` repeats the rotation block (one w-plane per block).
    """
    if check:
        rep = lattice_matrix_check(M)
        if not rep.passes:
            raise ValueError("matrix fails the lattice check: " + "; ".join(rep.reasons))
    R = rotation_matrix(p) if p is not None else None
    nb = 0 if R is None else blocks
    if nb < 0:
        raise ValueError("blocks must be non-negative")
    k = 3 + 2 * nb
    gens = tuple(f"g{i}" for i in range(k + 1))
    rel: list[Word] = []
    for j in range(1, k + 1):
        for l in range(j + 1, k + 1):
            rel.append(tuple(_commutator(f"g{j}", f"g{l}")))
    parts = [(1, M)] + [(4 + 2 * b, R) for b in range(nb)]
    for start, B in parts:
        n = B.shape[0]
        for j in range(n):
            w = _commutator("g0", f"g{start + j}") + [(f"g{start + j}", 1)]
            w += [(f"g{start + l}", -B[j, l]) for l in range(n) if B[j, l]]
            rel.append(_reduce(w))
    return GroupPresentation(gens, tuple(rel))


def _reduce(w) -> Word:
    out: list[tuple[str, int]] = []
    for g, e in w:
        if out and out[-1][0] == g:
            e += out.pop()[1]
        if e:
            out.append((g, e))
    return tuple(out)


@dataclass(frozen=True)
class Abelianization:
    free_rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def abelianization(P: GroupPresentation) -> Abelianization:
    rel = P.relation_matrix()
    s = smith_normal_form(rel)
    d = [x for x in s.diagonal if x]
    n = len(P.generators)
    return Abelianization(n - len(d), tuple(x for x in d if x != 1))


def derived_subgroup_rank(P: GroupPresentation) -> int:
    """Rank of [G, G] for a lattice-shaped presentation (g0 acting on abelian g1..gk).

    [G, G] is generated by the images of [g0, g_j] in Z^k, read off the relators.
    """
    gens = P.generators
    if not gens or gens[0] != "g0" or list(gens) != [f"g{i}" for i in range(len(gens))]:
        raise UnsupportedPresentationError("generators must be g0, g1, ..., gk")
    k = len(gens) - 1
    rows: dict[int, list[int]] = {}
    seen_pairs = set()
    for w in P.relators:
        if len(w) == 4 and w[0][1] == 1 and w[1][1] == 1 and w[2] == (w[0][0], -1) and w[3] == (w[1][0], -1):
            x, y = w[0][0], w[1][0]
            if "g0" not in (x, y):
                seen_pairs.add(frozenset((x, y)))
                continue
        if len(w) >= 3 and w[0] == ("g0", 1) and w[2] == ("g0", -1) and w[1][1] == 1:
            j = int(w[1][0][1:])
            tail = list(w[3:])
            if any(g == "g0" for g, _ in tail):
                raise UnsupportedPresentationError("g0 appears after the commutator prefix")
            # relator = g0 g_j g0^-1 T = [g0, g_j] g_j T, so [g0, g_j] = (g_j T)^-1
            vec = [0] * k
            vec[j - 1] += 1
            for g, e in tail:
                vec[int(g[1:]) - 1] += e
            rows[j] = [-x for x in vec]
            continue
        raise UnsupportedPresentationError(f"relator {GroupPresentation.format_word(w)!r} is not of lattice shape")
    need = {frozenset((f"g{j}", f"g{l}")) for j in range(1, k + 1) for l in range(j + 1, k + 1)}
    if not need <= seen_pairs:
        raise UnsupportedPresentationError("translations g1..gk are not declared to commute")
    if not rows:
        return 0
    return IntegerMatrix(list(rows.values())).rank()
