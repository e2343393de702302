"""Chevalley-Eilenberg exterior calculus on a Lie algebra given by structure equations.

A Lie algebra is presented by the exterior derivatives of a fixed coframe
``e^1..e^n``.  Left-invariant forms have constant coefficients, so ``d`` is
determined by ``d e^i`` and the Leibniz rule.  The bracket of the dual frame
is recovered from ``d alpha(X, Y) = -alpha([X, Y])`` with the normalization
``(e^j ^ e^k)(e_j, e_k) = 1``.

Indices are 1-based everywhere in this module, matching the notation ``e^i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import linalg
from .scalar import CScalar, Scalar, ScalarField, field_for

__all__ = [
    "KForm",
    "Vector",
    "StructureEquations",
    "JacobiResult",
    "wedge",
    "contract",
    "sort_sign",
    "abelian",
]


def sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort an index tuple; return (permutation sign, sorted) or (0, ()) on repeats."""
    idx = list(idx)
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and idx[j - 1] == idx[j]:
            return 0, ()
    return sign, tuple(idx)


class KForm:
    """Sparse alternating k-form: strictly increasing index tuples -> coefficient.

    Coefficients are Scalars, or CScalars for complexified forms.  Zero
    coefficients are never stored; the zero form has an empty mapping.
    """

    __slots__ = ("dim", "degree", "terms", "field")

    def __init__(self, dim: int, degree: int, terms: Mapping[tuple[int, ...], object] | None = None,
                 field: ScalarField | None = None):
        self.dim = dim
        self.degree = degree
        clean = {}
        for key, c in (terms or {}).items():
            if len(key) != degree:
                raise ValueError(f"key {key} does not have degree {degree}")
            if any(not 1 <= i <= dim for i in key) or any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"key {key} is not strictly increasing within 1..{dim}")
            if not c.is_zero():
                clean[tuple(key)] = c
        self.terms = clean
        if field is None:
            field = next(iter(clean.values())).field if clean else field_for(())
        self.field = field

    @classmethod
    def _trusted(cls, dim, degree, terms, field) -> "KForm":
        self = object.__new__(cls)
        self.dim, self.degree, self.terms, self.field = dim, degree, terms, field
        return self

    @classmethod
    def zero(cls, dim: int, degree: int, field: ScalarField) -> "KForm":
        return cls._trusted(dim, degree, {}, field)

    @classmethod
    def monomial(cls, dim: int, idx: Sequence[int], coeff) -> "KForm":
        sign, key = sort_sign(idx)
        if sign == 0:
            return cls.zero(dim, len(idx), coeff.field)
        return cls(dim, len(idx), {key: coeff if sign > 0 else -coeff}, coeff.field)

    @classmethod
    def from_accumulator(cls, dim, degree, acc: dict, field) -> "KForm":
        return cls._trusted(dim, degree, {k: v for k, v in acc.items() if not v.is_zero()}, field)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_real(self) -> bool:
        return all(isinstance(c, Scalar) or c.is_real() for c in self.terms.values())

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, key) -> object:
        sign, k = sort_sign(key)
        c = self.terms.get(k)
        if c is None or sign == 0:
            return self.field.zero
        return c if sign > 0 else -c

    def _check(self, other: "KForm") -> None:
        if not isinstance(other, KForm):
            raise TypeError(f"expected KForm, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    # -- linear structure ---------------------------------------------------
    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        if other.degree != self.degree and self.terms and other.terms:
            raise ValueError(f"adding forms of degrees {self.degree} and {other.degree}")
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc[k] + v if k in acc else v
        return KForm.from_accumulator(self.dim, self.degree, acc, self.field)

    def __neg__(self) -> "KForm":
        return KForm._trusted(self.dim, self.degree, {k: -v for k, v in self.terms.items()}, self.field)

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __mul__(self, c) -> "KForm":
        if isinstance(c, KForm):
            return NotImplemented
        return KForm.from_accumulator(self.dim, self.degree, {k: v * c for k, v in self.terms.items()},
                                      self.field)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "KForm":
        return self * (1 / c) if not isinstance(c, (Scalar, CScalar)) else self * c.inverse()

    def __eq__(self, other) -> bool:
        if not isinstance(other, KForm):
            return NotImplemented
        if self.dim != other.dim or self.terms.keys() != other.terms.keys():
            return False
        if self.terms and self.degree != other.degree:
            return False
        return all(v == other.terms[k] for k, v in self.terms.items())

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self.terms.items())))

    # -- complex structure --------------------------------------------------
    def conj(self) -> "KForm":
        return KForm._trusted(self.dim, self.degree, {k: v.conj() for k, v in self.terms.items()}, self.field)

    def real_part(self) -> "KForm":
        return KForm.from_accumulator(self.dim, self.degree, {k: v.real for k, v in self.terms.items()},
                                      self.field)

    def imag_part(self) -> "KForm":
        return KForm.from_accumulator(self.dim, self.degree, {k: v.imag for k, v in self.terms.items()},
                                      self.field)

    def complexify(self) -> "KForm":
        return KForm._trusted(self.dim, self.degree,
                              {k: v if isinstance(v, CScalar) else CScalar(v) for k, v in self.terms.items()},
                              self.field)

    def to_real(self) -> "KForm":
        """Drop a vanishing imaginary part; raises if the form is not real."""
        if not self.is_real():
            raise ValueError(f"form has a nonzero imaginary part: {self}")
        return self.real_part()

    def subs(self, values) -> "KForm":
        return KForm.from_accumulator(self.dim, self.degree, {k: v.subs(values) for k, v in self.terms.items()},
                                      self.field)

    # -- change of coframe --------------------------------------------------
    def pullback(self, images: Sequence["KForm"]) -> "KForm":
        """Substitute each basis 1-form ``e^i`` by ``images[i-1]`` (all of equal dim)."""
        if len(images) != self.dim:
            raise ValueError(f"need {self.dim} images, got {len(images)}")
        target = images[0].dim
        out = KForm.zero(target, self.degree, self.field)
        acc: dict = {}
        for key, c in self.terms.items():
            piece = None
            for i in key:
                piece = images[i - 1] if piece is None else wedge(piece, images[i - 1])
            if piece is None:
                acc[()] = acc.get((), c * 0) + c
                continue
            for k, v in piece.terms.items():
                acc[k] = acc[k] + c * v if k in acc else c * v
        if acc:
            out = KForm.from_accumulator(target, self.degree, acc, self.field)
        return out

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, vectors: Sequence["Vector"]):
        """alpha(X_1, ..., X_k) with (e^{i1}^...^e^{ik})(e_{i1}, ..., e_{ik}) = 1."""
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form needs {self.degree} vectors")
        total = self.field.zero
        for key, c in self.terms.items():
            m = [[vectors[col].components[row - 1] for col in range(self.degree)] for row in key]
            total = total + c * (linalg.det(m) if m else 1)
        return total

    # -- printing -------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, ...], object]]:
        return sorted(self.terms.items())

    def format(self, names: str | Sequence[str] = "e") -> str:
        """Sorted monomial list, e.g. ``-1 e1^e3^e4 + a/2 e2^e3``."""
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            if isinstance(names, str):
                mono = "^".join(f"{names}{i}" for i in key)
            else:
                mono = "^".join(names[i - 1] for i in key)
            coef = str(c)
            if " " in coef:
                coef = f"({coef})"
            parts.append(f"{coef} {mono}" if mono else coef)
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"KForm(dim={self.dim}, degree={self.degree}, {self.format()!r})"


def wedge(alpha: KForm, beta: KForm) -> KForm:
    alpha._check(beta)
    acc: dict = {}
    for ka, ca in alpha.terms.items():
        for kb, cb in beta.terms.items():
            sign, key = sort_sign(ka + kb)
            if sign == 0:
                continue
            v = ca * cb
            if sign < 0:
                v = -v
            acc[key] = acc[key] + v if key in acc else v
    return KForm.from_accumulator(alpha.dim, alpha.degree + beta.degree, acc, alpha.field)


class Vector:
    """Left-invariant vector: components in the frame e_1..e_n dual to the coframe."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable):
        self.components = tuple(components)

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def basis(cls, field: ScalarField, dim: int, i: int) -> "Vector":
        return cls(field.one if j == i else field.zero for j in range(1, dim + 1))

    def __add__(self, other: "Vector") -> "Vector":
        return Vector(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "Vector") -> "Vector":
        return Vector(a - b for a, b in zip(self.components, other.components))

    def __neg__(self) -> "Vector":
        return Vector(-a for a in self.components)

    def __mul__(self, c) -> "Vector":
        return Vector(a * c for a in self.components)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Vector) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.components)

    def __repr__(self) -> str:
        return f"Vector({[str(a) for a in self.components]})"


def contract(x: Vector, alpha: KForm) -> KForm:
    """Interior product iota_X alpha (antiderivation of degree -1)."""
    if alpha.degree == 0:
        raise ValueError("cannot contract a 0-form")
    if x.dim != alpha.dim:
        raise ValueError(f"dimension mismatch: vector {x.dim}, form {alpha.dim}")
    acc: dict = {}
    for key, c in alpha.terms.items():
        for p, i in enumerate(key):
            xi = x.components[i - 1]
            if xi.is_zero():
                continue
            rest = key[:p] + key[p + 1:]
            v = c * xi
            if p % 2:
                v = -v
            acc[rest] = acc[rest] + v if rest in acc else v
    return KForm.from_accumulator(alpha.dim, alpha.degree - 1, acc, alpha.field)


@dataclass(frozen=True)
class JacobiResult:
    ok: bool
    index: int | None = None
    witness: KForm | None = None

    def __bool__(self) -> bool:
        return self.ok


class StructureEquations:
    """A Lie algebra presented by ``d e^i`` for a coframe ``e^1..e^n``.

    ``d1[i-1]`` is the 2-form ``d e^i``.  The coframe letter (``basis``) is
    only used for printing.
    """

    def __init__(self, dim: int, params: Sequence[str], d1: Sequence[KForm], basis: str = "e"):
        if dim < 1:
            raise ValueError("dimension must be positive")
        if len(d1) != dim:
            raise ValueError(f"need {dim} derivatives, got {len(d1)}")
        self.dim = dim
        self.params = tuple(params)
        self.field = field_for(self.params)
        self.basis = basis
        fixed = []
        for i, form in enumerate(d1, 1):
            if form.dim != dim:
                raise ValueError(f"d {basis}{i} lives in dimension {form.dim}, expected {dim}")
            if form.terms and form.degree != 2:
                raise ValueError(f"d {basis}{i} must be a 2-form")
            terms = {}
            for k, c in form.terms.items():
                if not isinstance(c, Scalar):
                    raise TypeError(f"d {basis}{i} has non-real coefficient {c}")
                terms[k] = self.field(c)
            fixed.append(KForm._trusted(dim, 2, terms, self.field))
        self.d1 = tuple(fixed)
        self._dcache: dict[tuple[int, ...], list] = {}
        # structure constants of the frame: [e_i, e_j] = sum_k consts[i, j][k] e_k, i < j
        self._consts: dict[tuple[int, int], dict[int, Scalar]] = {}
        for k, form in enumerate(self.d1, 1):
            for (i, j), c in form.terms.items():
                self._consts.setdefault((i, j), {})[k] = -c

    @classmethod
    def from_dict(cls, dim: int, params: Sequence[str], derivatives: Mapping[int, Mapping[tuple[int, int], object]],
                  basis: str = "e") -> "StructureEquations":
        """Build from ``{i: {(j, k): coeff}}``; coefficients may be ints/Fractions/Scalars."""
        field = field_for(params)
        d1 = []
        for i in range(1, dim + 1):
            terms = {}
            for (j, k), c in derivatives.get(i, {}).items():
                if not j < k:
                    raise ValueError(f"d {basis}{i}: monomial ({j},{k}) must have j < k")
                terms[(j, k)] = field(c)
            d1.append(KForm(dim, 2, terms, field))
        return cls(dim, params, d1, basis)

    # -- equality -------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, StructureEquations):
            return NotImplemented
        return (self.dim, self.params, self.basis, self.d1) == (other.dim, other.params, other.basis, other.d1)

    def __hash__(self) -> int:
        return hash((self.dim, self.params, self.basis, self.d1))

    def __repr__(self) -> str:
        eqs = "; ".join(f"d{self.basis}{i}={f.format(self.basis)}" for i, f in enumerate(self.d1, 1))
        return f"StructureEquations(dim={self.dim}, params={list(self.params)}, {eqs})"

    # -- constructors of forms --------------------------------------------------
    def coframe(self, i: int) -> KForm:
        return KForm._trusted(self.dim, 1, {(i,): self.field.one}, self.field)

    def form(self, terms: Mapping[Sequence[int], object]) -> KForm:
        """Form from ``{(i, j, ...): coeff}``; unsorted keys are sorted with sign."""
        acc: dict = {}
        degree = None
        for idx, c in terms.items():
            idx = tuple(idx)
            degree = len(idx) if degree is None else degree
            if len(idx) != degree:
                raise ValueError("mixed degrees")
            if not isinstance(c, (Scalar, CScalar)):
                c = self.field(c)
            sign, key = sort_sign(idx)
            if sign == 0:
                continue
            v = c if sign > 0 else -c
            acc[key] = acc[key] + v if key in acc else v
        return KForm(self.dim, degree or 0, acc, self.field)

    def zero_form(self, degree: int) -> KForm:
        return KForm.zero(self.dim, degree, self.field)

    def vector(self, components: Iterable) -> Vector:
        comps = [c if isinstance(c, (Scalar, CScalar)) else self.field(c) for c in components]
        if len(comps) != self.dim:
            raise ValueError(f"vector needs {self.dim} components")
        return Vector(comps)

    def frame(self, i: int) -> Vector:
        return Vector.basis(self.field, self.dim, i)

    def specialize(self, values: Mapping[str, object]) -> "StructureEquations":
        """Substitute rational values for some parameters; the rest stay symbolic."""
        for k in values:
            if k not in self.params:
                raise KeyError(f"unknown parameter {k!r}")
        rest = tuple(p for p in self.params if p not in values)
        field = field_for(rest)
        d1 = []
        for form in self.d1:
            terms = {k: _restrict(c.subs(values), field) for k, c in form.terms.items()}
            d1.append(KForm(self.dim, 2, terms, field))
        return StructureEquations(self.dim, rest, d1, self.basis)

    # -- exterior derivative ----------------------------------------------------
    def _d_monomial(self, key: tuple[int, ...]) -> list:
        cached = self._dcache.get(key)
        if cached is not None:
            return cached
        acc: dict = {}
        for p, i in enumerate(key):
            for (j, k), c in self.d1[i - 1].terms.items():
                sign, new = sort_sign(key[:p] + (j, k) + key[p + 1:])
                if sign == 0:
                    continue
                if p % 2:
                    sign = -sign
                v = c if sign > 0 else -c
                acc[new] = acc[new] + v if new in acc else v
        out = [(k, v) for k, v in acc.items() if not v.is_zero()]
        self._dcache[key] = out
        return out

    def d(self, alpha: KForm) -> KForm:
        """Exterior derivative of an invariant form."""
        if alpha.dim != self.dim:
            raise ValueError(f"dimension mismatch: form {alpha.dim}, algebra {self.dim}")
        acc: dict = {}
        for key, c in alpha.terms.items():
            for new, s in self._d_monomial(key):
                v = c * s
                acc[new] = acc[new] + v if new in acc else v
        return KForm.from_accumulator(self.dim, alpha.degree + 1, acc, alpha.field)

    # -- bracket -----------------------------------------------------------------
    def bracket_basis(self, i: int, j: int) -> dict[int, Scalar]:
        """[e_i, e_j] as a sparse {k: coeff}."""
        if i == j:
            return {}
        if i < j:
            return self._consts.get((i, j), {})
        return {k: -c for k, c in self._consts.get((j, i), {}).items()}

    def bracket(self, x: Vector, y: Vector) -> Vector:
        zero = (x.components[0] * 0) if x.components else self.field.zero
        out = [zero] * self.dim
        for (i, j), consts in self._consts.items():
            coeff = x.components[i - 1] * y.components[j - 1] - x.components[j - 1] * y.components[i - 1]
            if coeff.is_zero():
                continue
            for k, c in consts.items():
                out[k - 1] = out[k - 1] + coeff * c
        return Vector(out)

    def ad_matrix(self, x: Vector) -> list:
        """Matrix of ad_X in the frame basis (column j = [X, e_j])."""
        cols = [self.bracket(x, self.frame(j)).components for j in range(1, self.dim + 1)]
        return linalg.transpose(cols)

    # -- structural checks -------------------------------------------------------
    def jacobi_check(self) -> JacobiResult:
        """d(d e^i) = 0 for all i, which is equivalent to the Jacobi identity."""
        for i, form in enumerate(self.d1, 1):
            dd = self.d(form)
            if dd:
                return JacobiResult(False, i, dd)
        return JacobiResult(True)

    def ad_traces(self) -> list[Scalar]:
        traces = []
        for i in range(1, self.dim + 1):
            t = self.field.zero
            for k in range(1, self.dim + 1):
                t = t + self.bracket_basis(i, k).get(k, self.field.zero)
            traces.append(t)
        return traces

    def unimodularity_check(self) -> bool:
        return all(t.is_zero() for t in self.ad_traces())

    def derived_algebra(self, basis: Sequence[Vector] | None = None) -> list[Vector]:
        """Row-reduced basis of [h, h] where h is spanned by ``basis`` (default: all)."""
        if basis is None:
            basis = [self.frame(i) for i in range(1, self.dim + 1)]
        brackets = [self.bracket(u, v).components for u, v in combinations(basis, 2)]
        brackets = [b for b in brackets if not all(c.is_zero() for c in b)]
        return [Vector(r) for r in linalg.span_basis(brackets)]

    def derived_series(self) -> list[int]:
        """Dimensions of g, [g,g], [[g,g],[g,g]], ... until the series stabilizes."""
        current = [self.frame(i) for i in range(1, self.dim + 1)]
        dims = [self.dim]
        while current:
            nxt = self.derived_algebra(current)
            if len(nxt) == len(current):
                break
            dims.append(len(nxt))
            current = nxt
        return dims

    def solvable_steps(self) -> int | None:
        """Derived length, or None if the algebra is not solvable."""
        series = self.derived_series()
        return len(series) - 1 if series[-1] == 0 else None

    def is_nilpotent(self) -> bool:
        current = [self.frame(i) for i in range(1, self.dim + 1)]
        full = list(current)
        for _ in range(self.dim + 1):
            if not current:
                return True
            vecs = [self.bracket(x, y).components for x in full for y in current]
            vecs = [v for v in vecs if not all(c.is_zero() for c in v)]
            nxt = [Vector(r) for r in linalg.span_basis(vecs)]
            if len(nxt) == len(current):
                return False
            current = nxt
        return not current

    def nilradical(self) -> list[Vector] | None:
        """Basis of the nilradical when it can be decided exactly, else None.

        Uses that for a solvable algebra the nilradical is the set of X with
        ad_X nilpotent and contains [g, g]; decided here when [g, g] has
        codimension at most one.
        """
        if self.solvable_steps() is None:
            return None
        derived = self.derived_algebra()
        if self.is_nilpotent():
            return [self.frame(i) for i in range(1, self.dim + 1)]
        if len(derived) == self.dim - 1:
            return derived
        return None

    def is_abelian_subspace(self, basis: Sequence[Vector]) -> bool:
        return all(self.bracket(u, v).is_zero() for u, v in combinations(basis, 2))


def _restrict(s: Scalar, field: ScalarField) -> Scalar:
    """Move a scalar into a field with fewer parameters (after substitution)."""
    if s.field is field:
        return s
    used = s.parameters()
    if any(p not in field.params for p in used):
        raise ValueError(f"{s} still depends on {used}")
    pos = [s.field.params.index(p) for p in field.params]

    def remap(poly):
        return field.ctx.from_dict({tuple(exps[i] for i in pos): c for exps, c in poly.terms()})

    from .scalar import normalize
    return normalize(field, remap(s.num), remap(s.den))


def abelian(n: int, basis: str = "e") -> StructureEquations:
    """The abelian Lie algebra R^n (all d e^i = 0)."""
    field = field_for(())
    return StructureEquations(n, (), [KForm.zero(n, 2, field) for _ in range(n)], basis)
