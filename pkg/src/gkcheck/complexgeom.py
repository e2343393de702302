"""Invariant complex and Hermitian geometry: J from (1,0)-forms, bidegrees, d^c, SKT, GK, Lee form.

Conventions (fixed once, used everywhere):

* A complex structure is given by (1,0)-forms ``w^r``; on vectors ``J`` is the
  real endomorphism with ``w^r(J X) = i w^r(X)``.  For ``w = e^1 + i e^2``
  this gives ``J e_1 = e_2``.
* ``F(X, Y) = g(J X, Y)``.
* ``J`` acts on a k-form by ``(J a)(X_1..X_k) = a(J^-1 X_1, ..., J^-1 X_k)``,
  i.e. the plain pullback by ``J`` times ``(-1)^k``.  With this sign the
  torsion of the compact example comes out as ``J_+ dF_+ = -e^134``, and
  ``d^c F = i(dbar - d)F = J d J F`` for any (1,1)-form ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import linalg
from .exterior import KForm, StructureEquations, Vector, wedge
from .scalar import CScalar, Scalar

__all__ = [
    "DegenerateCoframeError",
    "NotIntegrableError",
    "MetricMismatchError",
    "ComplexStructure",
    "HermitianMetric",
    "HermitianPair",
    "IntegrabilityCertificate",
    "GKReport",
    "LeeForm",
    "build_complex_structure",
    "is_integrable",
    "nijenhuis",
    "bidegree_decompose",
    "act_on_form",
    "d_c",
    "skt_check",
    "gk_check",
    "lee_form",
]


class DegenerateCoframeError(ValueError):
    pass


class NotIntegrableError(ValueError):
    pass


class MetricMismatchError(ValueError):
    pass


def _cmatrix_row(form: KForm, n: int) -> list[CScalar]:
    zero = CScalar(form.field.zero)
    row = [zero] * n
    for (i,), c in form.terms.items():
        row[i - 1] = c if isinstance(c, CScalar) else CScalar(c)
    return row


class ComplexStructure:
    """Invariant almost complex structure determined by a (1,0)-coframe."""

    def __init__(self, ambient: StructureEquations, coframe10: Sequence[KForm]):
        n = ambient.dim
        m = len(coframe10)
        if n % 2 or 2 * m != n:
            raise DegenerateCoframeError(f"need {n // 2} (1,0)-forms in even dimension, got {m} for dim {n}")
        for w in coframe10:
            if w.dim != n or (w.terms and w.degree != 1):
                raise DegenerateCoframeError("coframe entries must be 1-forms on the algebra")
        self.ambient = ambient
        f = ambient.field
        self.coframe10 = tuple(KForm(n, 1, {k: _lift(f, c) for k, c in w.complexify().terms.items()}, f)
                               for w in coframe10)
        self.m = m
        rows = [_cmatrix_row(w, n) for w in self.coframe10]
        rows += [[c.conj() for c in r] for r in rows]
        if linalg.bareiss_rank(rows) != n:
            raise DegenerateCoframeError("the forms and their conjugates are not a basis")
        self.omega = rows                     # theta^r = sum_j omega[r][j] e^j
        self.omega_inv = linalg.inverse(rows)  # e^j = sum_r omega_inv[j][r] theta^r
        i = CScalar.i(f)
        zero = CScalar(f.zero)
        diag = linalg.zeros(n, n, zero)
        for r in range(m):
            diag[r][r] = i
            diag[m + r][m + r] = -i
        endo = linalg.matmul(linalg.matmul(self.omega_inv, diag), rows)
        if any(not c.is_real() for r in endo for c in r):
            raise DegenerateCoframeError("derived endomorphism is not real")
        self.endo = [[c.re for c in r] for r in endo]
        sq = linalg.matmul(self.endo, self.endo)
        if not linalg.equal(sq, linalg.neg(linalg.identity(n, f.zero, f.one))):
            raise AssertionError("J^2 != -Id")
        n2 = 2 * m
        self._to_theta = [KForm.from_accumulator(n2, 1, {(r + 1,): self.omega_inv[j][r] for r in range(n2)}, f)
                          for j in range(n)]
        self._from_theta = [KForm.from_accumulator(n, 1, {(j + 1,): self.omega[r][j] for j in range(n)}, f)
                            for r in range(n2)]
        # covector action a -> a o J^-1 = -(a o J)
        self._form_action = [KForm.from_accumulator(n, 1, {(l + 1,): -self.endo[j][l] for l in range(n)}, f)
                             for j in range(n)]

    @property
    def dim(self) -> int:
        return self.ambient.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, ComplexStructure):
            return NotImplemented
        return self.ambient == other.ambient and self.coframe10 == other.coframe10

    def __hash__(self) -> int:
        return hash(self.coframe10)

    def same_endomorphism(self, other: "ComplexStructure", sign: int = 1) -> bool:
        return linalg.equal(self.endo, other.endo if sign > 0 else linalg.neg(other.endo))

    def apply(self, x: Vector) -> Vector:
        return Vector(linalg.matvec(self.endo, list(x.components)))

    def theta_names(self) -> list[str]:
        return [f"w{r}" for r in range(1, self.m + 1)] + [f"wb{r}" for r in range(1, self.m + 1)]

    def to_theta(self, alpha: KForm) -> KForm:
        """Rewrite a form in the basis (w^1..w^m, conj w^1..conj w^m)."""
        return alpha.complexify().pullback(self._to_theta)

    def from_theta(self, alpha: KForm) -> KForm:
        return alpha.pullback(self._from_theta)

    def specialize(self, ambient: StructureEquations, values: Mapping[str, object]) -> "ComplexStructure":
        return ComplexStructure(ambient, [_move(w.subs(values), ambient) for w in self.coframe10])


def _lift(field, c):
    if isinstance(c, CScalar):
        return CScalar(field(c.re), field(c.im))
    return CScalar(field(c))


def _move(form: KForm, ambient: StructureEquations) -> KForm:
    from .exterior import _restrict
    terms = {}
    for k, c in form.terms.items():
        if isinstance(c, CScalar):
            terms[k] = CScalar(_restrict(c.re, ambient.field), _restrict(c.im, ambient.field))
        else:
            terms[k] = _restrict(c, ambient.field)
    return KForm(ambient.dim, form.degree, terms, ambient.field)


def build_complex_structure(g: StructureEquations, coframe10: Sequence[KForm]) -> ComplexStructure:
    return ComplexStructure(g, coframe10)


def bidegree_decompose(J: ComplexStructure, alpha: KForm) -> dict[tuple[int, int], KForm]:
    """Split a (complexified) form into its (p, q) components, in the e-basis."""
    theta = J.to_theta(alpha)
    parts: dict[tuple[int, int], dict] = {}
    for key, c in theta.terms.items():
        p = sum(1 for r in key if r <= J.m)
        parts.setdefault((p, len(key) - p), {})[key] = c
    return {pq: J.from_theta(KForm._trusted(theta.dim, alpha.degree, terms, alpha.field))
            for pq, terms in sorted(parts.items())}


def _theta_parts(J: ComplexStructure, alpha: KForm) -> dict[tuple[int, int], KForm]:
    theta = J.to_theta(alpha)
    parts: dict[tuple[int, int], dict] = {}
    for key, c in theta.terms.items():
        p = sum(1 for r in key if r <= J.m)
        parts.setdefault((p, len(key) - p), {})[key] = c
    return {pq: KForm._trusted(theta.dim, alpha.degree, t, alpha.field) for pq, t in parts.items()}


def act_on_form(J: ComplexStructure, alpha: KForm) -> KForm:
    """(J a)(X_1..X_k) = a(J^-1 X_1, ..., J^-1 X_k)."""
    return alpha.pullback(J._form_action)


def nijenhuis(J: ComplexStructure) -> dict[tuple[int, int], Vector]:
    """Nonzero values N(e_i, e_j), i < j, of N(X,Y) = [JX,JY] - [X,Y] - J[JX,Y] - J[X,JY]."""
    g = J.ambient
    out = {}
    for i in range(1, g.dim + 1):
        for j in range(i + 1, g.dim + 1):
            x, y = g.frame(i), g.frame(j)
            jx, jy = J.apply(x), J.apply(y)
            n = g.bracket(jx, jy) - g.bracket(x, y) - J.apply(g.bracket(jx, y)) - J.apply(g.bracket(x, jy))
            if not n.is_zero():
                out[(i, j)] = n
    return out


@dataclass
class IntegrabilityCertificate:
    """d w^r in the (w, conj w) basis, plus the Nijenhuis cross-check."""

    integrable: bool
    derivatives: list[KForm]
    names: list[str]
    nijenhuis_zero: bool
    obstruction: dict[int, KForm] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.integrable

    def lines(self, label: str = "w") -> list[str]:
        return [f"d {label}{r} = {form.format(self.names)}" for r, form in enumerate(self.derivatives, 1)]


def is_integrable(J: ComplexStructure) -> IntegrabilityCertificate:
    """True iff no d w^r has a (0,2)-component; cross-checked against Nijenhuis."""
    cached = getattr(J, "_integrability", None)
    if cached is not None:
        return cached
    g = J.ambient
    derivs = []
    obstruction = {}
    for r, w in enumerate(J.coframe10, 1):
        theta = J.to_theta(g.d(w))
        derivs.append(theta)
        bad = {k: c for k, c in theta.terms.items() if all(i > J.m for i in k)}
        if bad:
            obstruction[r] = KForm._trusted(theta.dim, 2, bad, theta.field)
    ok = not obstruction
    nij_zero = not nijenhuis(J)
    if ok != nij_zero:
        raise AssertionError("(0,2)-component test and Nijenhuis tensor disagree")
    J._integrability = IntegrabilityCertificate(ok, derivs, J.theta_names(), nij_zero, obstruction)
    return J._integrability


class HermitianMetric:
    """Invariant metric given by its Gram matrix in the frame e_1..e_n."""

    def __init__(self, ambient: StructureEquations, gram: Sequence[Sequence]):
        n = ambient.dim
        f = ambient.field
        gram = [[f(c) for c in row] for row in gram]
        if len(gram) != n or any(len(r) != n for r in gram):
            raise ValueError(f"Gram matrix must be {n}x{n}")
        if not linalg.equal(gram, linalg.transpose(gram)):
            raise ValueError("Gram matrix is not symmetric")
        if linalg.det(gram).is_zero():
            raise ValueError("degenerate metric")
        self.ambient = ambient
        self.gram = gram

    @classmethod
    def identity(cls, ambient: StructureEquations) -> "HermitianMetric":
        f = ambient.field
        return cls(ambient, linalg.identity(ambient.dim, f.zero, f.one))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HermitianMetric):
            return NotImplemented
        return self.ambient == other.ambient and linalg.equal(self.gram, other.gram)

    def __hash__(self) -> int:
        return hash(tuple(map(tuple, self.gram)))

    def is_parameter_free(self) -> bool:
        return all(c.is_constant() for r in self.gram for c in r)

    def positivity(self, assignment: Mapping[str, float] | None = None) -> str:
        """'positive-definite', 'not positive-definite', or an 'assumed ...' annotation."""
        n = len(self.gram)
        if self.is_parameter_free():
            minors = [linalg.det([r[:k] for r in self.gram[:k]]).to_fraction() for k in range(1, n + 1)]
            return "positive-definite" if all(m > 0 for m in minors) else "not positive-definite"
        if assignment is None:
            return "assumed positive-definite"
        import numpy as np
        from .scalar import evaluate_numeric
        num = np.array([[evaluate_numeric(c, assignment) for c in r] for r in self.gram])
        ok = all(np.linalg.det(num[:k, :k]) > 0 for k in range(1, n + 1))
        return "assumed positive-definite (numeric spot-check passed)" if ok else \
            "assumed positive-definite (numeric spot-check FAILED)"

    def inner(self, x: Vector, y: Vector):
        return sum((x.components[i] * self.gram[i][j] * y.components[j]
                    for i in range(len(self.gram)) for j in range(len(self.gram))
                    if not self.gram[i][j].is_zero()), self.ambient.field.zero)

    def specialize(self, ambient: StructureEquations, values) -> "HermitianMetric":
        from .exterior import _restrict
        return HermitianMetric(ambient, [[_restrict(c.subs(values), ambient.field) for c in r] for r in self.gram])


class HermitianPair:
    """(J, g) with g(J., J.) = g and fundamental form F(X, Y) = g(JX, Y)."""

    def __init__(self, J: ComplexStructure, g: HermitianMetric):
        if J.ambient != g.ambient:
            raise ValueError("complex structure and metric live on different algebras")
        jt = linalg.transpose(J.endo)
        if not linalg.equal(linalg.matmul(linalg.matmul(jt, g.gram), J.endo), g.gram):
            raise ValueError("metric is not J-Hermitian: g(J., J.) != g")
        self.J = J
        self.g = g
        fmat = linalg.matmul(jt, g.gram)  # F(e_j, e_k) = (J^T G)_{jk}
        n = J.dim
        self.fmatrix = fmat
        self.F = KForm.from_accumulator(n, 2, {(j + 1, k + 1): fmat[j][k]
                                               for j in range(n) for k in range(j + 1, n)}, J.ambient.field)

    @property
    def ambient(self) -> StructureEquations:
        return self.J.ambient


def d_c(pair: HermitianPair) -> KForm:
    """d^c F = i (dbar - d) F, checked against the pullback route J d J F."""
    J = pair.J
    g = J.ambient
    cert = is_integrable(J)
    if not cert:
        raise NotIntegrableError("d^c needs an integrable complex structure")
    dF = g.d(pair.F)
    parts = _theta_parts(J, dF)
    extra = [pq for pq in parts if pq not in ((2, 1), (1, 2))]
    if extra:
        raise AssertionError(f"dF of a (1,1)-form has components {extra}")
    i = CScalar.i(g.field)
    zero = KForm.zero(2 * J.m, 3, g.field)
    theta = (parts.get((1, 2), zero) - parts.get((2, 1), zero)) * i
    via_bidegree = J.from_theta(theta).to_real()
    via_pullback = act_on_form(J, g.d(act_on_form(J, pair.F)))
    if via_bidegree != via_pullback:
        raise AssertionError("d^c routes disagree: bidegree formula vs J d J")
    return via_bidegree


def skt_check(pair: HermitianPair) -> bool:
    return pair.ambient.d(d_c(pair)).is_zero()


@dataclass
class GKReport:
    H: KForm
    eq3a: bool
    eq3b: bool
    eq3c: bool
    eq2: bool
    trivial: bool
    JdF_plus: KForm
    JdF_minus: KForm

    @property
    def holds(self) -> bool:
        return self.eq3a and self.eq3b and self.eq3c and self.eq2


def gk_check(plus: HermitianPair, minus: HermitianPair) -> GKReport:
    """Check J+dF+ + J-dF- = 0, d(J+dF+) = 0, d(J-dF-) = 0 (and the d^c form)."""
    if plus.g != minus.g:
        raise MetricMismatchError("the two Hermitian pairs use different metrics")
    g = plus.ambient
    for pair in (plus, minus):
        if not is_integrable(pair.J):
            raise NotIntegrableError("GK equations need integrable J+ and J-")
    jp = act_on_form(plus.J, g.d(plus.F))
    jm = act_on_form(minus.J, g.d(minus.F))
    hp = d_c(plus)
    hm = d_c(minus)
    trivial = plus.J.same_endomorphism(minus.J) or plus.J.same_endomorphism(minus.J, -1)
    return GKReport(
        H=hp,
        eq3a=(jp + jm).is_zero(),
        eq3b=g.d(jp).is_zero(),
        eq3c=g.d(jm).is_zero(),
        eq2=(hp + hm).is_zero() and g.d(hp).is_zero() and g.d(hm).is_zero(),
        trivial=trivial,
        JdF_plus=jp,
        JdF_minus=jm,
    )


@dataclass
class LeeForm:
    theta: KForm
    closed: bool

    @property
    def lck(self) -> bool:
        return self.closed


def lee_form(pair: HermitianPair) -> LeeForm | None:
    """Solve dF = theta ^ F; None when no invariant 1-form works."""
    g = pair.ambient
    n = g.dim
    if n < 6:
        raise ValueError("the Lee form is only determined by dF = theta ^ F in dimension >= 6")
    dF = g.d(pair.F)
    images = [wedge(g.coframe(i), pair.F) for i in range(1, n + 1)]
    keys = sorted({k for im in images for k in im.terms} | set(dF.terms))
    zero = g.field.zero
    if not keys:
        return LeeForm(g.zero_form(1), True)
    mat = [[im.terms.get(k, zero) for im in images] for k in keys]
    if linalg.bareiss_rank(mat) != n:
        raise AssertionError("theta -> theta ^ F is not injective")
    sol = linalg.solve(mat, [dF.terms.get(k, zero) for k in keys])
    if sol is None:
        return None
    theta = KForm.from_accumulator(n, 1, {(i + 1,): c for i, c in enumerate(sol)}, g.field)
    return LeeForm(theta, g.d(theta).is_zero())
