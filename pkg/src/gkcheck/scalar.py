"""Exact coefficients: rational functions over QQ in named parameters.

A :class:`Scalar` is a reduced fraction of two sparse polynomials with
rational coefficients (backed by FLINT's ``fmpq_mpoly``).  The denominator
is always monic with respect to the graded-lex term order, so equal values
have identical representations and ``==`` is structural.

:class:`CScalar` adjoins the imaginary unit as a pair ``re + i*im``.
Parameters are treated as algebraically independent transcendentals; no
numeric constant (such as pi) ever enters exact arithmetic.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Mapping, Sequence

import flint

__all__ = [
    "ScalarField",
    "Scalar",
    "CScalar",
    "EvaluationError",
    "normalize",
    "evaluate_numeric",
    "field_for",
]


class EvaluationError(ValueError):
    """Raised when a numeric evaluation is impossible (missing value, pole)."""


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, int):
        return flint.fmpq(x)
    if isinstance(x, Rational):
        return flint.fmpq(int(x.numerator), int(x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def _to_fraction(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class ScalarField:
    """The field QQ(params).  Instances are interned per parameter tuple."""

    __slots__ = ("params", "ctx", "zero", "one", "_gens", "__weakref__")

    def __new__(cls, params: Sequence[str] = ()):
        return _field(tuple(params))

    @classmethod
    def _create(cls, params: tuple[str, ...]) -> "ScalarField":
        for p in params:
            if not p.isidentifier():
                raise ValueError(f"invalid parameter name {p!r}")
        if len(set(params)) != len(params):
            raise ValueError(f"duplicate parameter names in {params}")
        self = object.__new__(cls)
        self.params = params
        self.ctx = flint.fmpq_mpoly_ctx.get(params, "deglex")
        self._gens = dict(zip(params, self.ctx.gens()))
        one = self.ctx.constant(1)
        self.zero = Scalar._raw(self, self.ctx.constant(0), one)
        self.one = Scalar._raw(self, one, one)
        return self

    def __repr__(self) -> str:
        return f"ScalarField({list(self.params)})"

    def __reduce__(self):
        return (ScalarField, (self.params,))

    def __call__(self, value) -> "Scalar":
        """Coerce an int, Fraction or Scalar of a compatible field."""
        if isinstance(value, Scalar):
            if value.field is self:
                return value
            if not value.field.params:
                return self(value.to_fraction())
            if set(value.field.params) <= set(self.params):
                return self.lift(value)
            raise ValueError(f"cannot coerce {value!r} into {self!r}")
        c = _fmpq(value)
        return Scalar._raw(self, self.ctx.constant(c), self.one.den)

    def param(self, name: str) -> "Scalar":
        try:
            gen = self._gens[name]
        except KeyError:
            raise KeyError(f"unknown parameter {name!r}; field has {list(self.params)}") from None
        return Scalar._raw(self, gen, self.one.den)

    def fraction(self, num, den=1) -> "Scalar":
        return self(Fraction(num, den))

    def poly(self, terms: Mapping[tuple[int, ...], object]):
        """Polynomial from an exponent-vector mapping (for parsers and tests)."""
        return self.ctx.from_dict({tuple(k): _fmpq(v) for k, v in terms.items()})

    def lift(self, s: "Scalar") -> "Scalar":
        """Re-express ``s`` (over a sub-list of parameters) in this field."""
        pos = [self.params.index(p) for p in s.field.params]

        def remap(poly):
            out = {}
            for exps, c in poly.terms():
                e = [0] * len(self.params)
                for i, k in zip(pos, exps):
                    e[i] = k
                out[tuple(e)] = c
            return self.ctx.from_dict(out)

        return Scalar._raw(self, remap(s.num), remap(s.den))


@lru_cache(maxsize=None)
def _field(params: tuple[str, ...]) -> ScalarField:
    return ScalarField._create(params)


def field_for(params: Sequence[str]) -> ScalarField:
    return _field(tuple(params))


def normalize(field: ScalarField, num, den) -> "Scalar":
    """Canonical reduced fraction ``num/den``: gcd removed, denominator monic."""
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return field.zero
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return Scalar._raw(field, num, den)


class Scalar:
    """Immutable element of QQ(params)."""

    __slots__ = ("field", "num", "den", "_hash")

    @classmethod
    def _raw(cls, field: ScalarField, num, den) -> "Scalar":
        self = object.__new__(cls)
        self.field = field
        self.num = num
        self.den = den
        self._hash = None
        return self

    # -- coercion -----------------------------------------------------------
    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field is self.field:
                return other
            if not other.field.params:
                return self.field(other)
            if not self.field.params:
                return NotImplemented
            raise ValueError(f"mixing scalars of {self.field!r} and {other.field!r}")
        if isinstance(other, (int, Rational)):
            return self.field(other)
        return NotImplemented

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on parameters")
        if self.num.is_zero():
            return Fraction(0)
        return _to_fraction(self.num.leading_coefficient()) / _to_fraction(self.den.leading_coefficient())

    def parameters(self) -> tuple[str, ...]:
        """Names of the parameters that actually occur."""
        used = set()
        for poly in (self.num, self.den):
            for exps in poly.monoms():
                used.update(i for i, e in enumerate(exps) if e)
        return tuple(self.field.params[i] for i in sorted(used))

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den.is_one() and o.den.is_one():
            return Scalar._raw(self.field, self.num + o.num, self.den)
        if self.den == o.den:
            return normalize(self.field, self.num + o.num, self.den)
        return normalize(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar._raw(self.field, -self.num, self.den)

    def __pos__(self) -> "Scalar":
        return self

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if self.num.is_zero() or o.num.is_zero():
            return self.field.zero
        if self.den.is_one() and o.den.is_one():
            return Scalar._raw(self.field, self.num * o.num, self.den)
        # a nonzero constant factor cannot create a common divisor
        if o.is_constant():
            c = o.num.leading_coefficient() / o.den.leading_coefficient()
            return Scalar._raw(self.field, self.num * c, self.den)
        if self.is_constant():
            c = self.num.leading_coefficient() / self.den.leading_coefficient()
            return Scalar._raw(self.field, o.num * c, o.den)
        return normalize(self.field, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.num.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return normalize(self.field, self.den, self.num)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        return normalize(self.field, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int) -> "Scalar":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return Scalar._raw(self.field, self.num ** k, self.den ** k)

    def conj(self) -> "Scalar":
        return self

    @property
    def real(self) -> "Scalar":
        return self

    @property
    def imag(self) -> "Scalar":
        return self.field.zero

    # -- comparison / hashing -----------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, CScalar):
            return other.im.is_zero() and other.re == self
        o = self._other(other) if isinstance(other, (Scalar, int, Rational)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.to_fraction())
            else:
                self._hash = hash((self.field.params, tuple(self.num.to_dict().items()).__repr__(),
                                   tuple(self.den.to_dict().items()).__repr__()))
        return self._hash

    # -- substitution / evaluation -----------------------------------------
    def subs(self, values: Mapping[str, object]) -> "Scalar":
        """Exact substitution of rational values; the field is unchanged."""
        vals = {self.field.params.index(k): _fmpq(v) for k, v in values.items() if k in self.field.params}
        if not vals:
            return self
        return normalize(self.field, _subs_poly(self.field, self.num, vals), _subs_poly(self.field, self.den, vals))

    def evaluate(self, assignment: Mapping[str, object]):
        """Evaluate with arbitrary numeric values (float, mpf, complex, ...)."""
        num = _eval_poly(self.field, self.num, assignment)
        den = _eval_poly(self.field, self.den, assignment)
        if abs(den) <= 1e-12:
            raise EvaluationError(f"denominator of {self} vanishes at {dict(assignment)}")
        return num / den

    # -- printing ------------------------------------------------------------
    def __str__(self) -> str:
        if self.den.is_one():
            return _poly_str(self.field, self.num)
        # print with integer coefficients: (a + 1)/(3*b) rather than (a/3 + 1/3)/b
        scale = Fraction(1)
        for c in list(self.num.coeffs()) + list(self.den.coeffs()):
            q = int(c.q)
            scale = scale * q / math.gcd(int(scale.numerator), q)
        content = math.gcd(*(int((c * _fmpq(scale)).p) for c in list(self.num.coeffs()) + list(self.den.coeffs())))
        factor = _fmpq(scale / content)
        num = _poly_str(self.field, self.num * factor)
        den = _poly_str(self.field, self.den * factor)
        if len(self.num.monoms()) > 1:
            num = f"({num})"
        if len(self.den.monoms()) > 1 or "*" in den or "/" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"


def _subs_poly(field: ScalarField, poly, vals: dict[int, flint.fmpq]):
    out: dict[tuple[int, ...], flint.fmpq] = {}
    for exps, c in poly.terms():
        e = list(exps)
        for i, v in vals.items():
            if e[i]:
                c = c * v ** e[i]
                e[i] = 0
        key = tuple(e)
        out[key] = out.get(key, 0) + c
    return field.ctx.from_dict({k: v for k, v in out.items() if v != 0})


def _eval_poly(field: ScalarField, poly, assignment: Mapping[str, object]):
    values = []
    for i, p in enumerate(field.params):
        if any(exps[i] for exps in poly.monoms()):
            if p not in assignment:
                raise EvaluationError(f"no value for parameter {p!r}")
            values.append(assignment[p])
        else:
            values.append(None)
    total = 0
    for exps, c in poly.terms():
        term = _to_fraction(c)
        t = None
        for v, e in zip(values, exps):
            if e:
                e = int(e)
                t = v ** e if t is None else t * v ** e
        if t is None:
            total = total + term
        else:
            total = total + t * term.numerator / term.denominator
    return total


def _monomial_str(field: ScalarField, exps) -> str:
    parts = []
    for name, e in zip(field.params, exps):
        parts.extend([name] * e)
    return "*".join(parts)


def _poly_str(field: ScalarField, poly) -> str:
    if poly.is_zero():
        return "0"
    out = []
    for exps, c in poly.terms():
        fr = _to_fraction(c)
        mono = _monomial_str(field, exps)
        sign = "-" if fr < 0 else "+"
        p, q = abs(fr.numerator), fr.denominator
        if mono:
            body = mono if p == 1 else f"{p}*{mono}"
        else:
            body = str(p)
        if q != 1:
            body = f"{body}/{q}"
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


def evaluate_numeric(s, assignment: Mapping[str, float]) -> float:
    """Floating-point value of ``s``.  Approximate; for oracle paths only."""
    if isinstance(s, CScalar):
        return complex(s.re.evaluate(assignment), s.im.evaluate(assignment))
    return float(s.evaluate(assignment))


class CScalar:
    """Immutable ``re + i*im`` with Scalar parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Scalar, im: Scalar | None = None):
        if im is None:
            im = re.field.zero
        elif im.field is not re.field:
            if not im.field.params:
                im = re.field(im)
            elif not re.field.params:
                re = im.field(re)
            else:
                raise ValueError("real and imaginary parts from different fields")
        self.re = re
        self.im = im

    @property
    def field(self) -> ScalarField:
        return self.re.field

    @classmethod
    def i(cls, field: ScalarField) -> "CScalar":
        return cls(field.zero, field.one)

    def _other(self, other):
        if isinstance(other, CScalar):
            return other
        if isinstance(other, Scalar):
            return CScalar(other, other.field.zero)
        if isinstance(other, (int, Rational)):
            return CScalar(self.re.field(other))
        return NotImplemented

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    @property
    def real(self) -> Scalar:
        return self.re

    @property
    def imag(self) -> Scalar:
        return self.im

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return CScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "CScalar":
        return CScalar(-self.re, -self.im)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return CScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return CScalar(self.re * other, self.im * other)
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.im.is_zero():
            return CScalar(self.re * o.re, self.im * o.re)
        if self.im.is_zero():
            return CScalar(self.re * o.re, self.re * o.im)
        return CScalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self) -> "CScalar":
        return CScalar(self.re, -self.im)

    def abs2(self) -> Scalar:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "CScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero scalar")
        n = self.abs2()
        return CScalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return CScalar(self.re / other, self.im / other)
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __eq__(self, other) -> bool:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im.is_zero():
            return hash(self.re)
        return hash((self.re, self.im))

    def subs(self, values) -> "CScalar":
        return CScalar(self.re.subs(values), self.im.subs(values))

    def __str__(self) -> str:
        if self.im.is_zero():
            return str(self.re)
        im = _imag_str(self.im)
        if self.re.is_zero():
            return im
        if im.startswith("-"):
            return f"{self.re} - {im[1:]}"
        return f"{self.re} + {im}"

    def __repr__(self) -> str:
        return f"CScalar({str(self)!r})"


def _imag_str(s: Scalar) -> str:
    """``i`` times a scalar, written so the grammar re-reads it."""
    if s.den.is_one() and len(s.num.monoms()) == 1:
        (exps, c), = s.num.terms()
        fr = _to_fraction(c)
        sign = "-" if fr < 0 else ""
        p, q = abs(fr.numerator), fr.denominator
        mono = _monomial_str(s.field, exps)
        body = "i" if p == 1 else f"{p}*i"
        if mono:
            body += f"*{mono}"
        if q != 1:
            body += f"/{q}"
        return sign + body
    return f"i*({s})"
