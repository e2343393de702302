"""Built-in catalog entries and executable coordinate models of the groups."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .complexgeom import ComplexStructure, HermitianMetric
from .exterior import StructureEquations
from .groups import GroupPresentation, IntegerMatrix, companion, inoue_lattice_presentation
from .scalar import CScalar

__all__ = ["CatalogEntry", "GroupRecipe", "GroupModel", "get_entry", "entry_names", "numeric_coframe_check",
           "associativity_defect", "left_invariance_defect", "numeric_value", "DEFAULT_LATTICE"]

# companion matrix of x^3 - x - 1
DEFAULT_LATTICE = companion([-1, -1, 0])


@dataclass(frozen=True)
class GroupRecipe:
    lattice: IntegerMatrix
    rotation: int | None = 4
    blocks: int = 1

    def presentation(self) -> GroupPresentation:
        return inoue_lattice_presentation(self.lattice, self.rotation, self.blocks)


@dataclass
class CatalogEntry:
    name: str
    algebra: StructureEquations
    plus: ComplexStructure | None = None
    minus: ComplexStructure | None = None
    metric: HermitianMetric | None = None
    point: dict[str, Fraction] = field(default_factory=dict)
    group: GroupRecipe | None = None
    model: "GroupModel | None" = None
    annotations: tuple[str, ...] = ()

    def __post_init__(self):
        g = self.algebra
        for J in (self.plus, self.minus):
            if J is not None and J.ambient != g:
                raise ValueError(f"{self.name}: complex structure lives on another algebra")
        if self.metric is not None and self.metric.ambient != g:
            raise ValueError(f"{self.name}: metric lives on another algebra")
        for k in self.point:
            if k not in g.params:
                raise ValueError(f"{self.name}: point assigns unknown parameter {k!r}")
        if self.model is not None and self.model.dim != g.dim:
            raise ValueError(f"{self.name}: model dimension {self.model.dim} != {g.dim}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CatalogEntry):
            return NotImplemented
        return (self.name, self.algebra, self.plus, self.minus, self.metric, self.point, self.group) == \
            (other.name, other.algebra, other.plus, other.minus, other.metric, other.point, other.group)

    def at_point(self, point: Mapping[str, Fraction] | None = None) -> "CatalogEntry":
        """Entry with the given (default: its own) parameter values substituted."""
        values = dict(self.point if point is None else point)
        if not values:
            return self
        g = self.algebra.specialize(values)
        return CatalogEntry(
            self.name, g,
            self.plus.specialize(g, values) if self.plus else None,
            self.minus.specialize(g, values) if self.minus else None,
            self.metric.specialize(g, values) if self.metric else None,
            {}, self.group, None, self.annotations)


# coordinate models -------------------------------------------------------------

Point = Sequence
Product = Callable[[Point, Point, Mapping, object], list]
Coframe = Callable[[Point, Mapping, object], list]


@dataclass
class GroupModel:
    """Group law on R^n and an invariant coframe, both executable.

    ``product(x, y, params, lib)`` and ``coframe(x, params, lib)`` take a
    numeric library (``mpmath.mp`` or ``math``) providing exp, sin, cos.
    ``coframe`` returns rows: e^i = sum_mu C[i][mu] dx^mu.
    """
    dim: int
    product: Product
    coframe: Coframe
    identity: tuple = ()

    def __post_init__(self):
        if not self.identity:
            self.identity = (0,) * self.dim

    @classmethod
    def abelian(cls, n: int) -> "GroupModel":
        return cls(n, lambda x, y, p, lib: [a + b for a, b in zip(x, y)],
                   lambda x, p, lib: [[1 if i == j else 0 for j in range(n)] for i in range(n)])


def _inoue_product(blocks: int, include_u: bool = True):
    def product(x, y, p, lib):
        a, b = p.get("a", 1), p.get("b", 0)
        t = x[0]
        out = [t + y[0]]
        if include_u:
            out += [lib.exp(a * t) * y[1] + x[1],
                    lib.exp(-a * t / 2) * y[2] + x[2],
                    lib.exp(-a * t / 2) * y[3] + x[3]]
        base = 4 if include_u else 1
        c, s = lib.cos(b * t), lib.sin(b * t)
        for k in range(blocks):
            u, v = y[base + 2 * k], y[base + 2 * k + 1]
            out += [u * c - v * s + x[base + 2 * k], u * s + v * c + x[base + 2 * k + 1]]
        return out
    return product


def _inoue_coframe(blocks: int, include_u: bool = True, bname: str = "b"):
    def coframe(x, p, lib):
        a, b = p.get("a", 1), p.get(bname, 0)
        t = x[0]
        n = len(x)
        rows = []

        def row(entries):
            r = [0] * n
            for k, v in entries.items():
                r[k] = v
            return r
        if include_u:
            rows += [row({1: lib.exp(-a * t)}), row({0: 1}),
                     row({2: lib.exp(a * t / 2)}), row({3: lib.exp(a * t / 2)})]
            base = 4
        else:
            rows.append(row({0: 1}))
            base = 1
        c, s = lib.cos(b * t), lib.sin(b * t)
        for k in range(blocks):
            i, j = base + 2 * k, base + 2 * k + 1
            rows += [row({i: c, j: s}), row({i: -s, j: c})]
        return rows
    return coframe


def _rot_product(x, y, p, lib):
    b = p.get("b2", 0)
    c, s = lib.cos(b * x[0]), lib.sin(b * x[0])
    return [x[0] + y[0], y[1] * c - y[2] * s + x[1], y[1] * s + y[2] * c + x[2]]


def _l6_product(x, y, p, lib):
    t = x[0]
    return [t + y[0], lib.exp(t) * y[1] + x[1]] + [lib.exp(-t / 2) * y[k] + x[k] for k in range(2, 6)]


def _l6_coframe(x, p, lib):
    t = x[0]
    rows = [[0] * 6 for _ in range(6)]
    rows[0][1] = lib.exp(-t)
    rows[1][0] = 1
    for k in range(2, 6):
        rows[k][k] = lib.exp(t / 2)
    return rows


# numeric checks ------------------------------------------------------------------

def _mp(dps: int):
    import mpmath
    ctx = mpmath.mp.clone() if hasattr(mpmath.mp, "clone") else mpmath.mp
    ctx.dps = dps
    return ctx


def numeric_value(v, lib):
    """A number, or a string such as ``pi/2`` or ``3/4`` evaluated at the working precision."""
    if not isinstance(v, str):
        return lib.mpf(v)
    from .parser import parse_scalar
    from .scalar import field_for
    return parse_scalar(v, field_for(("pi",))).evaluate({"pi": lib.pi})


def _constants(g: StructureEquations, assignment: Mapping, lib) -> list[list]:
    """c[i][(j, k)] numeric, from d e^i = sum c e^j^e^k."""
    missing = [p for p in g.params if p not in assignment]
    if missing:
        raise ValueError(f"assignment misses parameters {missing}")
    vals = {k: numeric_value(v, lib) for k, v in assignment.items()}
    out = []
    for form in g.d1:
        out.append({key: _num(c, vals, lib) for key, c in form.terms.items()})
    return out


def _num(c, vals, lib):
    if isinstance(c, CScalar):
        raise ValueError("structure constants must be real")
    return c.evaluate(vals)


def numeric_coframe_check(model: GroupModel, g: StructureEquations, assignment: Mapping, samples: int = 100,
                          step: float = 1e-5, seed: int = 0, dps: int = 40, box: float = 1.0) -> float:
    """Max |finite-difference d e^i - prediction from the structure equations| over random points."""
    lib = _mp(dps)
    consts = _constants(g, assignment, lib)
    params = {k: numeric_value(v, lib) for k, v in assignment.items()}
    rng = random.Random(seed)
    h = lib.mpf(step)
    n = model.dim
    worst = lib.mpf(0)
    for _ in range(samples):
        x = [lib.mpf(rng.uniform(-box, box)) for _ in range(n)]
        C = model.coframe(x, params, lib)
        deriv = []  # deriv[mu][i][nu] = d_mu C[i][nu]
        for mu in range(n):
            xp = list(x)
            xm = list(x)
            xp[mu] += h
            xm[mu] -= h
            Cp, Cm = model.coframe(xp, params, lib), model.coframe(xm, params, lib)
            deriv.append([[(Cp[i][nu] - Cm[i][nu]) / (2 * h) for nu in range(n)] for i in range(n)])
        for i in range(n):
            for mu in range(n):
                for nu in range(mu + 1, n):
                    fd = deriv[mu][i][nu] - deriv[nu][i][mu]
                    pred = 0
                    for (j, k), c in consts[i].items():
                        pred += c * (C[j - 1][mu] * C[k - 1][nu] - C[j - 1][nu] * C[k - 1][mu])
                    worst = max(worst, abs(fd - pred))
    return float(worst)


def associativity_defect(model: GroupModel, assignment: Mapping, samples: int = 20, seed: int = 0) -> float:
    import math
    rng = random.Random(seed)
    import mpmath
    p = {k: float(numeric_value(v, mpmath.mp)) for k, v in assignment.items()}
    worst = 0.0
    for _ in range(samples):
        x, y, z = ([rng.uniform(-1, 1) for _ in range(model.dim)] for _ in range(3))
        lhs = model.product(model.product(x, y, p, math), z, p, math)
        rhs = model.product(x, model.product(y, z, p, math), p, math)
        worst = max(worst, max(abs(a - b) for a, b in zip(lhs, rhs)))
        for a, b in zip(model.product(list(model.identity), x, p, math), x):
            worst = max(worst, abs(a - b))
    return worst


def left_invariance_defect(model: GroupModel, assignment: Mapping, samples: int = 10, seed: int = 0,
                           dps: int = 30) -> float:
    """Max |C(g x) D(L_g)(x) - C(x)|, with the Jacobian of L_g by central differences."""
    lib = _mp(dps)
    params = {k: numeric_value(v, lib) for k, v in assignment.items()}
    rng = random.Random(seed)
    n = model.dim
    h = lib.mpf(10) ** (-(dps // 3))
    worst = lib.mpf(0)
    for _ in range(samples):
        g = [lib.mpf(rng.uniform(-1, 1)) for _ in range(n)]
        x = [lib.mpf(rng.uniform(-1, 1)) for _ in range(n)]
        jac = [[0] * n for _ in range(n)]  # jac[a][mu] = d (g x)_a / d x_mu
        for mu in range(n):
            xp, xm = list(x), list(x)
            xp[mu] += h
            xm[mu] -= h
            fp, fm = model.product(g, xp, params, lib), model.product(g, xm, params, lib)
            for a in range(n):
                jac[a][mu] = (fp[a] - fm[a]) / (2 * h)
        Cg = model.coframe(model.product(g, x, params, lib), params, lib)
        Cx = model.coframe(x, params, lib)
        for i in range(n):
            for mu in range(n):
                val = sum(Cg[i][a] * jac[a][mu] for a in range(n))
                worst = max(worst, abs(val - Cx[i][mu]))
    return float(worst)


# entries ---------------------------------------------------------------------------

def _pair(g: StructureEquations, blocks: int) -> tuple[ComplexStructure, ComplexStructure]:
    i = CScalar.i(g.field)
    e = g.coframe
    rest = [e(k) + e(k + 1) * i for k in range(3, g.dim, 2)]
    return (ComplexStructure(g, [e(1) + e(2) * i] + rest),
            ComplexStructure(g, [e(1) - e(2) * i] + rest))


def _solvable_family(n: int) -> StructureEquations:
    half = Fraction(1, 2)
    from .scalar import field_for
    K = field_for(("a", "b"))
    a, b = K.param("a"), K.param("b")
    d = {1: {(1, 2): a}, 3: {(2, 3): a * half}, 4: {(2, 4): a * half}}
    for k in range(1, n + 1):
        d[2 * k + 3] = {(2, 2 * k + 4): b}
        d[2 * k + 4] = {(2, 2 * k + 3): -b}
    return StructureEquations.from_dict(4 + 2 * n, ("a", "b"), d)


def _s_ab() -> CatalogEntry:
    g = _solvable_family(1)
    Jp, Jm = _pair(g, 1)
    return CatalogEntry("s_ab", g, Jp, Jm, HermitianMetric.identity(g), {"a": Fraction(1)},
                        GroupRecipe(DEFAULT_LATTICE, 4, 1),
                        GroupModel(6, _inoue_product(1), _inoue_coframe(1)),
                        ("intended values a = 1, b = pi/2; b stays symbolic",
                         "lattice matrix: companion of x^3 - x - 1 (a choice validated by the lattice check)"))


def _family(n: int) -> CatalogEntry:
    if n < 1:
        raise ValueError("family_n needs n >= 1")
    g = _solvable_family(n)
    Jp, Jm = _pair(g, n)
    return CatalogEntry(f"family_{n}", g, Jp, Jm, HermitianMetric.identity(g), {"a": Fraction(1)},
                        GroupRecipe(DEFAULT_LATTICE, 4, n),
                        GroupModel(4 + 2 * n, _inoue_product(n), _inoue_coframe(n)),
                        (f"torus T^{2 * n} bundle over the Inoue surface; intended b = pi/2",))


def _inoue4() -> CatalogEntry:
    half = Fraction(1, 2)
    g = StructureEquations.from_dict(4, (), {1: {(1, 2): 1}, 3: {(2, 3): half}, 4: {(2, 4): half}})
    Jp, Jm = _pair(g, 0)
    return CatalogEntry("inoue4", g, Jp, Jm, HermitianMetric.identity(g), {},
                        GroupRecipe(DEFAULT_LATTICE, None, 1),
                        GroupModel(4, _inoue_product(0), _inoue_coframe(0)),
                        ("Inoue surface of type S0 as a solvmanifold",))


def _rot3() -> CatalogEntry:
    from .scalar import field_for
    K = field_for(("b2",))
    b2 = K.param("b2")
    g = StructureEquations.from_dict(3, ("b2",), {2: {(1, 3): b2}, 3: {(1, 2): -b2}})
    return CatalogEntry("rot3", g, None, None, HermitianMetric.identity(g), {}, None,
                        GroupModel(3, _rot_product, _inoue_coframe(1, include_u=False, bname="b2")),
                        ("indices 1, 2, 3 stand for e2, e5, e6 of s_ab", "b2 stands for 2*pi"))


def _l6() -> CatalogEntry:
    half = Fraction(1, 2)
    d = {1: {(1, 2): 1}}
    for k in range(3, 7):
        d[k] = {(2, k): half}
    g = StructureEquations.from_dict(6, (), d, basis="f")
    Jp, Jm = _pair(g, 2)
    return CatalogEntry("l6", g, Jp, Jm, HermitianMetric.identity(g), {}, None,
                        GroupModel(6, _l6_product, _l6_coframe))


_BUILTIN = {"s_ab": _s_ab, "inoue4": _inoue4, "rot3": _rot3, "l6": _l6}


def entry_names() -> list[str]:
    return ["s_ab", "inoue4", "rot3", "l6", "family_n"]


def get_entry(name: str) -> CatalogEntry:
    if name in _BUILTIN:
        return _BUILTIN[name]()
    if name.startswith("family_"):
        tail = name[len("family_"):]
        if tail.isdigit():
            return _family(int(tail))
    raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(entry_names())} (family_<n>)")
