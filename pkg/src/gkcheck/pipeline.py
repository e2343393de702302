"""Verification pipeline: run the checks in dependency order and collect a report."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from . import linalg
from .catalog import CatalogEntry
from .cohomology import CE_CAVEAT, betti_numbers, build_complex, is_exact
from .complexgeom import HermitianPair, gk_check, is_integrable, lee_form, skt_check
from .curvature import levi_civita, ricci
from .generalized import GUALTIERI_PROVENANCE, definiteness, gualtieri_pair, involutivity_check
from .groups import abelianization, derived_subgroup_rank, lattice_matrix_check

__all__ = ["CHECKS", "INFORMATIONAL", "Report", "verify_pipeline", "emit_report", "REPORT_FIELDS"]

CHECKS = ("jacobi", "unimodular", "derived", "integrability", "compatibility", "gk", "skt", "lee", "ricci",
          "cohomology", "generalized", "group")
# reported but never failing: they describe the algebra rather than test a claim
INFORMATIONAL = frozenset({"unimodular", "derived", "lee", "ricci", "cohomology"})

REPORT_FIELDS = ("entry", "point", "checks", "jacobi", "unimodular", "derived_series", "solvable_steps",
                 "integrable_plus", "integrable_minus", "compatible", "gk_eq3", "gk_eq2", "trivial", "skt",
                 "torsion_class", "H", "betti", "ricci", "lee_form", "lck", "generalized", "b1_group",
                 "derived_rank", "verdicts", "errors", "annotations", "certificates")


@dataclass
class Report:
    entry: str | None = None
    point: dict | None = None
    checks: list | None = None
    jacobi: bool | None = None
    unimodular: bool | None = None
    derived_series: list | None = None
    solvable_steps: int | None = None
    integrable_plus: bool | None = None
    integrable_minus: bool | None = None
    compatible: bool | None = None
    gk_eq3: bool | None = None
    gk_eq2: bool | None = None
    trivial: bool | None = None
    skt: bool | None = None
    torsion_class: str | None = None
    H: str | None = None
    betti: list | None = None
    ricci: list | None = None
    lee_form: str | None = None
    lck: bool | None = None
    generalized: dict | None = None
    b1_group: int | None = None
    derived_rank: int | None = None
    verdicts: dict | None = None
    errors: dict | None = None
    annotations: list | None = None
    certificates: dict | None = None

    @property
    def passed(self) -> bool:
        v = self.verdicts or {}
        return all(ok for name, ok in v.items() if name not in INFORMATIONAL) and not self.errors

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_FIELDS}


def _applicable(entry: CatalogEntry) -> list[str]:
    out = ["jacobi", "unimodular", "derived"]
    has_pair = entry.plus is not None and entry.minus is not None and entry.metric is not None
    if entry.plus is not None or entry.minus is not None:
        out.append("integrability")
    if has_pair:
        out += ["compatibility", "gk", "skt"]
        if entry.algebra.dim >= 6:
            out.append("lee")
    if entry.metric is not None:
        out.append("ricci")
    out.append("cohomology")
    if has_pair:
        out.append("generalized")
    if entry.group is not None:
        out.append("group")
    return out


class _Missing(Exception):
    pass


def verify_pipeline(entry: CatalogEntry, checks: Iterable[str] | None = None, generic: bool = False) -> Report:
    """Structural checks run on the generic algebra; geometric ones at ``entry.point`` unless ``generic``."""
    requested = list(_applicable(entry)) if checks is None else list(checks)
    for c in requested:
        if c not in CHECKS:
            raise ValueError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")
    want = [c for c in CHECKS if c in requested]
    r = Report(entry=entry.name, checks=want, verdicts={}, errors={}, certificates={})
    geo = entry if generic else entry.at_point()
    r.point = {} if generic else {k: str(v) for k, v in sorted(entry.point.items())}
    g = entry.algebra
    gp = geo.algebra
    basis = g.basis
    notes = list(entry.annotations)
    state: dict = {}

    def need_pair():
        if "pairs" in state:
            return state["pairs"]
        if geo.plus is None or geo.minus is None or geo.metric is None:
            raise _Missing("needs J+, J- and a metric")
        state["pairs"] = (HermitianPair(geo.plus, geo.metric), HermitianPair(geo.minus, geo.metric))
        return state["pairs"]

    def need_gk():
        if "gk" not in state:
            state["gk"] = gk_check(*need_pair())
        return state["gk"]

    def run(name, fn):
        if name not in want:
            return
        try:
            r.verdicts[name] = bool(fn())
        except _Missing as exc:
            r.errors[name] = f"missing component: {exc}"
            r.verdicts[name] = False
        except (ValueError, ArithmeticError) as exc:
            r.errors[name] = f"{type(exc).__name__}: {exc}"
            r.verdicts[name] = False

    def c_jacobi():
        res = g.jacobi_check()
        r.jacobi = res.ok
        if not res.ok:
            r.certificates["jacobi"] = [f"d(d {basis}{res.index}) = {res.witness.format(basis)}"]
        return res.ok

    def c_unimodular():
        r.unimodular = g.unimodularity_check()
        if not r.unimodular:
            r.certificates["unimodular"] = [f"tr ad({basis}_{k}) = {t}" for k, t in enumerate(g.ad_traces(), 1)
                                            if not t.is_zero()]
            notes.append("not unimodular: no lattice, hence no compact quotient by a discrete subgroup")
        return True

    def c_derived():
        r.derived_series = g.derived_series()
        r.solvable_steps = g.solvable_steps()
        nil = g.nilradical()
        if nil is not None:
            span = ", ".join(_vector_text(v, basis) for v in nil)
            r.certificates["nilradical"] = [f"span({span})"]
            if g.is_abelian_subspace(nil) and len(nil) == g.dim - 1 and g.unimodularity_check():
                notes.append(f"nilradical span({span}) is abelian of codimension 1: a compact quotient "
                             f"fibres over the circle with torus fibre (annotation, topology not verified)")
        return r.solvable_steps is not None

    def c_integrability():
        if geo.plus is None and geo.minus is None:
            raise _Missing("needs a complex structure")
        ok = True
        for label, J in (("plus", geo.plus), ("minus", geo.minus)):
            if J is None:
                continue
            cert = is_integrable(J)
            setattr(r, f"integrable_{label}", cert.integrable)
            r.certificates[f"integrability_{label}"] = cert.lines()
            ok = ok and cert.integrable
        return ok

    def c_compat():
        try:
            need_pair()
        except ValueError as exc:
            r.compatible = False
            r.errors["compatibility"] = str(exc)
            return False
        r.compatible = True
        return True

    def c_gk():
        rep = need_gk()
        r.gk_eq3 = rep.eq3a and rep.eq3b and rep.eq3c
        r.gk_eq2 = rep.eq2
        r.trivial = rep.trivial
        r.H = rep.H.format(basis)
        r.certificates["gk"] = [f"J+ dF+ = {rep.JdF_plus.format(basis)}",
                                f"J- dF- = {rep.JdF_minus.format(basis)}",
                                f"H = d^c+ F+ = {rep.H.format(basis)}",
                                f"dH = {gp.d(rep.H).format(basis)}"]
        return rep.holds

    def c_skt():
        p, m = need_pair()
        r.skt = skt_check(p) and skt_check(m)
        return r.skt

    def c_lee():
        p, m = need_pair()
        if gp.dim < 6:
            raise _Missing("Lee form needs dimension >= 6")
        lf = lee_form(p)
        lm = lee_form(m)
        if lf is None or lm is None:
            r.lee_form = None
            r.lck = False
            r.certificates["lee"] = ["dF+ is not of the form theta ^ F+"
                                     if lf is None else "dF- is not of the form theta ^ F-"]
        else:
            r.lee_form = lf.theta.format(basis)
            r.lck = lf.closed and lm.closed and lf.theta == lm.theta
            r.certificates["lee"] = [f"dF+ = ({lf.theta.format(basis)}) ^ F+",
                                     f"d theta = {gp.d(lf.theta).format(basis)}"]
        return True

    def c_ricci():
        if geo.metric is None:
            raise _Missing("needs a metric")
        conn = levi_civita(gp, geo.metric)
        ric = ricci(conn)
        r.ricci = [[str(c) for c in row] for row in ric]
        if not geo.metric.is_parameter_free():
            notes.append("metric assumed positive-definite")
        return True

    def c_cohomology():
        cx = build_complex(g)
        r.betti = betti_numbers(cx)
        notes.append(CE_CAVEAT)
        if "gk" in want and r.H is not None:
            gk = need_gk()
            ex = is_exact(build_complex(gp), gk.H)
            r.torsion_class = "exact" if ex.exact else "non-exact"
            if ex.exact:
                r.certificates["torsion"] = [f"H = d({ex.primitive.format(basis)})"]
            else:
                r.certificates["torsion"] = [f"functional {ex.certificate.format(basis)} vanishes on exact "
                                             f"3-forms and not on H"]
            notes.append("H non-exact: twisted" if not ex.exact else "H exact: untwisted up to a B-field")
        return True

    def c_generalized():
        p, m = need_pair()
        rep = need_gk()
        j1, j2 = gualtieri_pair(p, m)
        inv1 = involutivity_check(j1, rep.H)
        inv2 = involutivity_check(j2, rep.H)
        assignment = {k: 1.0 for k in gp.params}
        d = definiteness(j1, j2, assignment)
        r.generalized = {
            "commute": linalg.equal(j1 * j2, j2 * j1),
            "square_minus_id": True,
            "orthogonal": True,
            "involutive_1": inv1,
            "involutive_2": inv2,
            "definite": d.definite,
            "definite_sign": {1: "positive", -1: "negative", 0: "indefinite"}[d.sign],
            "definite_exact": d.exact,
        }
        notes.append(GUALTIERI_PROVENANCE)
        return inv1 and inv2 and d.definite and r.generalized["commute"]

    def c_group():
        rec = entry.group
        if rec is None:
            raise _Missing("needs a lattice recipe")
        lr = lattice_matrix_check(rec.lattice)
        r.certificates["lattice"] = lr.lines()
        if not lr.passes:
            return False
        pres = rec.presentation()
        ab = abelianization(pres)
        r.b1_group = ab.free_rank
        r.derived_rank = derived_subgroup_rank(pres)
        r.certificates["group"] = [f"abelianization = {ab}",
                                   f"rank [G,G] = {r.derived_rank}",
                                   f"rank G = {ab.free_rank} + {r.derived_rank} = {len(pres.generators)}"]
        return ab.free_rank + r.derived_rank == len(pres.generators)

    for name, fn in (("jacobi", c_jacobi), ("unimodular", c_unimodular), ("derived", c_derived),
                     ("integrability", c_integrability), ("compatibility", c_compat), ("gk", c_gk),
                     ("skt", c_skt), ("lee", c_lee), ("ricci", c_ricci), ("cohomology", c_cohomology),
                     ("generalized", c_generalized), ("group", c_group)):
        run(name, fn)
    r.annotations = notes
    return r


def _vector_text(v, basis: str) -> str:
    parts = []
    for k, c in enumerate(v.components, 1):
        if c.is_zero():
            continue
        parts.append(f"{basis}{k}" if c.is_one() else f"({c}) {basis}{k}")
    return " + ".join(parts) or "0"


def emit_report(r: Report, fmt: str = "human") -> str:
    if fmt == "machine":
        return json.dumps(r.to_dict(), indent=2, ensure_ascii=True) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [f"entry: {r.entry}"]
    if r.point:
        lines.append("point: " + ", ".join(f"{k}={v}" for k, v in r.point.items()))
    width = max((len(c) for c in CHECKS), default=10)
    for name, ok in (r.verdicts or {}).items():
        mark = "info" if name in INFORMATIONAL else ("pass" if ok else "FAIL")
        if name in INFORMATIONAL and not ok:
            mark = "FAIL"
        lines.append(f"  {name:<{width}}  {mark}  {_summary(r, name)}")
    for name, err in (r.errors or {}).items():
        lines.append(f"  error[{name}]: {err}")
    for name, cert in (r.certificates or {}).items():
        lines.append(f"certificate {name}:")
        lines += [f"    {c}" for c in cert]
    for a in r.annotations or []:
        lines.append(f"note: {a}")
    lines.append("result: " + ("pass" if r.passed else "FAIL"))
    return "\n".join(lines) + "\n"


def _summary(r: Report, name: str) -> str:
    if name == "jacobi":
        return f"d^2 = 0: {r.jacobi}"
    if name == "unimodular":
        return f"unimodular = {r.unimodular}"
    if name == "derived":
        return f"derived series dims {r.derived_series}, solvable steps {r.solvable_steps}"
    if name == "integrability":
        return f"J+ {r.integrable_plus}, J- {r.integrable_minus}"
    if name == "compatibility":
        return f"g Hermitian for J+ and J-: {r.compatible}"
    if name == "gk":
        return f"eq3 {r.gk_eq3}, trivial {r.trivial}, H = {r.H}"
    if name == "skt":
        return f"SKT {r.skt}"
    if name == "lee":
        return f"Lee form {r.lee_form}, lck {r.lck}"
    if name == "ricci":
        if r.ricci is None:
            return ""
        diag = all(r.ricci[i][j] == "0" for i in range(len(r.ricci)) for j in range(len(r.ricci)) if i != j)
        if diag:
            return "Ric = diag(" + ", ".join(r.ricci[i][i] for i in range(len(r.ricci))) + ")"
        return "Ric not diagonal"
    if name == "cohomology":
        return f"betti {r.betti}" + (f", H {r.torsion_class}" if r.torsion_class else "")
    if name == "generalized":
        gd = r.generalized or {}
        return (f"commute {gd.get('commute')}, involutive {gd.get('involutive_1')}/{gd.get('involutive_2')}, "
                f"definite {gd.get('definite_sign')}")
    if name == "group":
        return f"b1 = {r.b1_group}, rank [G,G] = {r.derived_rank}"
    return ""
