"""Definition files: a line-oriented text format for catalog entries.

Grammar (``#`` starts a comment; keys may appear in any order except that
``dim``, ``params`` and ``basis`` are read first)::

    name = s_ab
    dim = 6
    params = a, b
    basis = e                      # optional, default e
    d e1 = a * e1^e2               # j < k in every monomial; missing lines mean d = 0
    J+ = e1 + i*e2, e3 + i*e4, e5 + i*e6
    J- = e1 - i*e2, e3 + i*e4, e5 + i*e6
    g = identity                   # or rows: 1, 0; 0, 1
    point = a=1                    # parameter values for the geometric checks
    lattice = 0 0 1; 1 0 1; 0 1 0  # integer matrix of the lattice recipe
    rotation = 4                   # 2, 3, 4, 6 or none
    blocks = 1
    note = free text               # kept as an annotation

Scalars are rational functions of the parameters; ``i`` is the imaginary unit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exterior import KForm, StructureEquations, wedge
from .scalar import CScalar, Scalar, ScalarField, field_for

__all__ = ["ParseError", "parse_scalar", "parse_form", "parse_definition", "format_definition",
           "format_scalar", "format_form"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else (f"col {col}: " if col else "")
        super().__init__(where + message)


_TOKENS = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, offset: int) -> list[_Tok]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if not m or m.end() == pos:
            col = pos + offset + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind) + offset + 1))
        pos = m.end()
    out.append(_Tok("end", "", len(text) + offset + 1))
    return out


class _Parser:
    """Recursive descent; values are CScalar or KForm (CScalar coefficients)."""

    def __init__(self, text: str, field: ScalarField, dim: int | None, basis: str, line: int = 0, offset: int = 0):
        self.toks = _tokenize(text, line, offset)
        self.pos = 0
        self.field = field
        self.dim = dim
        self.basis = basis
        self.line = line
        self._basis_re = re.compile(rf"^{re.escape(basis)}(\d+)$")

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok.col)

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def accept(self, text: str) -> bool:
        if self.peek().kind == "op" and self.peek().text == text:
            self.pos += 1
            return True
        return False

    def expect_end(self) -> None:
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")

    # expr := term (('+'|'-') term)*
    def expr(self):
        val = self.term()
        while True:
            if self.accept("+"):
                val = self._add(val, self.term(), 1)
            elif self.accept("-"):
                val = self._add(val, self.term(), -1)
            else:
                return val

    def term(self):
        val = self.unary()
        while True:
            tok = self.peek()
            if self.accept("*"):
                val = self._mul(val, self.unary(), tok)
            elif self.accept("/"):
                rhs = self.unary()
                if isinstance(rhs, KForm):
                    raise self.error("cannot divide by a form", tok)
                if rhs.is_zero():
                    raise self.error("division by zero", tok)
                val = val * rhs.inverse() if isinstance(val, KForm) else val / rhs
            else:
                return val

    def unary(self):
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        val = self.atom()
        while self.peek().kind == "op" and self.peek().text == "^":
            tok = self.take()
            if isinstance(val, KForm):
                rhs = self.atom()
                if not isinstance(rhs, KForm):
                    raise self.error("wedge needs a form on both sides", tok)
                val = wedge(val, rhs)
            else:
                neg = self.accept("-")
                num = self.take()
                if num.kind != "num" or "." in num.text:
                    raise self.error("exponent must be an integer", num)
                e = int(num.text)
                if neg and val.is_zero():
                    raise self.error("zero to a negative power", tok)
                out = CScalar(self.field.one)
                for _ in range(e):
                    out = out * val
                val = out.inverse() if neg else out
        return val

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return CScalar(self.field(Fraction(tok.text)))
        if tok.kind == "name":
            m = self._basis_re.match(tok.text)
            if m and self.dim is not None:
                idx = int(m.group(1))
                if not 1 <= idx <= self.dim:
                    raise self.error(f"index {idx} out of range 1..{self.dim}", tok)
                return KForm(self.dim, 1, {(idx,): CScalar(self.field.one)}, self.field)
            if tok.text == "i":
                return CScalar.i(self.field)
            if tok.text in self.field.params:
                return CScalar(self.field.param(tok.text))
            raise self.error(f"unknown parameter {tok.text!r}", tok)
        if tok.kind == "op" and tok.text == "(":
            val = self.expr()
            if not self.accept(")"):
                raise self.error("expected ')'")
            return val
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def _add(self, x, y, sign: int):
        if isinstance(x, KForm) != isinstance(y, KForm):
            raise self.error("cannot add a scalar and a form")
        if isinstance(x, KForm):
            if x.terms and y.terms and x.degree != y.degree:
                raise self.error("cannot add forms of different degree")
            if not x.terms:
                return y if sign > 0 else -y
            if not y.terms:
                return x
        return x + y if sign > 0 else x - y

    def _mul(self, x, y, tok):
        if isinstance(x, KForm) and isinstance(y, KForm):
            raise self.error("use ^ for the wedge product", tok)
        if isinstance(y, KForm):
            return y * x
        return x * y


def _demote(c):
    if isinstance(c, CScalar) and c.is_real():
        return c.re
    return c


def parse_scalar(text: str, field: ScalarField, line: int = 0, offset: int = 0):
    """Scalar expression; returns Scalar when real, else CScalar."""
    p = _Parser(text, field, None, "\0", line, offset)
    val = p.expr()
    p.expect_end()
    return _demote(val)


def parse_form(text: str, field: ScalarField, dim: int, basis: str = "e", line: int = 0, offset: int = 0) -> KForm:
    p = _Parser(text, field, dim, basis, line, offset)
    val = p.expr()
    p.expect_end()
    if not isinstance(val, KForm):
        if val.is_zero():
            return KForm.zero(dim, 0, field)
        raise ParseError("expected a form", line, offset + 1)
    return KForm.from_accumulator(dim, val.degree, {k: _demote(c) for k, c in val.terms.items()}, field)


def _split_top(text: str, sep: str) -> list[tuple[str, int]]:
    """Split on ``sep`` outside parentheses, returning (piece, start offset)."""
    out, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:k], start))
            start = k + 1
    out.append((text[start:], start))
    return out


_IDENT = re.compile(r"^[A-Za-z_]\w*$")
_DLINE = re.compile(r"^d\s+([A-Za-z_]+)(\d+)$")
_KEYS = {"name", "dim", "params", "basis", "J+", "J-", "g", "point", "lattice", "rotation", "blocks", "note"}


def parse_definition(text: str):
    """Parse a definition file into a CatalogEntry."""
    from .catalog import CatalogEntry, GroupRecipe
    from .complexgeom import ComplexStructure, HermitianMetric
    from .groups import IntegerMatrix

    header: dict[str, tuple[str, int, int]] = {}
    body: list[tuple[str, str, int, int]] = []
    notes: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, len(line) - len(line.lstrip()) + 1)
        key, value = line.split("=", 1)
        off = len(key) + 1
        key = key.strip()
        if key == "note":
            notes.append(raw.split("=", 1)[1].strip())
            continue
        m = _DLINE.match(key)
        if not m and key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
        if key in ("name", "dim", "params", "basis"):
            if key in header:
                raise ParseError(f"duplicate key {key!r}", lineno, 1)
            header[key] = (value.strip(), lineno, off)
        else:
            body.append((key, value, lineno, off))

    if "dim" not in header:
        raise ParseError("missing 'dim'")
    dtext, dline, _ = header["dim"]
    try:
        dim = int(dtext)
    except ValueError:
        raise ParseError(f"dim must be an integer, got {dtext!r}", dline, 1) from None
    if dim < 1:
        raise ParseError("dim must be positive", dline, 1)
    params: tuple[str, ...] = ()
    if "params" in header:
        ptext, pline, _ = header["params"]
        params = tuple(p.strip() for p in ptext.split(",") if p.strip())
        for p in params:
            if not _IDENT.match(p) or p == "i":
                raise ParseError(f"bad parameter name {p!r}", pline, 1)
        if len(set(params)) != len(params):
            raise ParseError("repeated parameter", pline, 1)
    basis = header.get("basis", ("e", 0, 0))[0]
    if not re.match(r"^[A-Za-z]+$", basis) or basis == "i":
        raise ParseError(f"bad basis letter {basis!r}", header["basis"][1], 1)
    for p in params:
        if re.match(rf"^{re.escape(basis)}\d+$", p):
            raise ParseError(f"parameter {p!r} clashes with the basis names", header["params"][1], 1)
    name = header.get("name", ("unnamed", 0, 0))[0]
    field = field_for(params)

    derivs: dict[int, KForm] = {}
    plus = minus = metric_rows = None
    identity = False
    point: dict[str, Fraction] = {}
    lattice = None
    rotation: int | None = 4
    rotation_set = False
    blocks = 1
    where: dict[str, int] = {}
    for key, value, lineno, off in body:
        where[key] = lineno
        m = _DLINE.match(key)
        if m:
            if m.group(1) != basis:
                raise ParseError(f"basis letter {m.group(1)!r} does not match {basis!r}", lineno, 3)
            idx = int(m.group(2))
            if not 1 <= idx <= dim:
                raise ParseError(f"index {idx} out of range 1..{dim}", lineno, 3)
            if idx in derivs:
                raise ParseError(f"duplicate d {basis}{idx}", lineno, 1)
            form = parse_form(value, field, dim, basis, lineno, off)
            if form.terms and form.degree != 2:
                raise ParseError(f"d {basis}{idx} must be a 2-form", lineno, off + 1)
            _check_ordered(value, basis, lineno, off)
            for c in form.terms.values():
                if not isinstance(c, Scalar):
                    raise ParseError("structure constants must be real", lineno, off + 1)
            derivs[idx] = form if form.terms else KForm.zero(dim, 2, field)
        elif key in ("J+", "J-"):
            forms = []
            for piece, start in _split_top(value, ","):
                f = parse_form(piece, field, dim, basis, lineno, off + start)
                if f.terms and f.degree != 1:
                    raise ParseError("complex structure needs 1-forms", lineno, off + start + 1)
                forms.append(f)
            if key == "J+":
                plus = forms
            else:
                minus = forms
        elif key == "g":
            if value.strip() == "identity":
                identity = True
            else:
                rows = []
                for piece, start in _split_top(value, ";"):
                    rows.append([parse_scalar(x, field, lineno, off + start + s2)
                                 for x, s2 in _split_top(piece, ",")])
                if len(rows) != dim or any(len(r) != dim for r in rows):
                    raise ParseError(f"metric must be {dim}x{dim}", lineno, off + 1)
                metric_rows = rows
        elif key == "point":
            const = field_for(())
            for piece, start in _split_top(value, ","):
                if "=" not in piece:
                    raise ParseError("point entries look like a=1", lineno, off + start + 1)
                pname, pval = piece.split("=", 1)
                pname = pname.strip()
                if pname not in params:
                    raise ParseError(f"unknown parameter {pname!r}", lineno, off + start + 1)
                v = parse_scalar(pval, const, lineno, off + start + len(piece.split("=")[0]) + 1)
                if not isinstance(v, Scalar):
                    raise ParseError("point values must be real", lineno, off + start + 1)
                point[pname] = v.to_fraction()
        elif key == "lattice":
            try:
                lattice = IntegerMatrix([[int(x) for x in r.replace(",", " ").split()] for r in value.split(";")])
            except ValueError as exc:
                raise ParseError(f"bad integer matrix: {exc}", lineno, off + 1) from None
        elif key == "rotation":
            rotation_set = True
            v = value.strip()
            if v == "none":
                rotation = None
            elif v in ("2", "3", "4", "6"):
                rotation = int(v)
            else:
                raise ParseError("rotation must be one of 2, 3, 4, 6, none", lineno, off + 1)
        elif key == "blocks":
            try:
                blocks = int(value)
            except ValueError:
                raise ParseError("blocks must be an integer", lineno, off + 1) from None

    d1 = [derivs.get(i, KForm.zero(dim, 2, field)) for i in range(1, dim + 1)]
    try:
        g = StructureEquations(dim, params, d1, basis)
    except (ValueError, TypeError) as exc:
        raise ParseError(str(exc)) from None
    def build(key, fn):
        try:
            return fn()
        except ValueError as exc:
            raise ParseError(str(exc), where.get(key, 0), 1) from None

    Jp = build("J+", lambda: ComplexStructure(g, plus)) if plus is not None else None
    Jm = build("J-", lambda: ComplexStructure(g, minus)) if minus is not None else None
    metric = None
    if identity:
        metric = HermitianMetric.identity(g)
    elif metric_rows is not None:
        metric = build("g", lambda: HermitianMetric(g, metric_rows))
    group = None
    if lattice is not None:
        group = GroupRecipe(lattice, rotation, blocks)
    elif rotation_set:
        raise ParseError("'rotation' needs a 'lattice' line")
    return CatalogEntry(name, g, Jp, Jm, metric, point, group, annotations=tuple(notes))


def _check_ordered(value: str, basis: str, lineno: int, off: int) -> None:
    for m in re.finditer(rf"{re.escape(basis)}(\d+)\s*\^\s*{re.escape(basis)}(\d+)", value):
        if int(m.group(1)) >= int(m.group(2)):
            raise ParseError(f"monomial {m.group(0)!r} needs j < k", lineno, off + m.start() + 1)


def format_scalar(c) -> str:
    s = str(c)
    return s if re.match(r"^-?[\w/*]+$", s) else f"({s})"


def format_form(alpha: KForm, basis: str) -> str:
    """Parseable text, e.g. ``e1 - i * e2`` or ``a/2 * e2^e3``."""
    if not alpha.terms:
        return "0"
    out = ""
    for key, c in alpha.sorted_terms():
        mono = "^".join(f"{basis}{i}" for i in key)
        text = str(c)
        neg = text.startswith("-") and " " not in text
        if neg:
            c = -c
        text = format_scalar(c)
        coef = "" if text == "1" else text + " * "
        if not out:
            out = ("-" if neg else "") + coef + mono
        else:
            out += (" - " if neg else " + ") + coef + mono
    return out


def format_definition(entry) -> str:
    g = entry.algebra
    out = [f"name = {entry.name}", f"dim = {g.dim}"]
    if g.params:
        out.append("params = " + ", ".join(g.params))
    if g.basis != "e":
        out.append(f"basis = {g.basis}")
    for i, form in enumerate(g.d1, 1):
        if form.terms:
            out.append(f"d {g.basis}{i} = {format_form(form, g.basis)}")
    for label, J in (("J+", entry.plus), ("J-", entry.minus)):
        if J is not None:
            out.append(f"{label} = " + ", ".join(format_form(w, g.basis) for w in J.coframe10))
    if entry.metric is not None:
        gram = entry.metric.gram
        if all((c.is_one() if r == k else c.is_zero()) for r, row in enumerate(gram) for k, c in enumerate(row)):
            out.append("g = identity")
        else:
            out.append("g = " + "; ".join(", ".join(format_scalar(c) for c in row) for row in gram))
    if entry.point:
        out.append("point = " + ", ".join(f"{k}={v}" for k, v in sorted(entry.point.items())))
    if entry.group is not None:
        gr = entry.group
        out.append("lattice = " + "; ".join(" ".join(str(x) for x in r) for r in gr.lattice.rows))
        out.append(f"rotation = {gr.rotation if gr.rotation is not None else 'none'}")
        if gr.blocks != 1:
            out.append(f"blocks = {gr.blocks}")
    for note in entry.annotations:
        out.append(f"note = {note}")
    return "\n".join(out) + "\n"
