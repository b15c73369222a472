"""Line-oriented text format for whole problems.

::

    schema R(x:3, y:2)
    mode utvpi
    cdc: x2 = ICT -> y1 + y2 <= 5
    view V1: x2 != ICT & x3 = Manager
    view V2: y2 < 4
    uind: R[x1] <= R[x2]
    fd: {3} -> {4}
    domain: x1 in {a, b}

Comments start with ``#``.  ``schema`` and ``mode`` may appear anywhere;
they are read before the other lines.  The parser returns a fully
desugared :class:`~hdec.model.Problem`, and :func:`format_problem`
prints one back so that parsing the printout gives the same problem.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from hdec import logic
from hdec.cformula import Utvpi, UtvpiConj, normalize_comparison
from hdec.desugar import desugar_domain_constraint, split_conjunctive_cdc, split_disjunctive_view
from hdec.errors import (
    ArityError,
    CoefficientOutOfRange,
    ModeViolation,
    ParseError,
    UnknownVariable,
    ValidationError,
)
from hdec.model import (
    BUTVPI,
    FRESH_PREFIX,
    UTVPI,
    Cdc,
    EqAtom,
    Fd,
    Problem,
    Schema,
    ViewDef,
    make_uind,
)

INT_MIN, INT_MAX = -(2**63), 2**63 - 1

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<str>"(?:\\.|[^"\\])*")
  | (?P<op>->|<=|>=|!=|[<>=&|!()+\-*{},\[\]:])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)
_VAR = re.compile(r"([xy])(\d+)\Z")
_KEYWORDS = {"top", "in"}


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    col: int


def tokenize(line: str, lineno: int) -> list[Tok]:
    out, pos = [], 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind == "str":
                text = re.sub(r"\\(.)", r"\1", text[1:-1])
            out.append(Tok(kind, text, pos + 1))
        pos = m.end()
    out.append(Tok("eof", "", len(line) + 1))
    return out


@dataclass(frozen=True)
class _Cmp:
    """A parsed y-comparison before the mode decides its shape."""

    atoms: tuple[Utvpi, ...]
    negated: bool = False  # from '!='


class _Parser:
    def __init__(self, toks: list[Tok], lineno: int, schema: Optional[Schema], mode: str):
        self.toks, self.i, self.lineno = toks, 0, lineno
        self.schema, self.mode = schema, mode

    # token helpers
    @property
    def cur(self) -> Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Tok] = None) -> ParseError:
        tok = tok or self.cur
        return ParseError(msg, self.lineno, tok.col)

    def at(self, *texts: str) -> bool:
        return self.cur.kind in ("op", "ident") and self.cur.text in texts

    def eat(self, text: str) -> Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}, found {self.cur.text or 'end of line'!r}")
        tok = self.cur
        self.i += 1
        return tok

    def ident(self) -> str:
        if self.cur.kind != "ident":
            raise self.error(f"expected a name, found {self.cur.text or 'end of line'!r}")
        tok = self.cur
        self.i += 1
        return tok.text

    def _check_range(self, v: int, tok: Tok) -> int:
        if not INT_MIN <= v <= INT_MAX:
            raise self.error("integer literal outside the 64-bit range", tok)
        return v

    def end(self) -> None:
        if self.cur.kind != "eof":
            raise self.error(f"unexpected {self.cur.text!r}")

    def need_schema(self) -> Schema:
        if self.schema is None:
            raise self.error("a 'schema' declaration is required")
        return self.schema

    def var(self, tok: Tok) -> tuple[str, int]:
        m = _VAR.match(tok.text)
        if not m:
            raise self.error(f"expected a variable, found {tok.text!r}", tok)
        side, idx = m.group(1), int(m.group(2))
        schema = self.need_schema()
        limit = schema.k if side == "x" else schema.m
        if not 1 <= idx <= limit:
            raise UnknownVariable(
                f"line {self.lineno}, column {tok.col}: {tok.text} is not a variable of "
                f"{schema.name}(x:{schema.k}, y:{schema.m})"
            )
        return side, idx

    # expressions
    def expr(self):
        args = [self.conj()]
        while self.at("|"):
            self.i += 1
            args.append(self.conj())
        return logic.disj(*args)

    def conj(self):
        args = [self.unary()]
        while self.at("&"):
            self.i += 1
            args.append(self.unary())
        return logic.conj(*args) if len(args) > 1 else args[0]

    def unary(self):
        if self.at("!"):
            self.i += 1
            return logic.Not(self.unary())
        if self.at("("):
            self.i += 1
            e = self.expr()
            self.eat(")")
            return e
        if self.at("top"):
            self.i += 1
            return logic.TOP
        if self.cur.kind == "ident" and _VAR.match(self.cur.text) and self.cur.text[0] == "x":
            return self.x_atom()
        return self.comparison()

    def x_atom(self) -> EqAtom:
        _, idx = self.var(self.cur)
        self.i += 1
        if not self.at("=", "!="):
            raise self.error("expected '=' or '!=' after a non-interpreted variable")
        equal = self.cur.text == "="
        self.i += 1
        return EqAtom(idx, self.constant(), equal)

    def constant(self) -> str:
        tok = self.cur
        if tok.kind == "str":
            value = tok.text
        elif tok.kind == "ident" and tok.text not in _KEYWORDS and not _VAR.match(tok.text):
            value = tok.text
        else:
            raise self.error("expected a constant (a name or a double-quoted string)")
        if value.startswith(FRESH_PREFIX):
            raise self.error(f"constants starting with {FRESH_PREFIX} are reserved")
        self.i += 1
        return value

    def linear(self) -> tuple[dict[int, int], int, Tok]:
        """``sum of [+-][int*]y<j> | [+-]int`` as (coefficients, constant)."""
        start = self.cur
        coeffs: dict[int, int] = {}
        const = 0
        sign = 1
        if self.at("-", "+"):
            sign = -1 if self.cur.text == "-" else 1
            self.i += 1
        while True:
            tok = self.cur
            if tok.kind == "int":
                self.i += 1
                n = self._check_range(sign * int(tok.text), tok)
                if self.at("*"):
                    self.i += 1
                    j = self.y_var()
                    coeffs[j] = coeffs.get(j, 0) + n
                else:
                    const += n
            else:
                j = self.y_var()
                coeffs[j] = coeffs.get(j, 0) + sign
            if not self.at("+", "-"):
                return coeffs, const, start
            sign = -1 if self.cur.text == "-" else 1
            self.i += 1

    def y_var(self) -> int:
        tok = self.cur
        if tok.kind != "ident" or not _VAR.match(tok.text):
            raise self.error(f"expected an interpreted variable, found {tok.text or 'end of line'!r}")
        side, idx = self.var(tok)
        if side != "y":
            raise self.error(f"{tok.text} is non-interpreted and cannot appear in arithmetic", tok)
        self.i += 1
        return idx

    def comparison(self) -> _Cmp:
        lhs, lc, start = self.linear()
        if not self.at("<=", ">=", "<", ">", "=", "!="):
            raise self.error("expected a comparison operator")
        op_tok = self.cur
        self.i += 1
        rhs, rc, _ = self.linear()
        coeffs = dict(lhs)
        for j, c in rhs.items():
            coeffs[j] = coeffs.get(j, 0) - c
        coeffs = {j: c for j, c in sorted(coeffs.items()) if c}
        d = rc - lc
        if len(coeffs) > 2 or any(abs(c) > 1 for c in coeffs.values()):
            raise CoefficientOutOfRange(
                f"line {self.lineno}, column {start.col}: not a UTVPI (at most two "
                "variables with coefficients in {-1, 0, 1})"
            )
        terms = list(coeffs.items()) + [(None, 0)] * (2 - len(coeffs))
        (i, a), (j, b) = terms
        if op_tok.text == "!=":
            if self.mode != BUTVPI:
                raise ModeViolation(
                    f"line {self.lineno}, column {op_tok.col}: '!=' between integers needs 'mode butvpi'"
                )
            return _Cmp(tuple(normalize_comparison("=", a, i, b, j, d)), negated=True)
        return _Cmp(tuple(normalize_comparison(op_tok.text, a, i, b, j, d)))


# Classifying parsed trees ------------------------------------------------------


def _side(e) -> str:
    """'x', 'y', 'top' or 'mixed' according to the leaves of ``e``."""
    kinds = {"x" if isinstance(a, EqAtom) else "y" for a in logic.leaves(e)}
    if not kinds:
        return "top"
    return kinds.pop() if len(kinds) == 1 else "mixed"


def _cformula(e, mode: str, lineno: int):
    if mode == UTVPI:
        parts = e.args if isinstance(e, logic.And) else (e,)
        atoms: list[Utvpi] = []
        for p in parts:
            if not isinstance(p, _Cmp):
                raise ModeViolation(
                    f"line {lineno}: disjunction or negation of comparisons needs 'mode butvpi'"
                )
            atoms.extend(p.atoms)
        return atoms[0] if len(atoms) == 1 else UtvpiConj(tuple(atoms))

    def leaf(c: _Cmp):
        inner = c.atoms[0] if len(c.atoms) == 1 else logic.And(c.atoms)
        return logic.Not(inner) if c.negated else inner

    return _normalize(logic.map_leaves(e, leaf))


def _normalize(e):
    """Flatten nested conjunctions and disjunctions."""
    if isinstance(e, logic.Not):
        return logic.Not(_normalize(e.arg))
    if isinstance(e, logic.And):
        return logic.conj(*(_normalize(a) for a in e.args))
    if isinstance(e, logic.Or):
        return logic.disj(*(_normalize(a) for a in e.args))
    return e


def _flatten(e, node):
    return list(e.args) if isinstance(e, node) else [e]


class _Builder:
    def __init__(self, schema: Schema, mode: str):
        self.schema, self.mode = schema, mode
        self.cdcs: list[Cdc] = []
        self.views: list[ViewDef] = []
        self.uinds = []
        self.fds: list[Fd] = []
        self.notes: list[str] = []

    def parser(self, toks, lineno) -> _Parser:
        return _Parser(toks, lineno, self.schema, self.mode)

    def cdc(self, p: _Parser) -> None:
        ante = p.expr()
        arrow = p.eat("->")
        cons = p.expr()
        p.end()
        if _side(ante) not in ("x", "top"):
            raise p.error("the antecedent may only test non-interpreted variables", p.toks[0])
        if _side(cons) != "y":
            raise p.error("the consequent must be a comparison of interpreted variables", arrow)
        c = Cdc(ante, _cformula(cons, self.mode, p.lineno))
        self.cdcs.extend(split_conjunctive_cdc(c, self.mode))

    def view(self, p: _Parser) -> None:
        name_tok = p.cur
        name = p.ident()
        p.eat(":")
        body = p.expr()
        p.end()
        side = _side(body)
        if side in ("x", "top"):
            v = ViewDef(name, body, None)
        elif side == "y":
            v = ViewDef(name, logic.TOP, _cformula(body, self.mode, p.lineno))
        else:
            v = self._mixed_view(name, body, p)
        for w in split_disjunctive_view(v):
            if any(u.name == w.name for u in self.views):
                raise ValidationError(f"line {p.lineno}, column {name_tok.col}: duplicate view name {w.name}")
            self.views.append(w)

    def _mixed_view(self, name: str, body, p: _Parser) -> ViewDef:
        for node, disjunctive in ((logic.And, False), (logic.Or, True)):
            if not isinstance(body, node):
                continue
            xs, ys = [], []
            for a in _flatten(body, node):
                s = _side(a)
                if s == "mixed":
                    break
                (ys if s == "y" else xs).append(a)
            else:
                combine = logic.disj if disjunctive else logic.conj
                x = combine(*xs) if xs else logic.TOP
                return ViewDef(name, x, _cformula(combine(*ys), self.mode, p.lineno), disjunctive)
        raise p.error(
            "a view mixing both sides must read '<x-condition> & <y-condition>' "
            "or '<x-condition> | <y-condition>'",
            p.toks[0],
        )

    def position(self, p: _Parser) -> int:
        tok = p.cur
        if tok.kind == "int":
            p.i += 1
            v = int(tok.text)
            if not 1 <= v <= self.schema.n:
                raise ArityError(f"line {p.lineno}, column {tok.col}: position {v} outside 1..{self.schema.n}")
            return v
        side, idx = p.var(tok)
        p.i += 1
        return idx if side == "x" else self.schema.k + idx

    def uind(self, p: _Parser) -> None:
        ends = []
        for n in range(2):
            p.ident()
            p.eat("[")
            ends.append(self.position(p))
            p.eat("]")
            if n == 0:
                p.eat("<=")
        p.end()
        self.uinds.append(make_uind(ends[0], ends[1], self.schema))

    def position_set(self, p: _Parser) -> frozenset[int]:
        p.eat("{")
        out = [self.position(p)]
        while p.at(","):
            p.i += 1
            out.append(self.position(p))
        p.eat("}")
        return frozenset(out)

    def fd(self, p: _Parser) -> None:
        lhs = self.position_set(p)
        p.eat("->")
        rhs = self.position_set(p)
        p.end()
        self.fds.append(Fd(lhs, rhs))

    def domain(self, p: _Parser) -> None:
        _, idx = p.var(p.cur)
        if p.cur.text[0] != "x":
            raise p.error("domain constraints apply to non-interpreted variables")
        p.i += 1
        p.eat("in")
        p.eat("{")
        consts = [p.constant()]
        while p.at(","):
            p.i += 1
            consts.append(p.constant())
        p.eat("}")
        p.end()
        self.cdcs.extend(desugar_domain_constraint(idx, consts, self.schema))


_HEADER = re.compile(r"\s*schema\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*x\s*:\s*(\d+)\s*,\s*y\s*:\s*(\d+)\s*\)\s*\Z")


def _strip_comment(line: str) -> str:
    in_str = esc = False
    for n, ch in enumerate(line):
        if esc:
            esc = False
        elif ch == "\\" and in_str:
            esc = True
        elif ch == '"':
            in_str = not in_str
        elif ch == "#" and not in_str:
            return line[:n]
    return line


def parse_problem(text: str, mode: Optional[str] = None) -> Problem:
    """Parse and desugar a problem; ``mode`` overrides the file's header."""
    lines = [(n, _strip_comment(raw)) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln.strip()]
    schema: Optional[Schema] = None
    file_mode: Optional[str] = None
    body = []
    for n, ln in lines:
        word = ln.split(None, 1)[0]
        if word == "schema":
            m = _HEADER.match(ln)
            if not m:
                raise ParseError("expected 'schema <Name>(x:<k>, y:<m>)'", n, 1)
            if schema is not None:
                raise ParseError("duplicate 'schema' declaration", n, 1)
            schema = Schema(m.group(1), int(m.group(2)), int(m.group(3)))
        elif word == "mode":
            parts = ln.split()
            if len(parts) != 2 or parts[1] not in (UTVPI, BUTVPI):
                raise ParseError("expected 'mode utvpi' or 'mode butvpi'", n, 1)
            if file_mode is not None:
                raise ParseError("duplicate 'mode' declaration", n, 1)
            file_mode = parts[1]
        else:
            body.append((n, ln))
    if schema is None:
        raise ParseError("missing 'schema <Name>(x:<k>, y:<m>)' declaration", 1, 1)
    b = _Builder(schema, mode or file_mode or UTVPI)
    for n, ln in body:
        toks = tokenize(ln, n)
        p = b.parser(toks, n)
        head = p.ident()
        if head == "view":
            b.view(p)
            continue
        handler = {"cdc": b.cdc, "uind": b.uind, "fd": b.fd, "domain": b.domain}.get(head)
        if handler is None:
            raise ParseError(f"unknown declaration {head!r}", n, toks[0].col)
        p.eat(":")
        handler(p)
    return Problem(schema, b.mode, tuple(b.cdcs), tuple(b.views), tuple(b.uinds), tuple(b.fds), tuple(b.notes))


# Printing -------------------------------------------------------------------


def _fmt_y(f) -> str:
    if isinstance(f, UtvpiConj):
        return " & ".join(str(u) for u in f.atoms) if f.atoms else "0 <= 0"
    return str(f)


def _group(s: str, e) -> str:
    return f"({s})" if isinstance(e, logic.Or) and len(e.args) > 1 else s


def format_view(v: ViewDef) -> str:
    if v.y_condition is None:
        return f"view {v.name}: {v.x_condition}"
    y = _fmt_y(v.y_condition)
    if isinstance(v.x_condition, logic.Top) and not v.disjunctive:
        return f"view {v.name}: {y}"
    if v.disjunctive:
        return f"view {v.name}: ({v.x_condition}) | ({y})"
    return f"view {v.name}: {_group(str(v.x_condition), v.x_condition)} & {_group(y, v.y_condition)}"


def format_cdc(c: Cdc) -> str:
    return f"cdc: {c.antecedent} -> {_fmt_y(c.consequent)}"


def format_problem(problem: Problem) -> str:
    s = problem.schema
    out = [f"schema {s.name}(x:{s.k}, y:{s.m})", f"mode {problem.mode}"]
    out += [format_cdc(c) for c in problem.cdcs]
    out += [format_view(v) for v in problem.views]
    out += [f"uind: {s.name}[{s.position_name(u.lhs)}] <= {s.name}[{s.position_name(u.rhs)}]" for u in problem.uinds]
    out += [f"fd: {fd}" for fd in problem.fds]
    return "\n".join(out) + "\n"
