"""Schemas, tuples, instances and the four constraint kinds.

Positions are 1-based and absolute: ``1..k`` are the non-interpreted
(x) positions holding opaque constants, ``k+1..k+m`` the interpreted (y)
positions holding integers.  C-formulae refer to y-variables by their
index within the y-block (``y1`` is absolute position ``k+1``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from hdec import cformula, logic
from hdec.cformula import CFormula
from hdec.errors import ArityError, MixedFd, MixedUind

X_UIND = "X-UIND"
Y_UIND = "Y-UIND"
X_FD, Y_FD, XY_FD, YX_FD = "X-FD", "Y-FD", "XY-FD", "YX-FD"

UTVPI = "utvpi"
BUTVPI = "butvpi"

FRESH_PREFIX = "⋆"  # reserved namespace for witness constants
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_KEYWORDS = {"top", "in"}


def fresh_constant(position: int) -> str:
    return f"{FRESH_PREFIX}{position}"


def format_constant(c: str) -> str:
    if _BARE.match(c) and c not in _KEYWORDS and not re.match(r"[xy]\d+\Z", c):
        return c
    return '"' + c.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class Schema:
    name: str
    k: int
    m: int

    def __post_init__(self):
        if self.k < 0 or self.m < 0 or self.k + self.m < 1:
            raise ArityError(f"schema {self.name} needs k, m >= 0 and k + m >= 1")

    @property
    def n(self) -> int:
        return self.k + self.m

    def is_x(self, position: int) -> bool:
        return 1 <= position <= self.k

    def is_y(self, position: int) -> bool:
        return self.k < position <= self.n

    def position_name(self, position: int) -> str:
        if self.is_x(position):
            return f"x{position}"
        return f"y{position - self.k}"


@dataclass(frozen=True, order=True)
class Tuple:
    x: tuple[str, ...]
    y: tuple[int, ...]

    @property
    def beta(self) -> dict[int, int]:
        """The assignment induced by the interpreted positions."""
        return {j + 1: v for j, v in enumerate(self.y)}

    def value(self, position: int):
        k = len(self.x)
        return self.x[position - 1] if position <= k else self.y[position - k - 1]

    def check(self, schema: Schema) -> None:
        if len(self.x) != schema.k or len(self.y) != schema.m:
            raise ArityError(f"tuple {self} does not fit {schema.name}(x:{schema.k}, y:{schema.m})")

    def __str__(self) -> str:
        return "(" + ", ".join([format_constant(c) for c in self.x] + [str(v) for v in self.y]) + ")"


@dataclass(frozen=True)
class EqAtom:
    position: int
    constant: str
    equal: bool = True

    def __str__(self) -> str:
        op = "=" if self.equal else "!="
        return f"x{self.position} {op} {format_constant(self.constant)}"


@dataclass(frozen=True)
class Cdc:
    """``antecedent -> consequent``: an equality condition on the x-side
    restricting the y-side."""

    antecedent: object
    consequent: CFormula

    def __str__(self) -> str:
        return f"{self.antecedent} -> {self.consequent}"


@dataclass(frozen=True)
class ViewDef:
    """Selection ``x_condition & y_condition``; with ``disjunctive`` set the
    selection is ``x_condition | y_condition`` instead, a form only the
    parser produces before splitting it."""

    name: str
    x_condition: object = logic.TOP
    y_condition: Optional[CFormula] = None
    disjunctive: bool = False

    def __str__(self) -> str:
        if self.y_condition is None:
            return f"{self.name}: {self.x_condition}"
        op = " | " if self.disjunctive else " & "
        return f"{self.name}: ({self.x_condition}){op}({self.y_condition})"


@dataclass(frozen=True)
class Uind:
    """``R[lhs] <= R[rhs]`` over absolute positions."""

    lhs: int
    rhs: int
    kind: str

    def label(self, schema: Schema) -> str:
        return f"R[{schema.position_name(self.lhs)}] <= R[{schema.position_name(self.rhs)}]"


@dataclass(frozen=True)
class Fd:
    lhs: frozenset[int]
    rhs: frozenset[int]

    def __str__(self) -> str:
        return "{" + ",".join(map(str, sorted(self.lhs))) + "} -> {" + ",".join(map(str, sorted(self.rhs))) + "}"


@dataclass(frozen=True)
class Problem:
    schema: Schema
    mode: str = UTVPI
    cdcs: tuple[Cdc, ...] = ()
    views: tuple[ViewDef, ...] = ()
    uinds: tuple[Uind, ...] = ()
    fds: tuple[Fd, ...] = ()
    notes: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Instance:
    rows: frozenset[Tuple] = frozenset()

    def extensions(self, views: Iterable[ViewDef], relation: str = "R") -> dict[str, frozenset[Tuple]]:
        out = {relation: self.rows}
        for v in views:
            out[v.name] = frozenset(t for t in self.rows if view_selects(v, t))
        return out

    def column(self, position: int) -> set:
        return {t.value(position) for t in self.rows}

    def sorted_rows(self) -> list[Tuple]:
        return sorted(self.rows)


def classify_uind(lhs: int, rhs: int, schema: Schema) -> str:
    for p in (lhs, rhs):
        if not 1 <= p <= schema.n:
            raise ArityError(f"UIND position {p} outside 1..{schema.n}")
    if schema.is_x(lhs) and schema.is_x(rhs):
        return X_UIND
    if schema.is_y(lhs) and schema.is_y(rhs):
        return Y_UIND
    raise MixedUind(
        f"R[{lhs}] <= R[{rhs}] relates a non-interpreted and an interpreted position"
    )


def make_uind(lhs: int, rhs: int, schema: Schema) -> Uind:
    return Uind(lhs, rhs, classify_uind(lhs, rhs, schema))


def classify_fd(fd: Fd, schema: Schema) -> str:
    if not fd.lhs or not fd.rhs:
        raise ArityError(f"FD {fd} needs non-empty sides")

    def side(ps: frozenset[int]) -> str:
        for p in ps:
            if not 1 <= p <= schema.n:
                raise ArityError(f"FD position {p} outside 1..{schema.n}")
        if all(schema.is_x(p) for p in ps):
            return "X"
        if all(schema.is_y(p) for p in ps):
            return "Y"
        raise MixedFd(f"FD {fd} mixes interpreted and non-interpreted positions on one side")

    return {"XX": X_FD, "YY": Y_FD, "XY": XY_FD, "YX": YX_FD}[side(fd.lhs) + side(fd.rhs)]


def eval_bool_expr(e, t: Tuple) -> bool:
    return logic.evaluate(e, lambda a: (t.x[a.position - 1] == a.constant) == a.equal)


def cdc_holds(c: Cdc, t: Tuple) -> bool:
    return not eval_bool_expr(c.antecedent, t) or cformula.holds(c.consequent, t.beta)


def view_selects(v: ViewDef, t: Tuple) -> bool:
    x_ok = eval_bool_expr(v.x_condition, t)
    if v.y_condition is None:
        return x_ok
    if v.disjunctive:
        return x_ok or cformula.holds(v.y_condition, t.beta)
    return x_ok and cformula.holds(v.y_condition, t.beta)


def fd_holds(fd: Fd, rows: Iterable[Tuple]) -> bool:
    seen: dict[tuple, tuple] = {}
    for t in rows:
        key = tuple(t.value(p) for p in sorted(fd.lhs))
        val = tuple(t.value(p) for p in sorted(fd.rhs))
        if seen.setdefault(key, val) != val:
            return False
    return True


def uind_holds(u: Uind, rows: Iterable[Tuple]) -> bool:
    rows = list(rows)
    return {t.value(u.lhs) for t in rows} <= {t.value(u.rhs) for t in rows}


def violations(problem: Problem, instance: Instance, cdcs: Optional[Iterable[Cdc]] = None) -> list[str]:
    """Every constraint of ``problem`` (or the given CDC set) the instance breaks."""
    out = []
    cdcs = problem.cdcs if cdcs is None else tuple(cdcs)
    for t in instance.sorted_rows():
        for c in cdcs:
            if not cdc_holds(c, t):
                out.append(f"{t} violates CDC {c}")
    for fd in problem.fds:
        if not fd_holds(fd, instance.rows):
            out.append(f"FD {fd} violated")
    for u in problem.uinds:
        if not uind_holds(u, instance.rows):
            out.append(f"UIND {u.label(problem.schema)} violated")
    return out


def selecting_views(views: Iterable[ViewDef], t: Tuple) -> list[str]:
    return [v.name for v in views if view_selects(v, t)]


def constants_by_position(exprs: Iterable) -> dict[int, set[str]]:
    out: dict[int, set[str]] = {}
    for e in exprs:
        for a in logic.leaves(e):
            out.setdefault(a.position, set()).add(a.constant)
    return out


def problem_constants(problem: Problem) -> dict[int, set[str]]:
    return constants_by_position(
        [c.antecedent for c in problem.cdcs] + [v.x_condition for v in problem.views]
    )


def beta_tuple(beta: Mapping[int, int], m: int) -> tuple[int, ...]:
    return tuple(beta.get(j, 0) for j in range(1, m + 1))
