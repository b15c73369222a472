"""UTVPI atoms and the C-formulae built from them.

A C-formula is one of

* a single :class:`Utvpi` atom,
* a :class:`UtvpiConj` (UTVPI mode only; what ``y1 = 0`` desugars to),
* a BUTVPI tree of :class:`hdec.logic.And` / ``Or`` / ``Not`` over atoms.

Variables are the interpreted positions ``y1..ym``, referenced by their
1-based index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from hdec import logic
from hdec.errors import CoefficientOutOfRange, NegationNotSingleAtom

COMPARISONS = ("<=", ">=", "<", ">", "=")


@dataclass(frozen=True, order=True)
class Utvpi:
    """``a*y_i + b*y_j <= d`` with ``a, b`` in {-1, 0, 1}.

    Build through :meth:`make`, which puts the atom in canonical form:
    a single variable sits in the ``(a, i)`` slot, two variables satisfy
    ``i < j``, and ``a = b = 0`` is the constant atom ``0 <= d``.
    """

    a: int
    i: Optional[int]
    b: int
    j: Optional[int]
    d: int

    @classmethod
    def make(cls, a: int, i: Optional[int], b: int = 0, j: Optional[int] = None, d: int = 0) -> "Utvpi":
        if a not in (-1, 0, 1) or b not in (-1, 0, 1):
            raise CoefficientOutOfRange(f"coefficients must be in {{-1,0,1}}, got {a}, {b}")
        if a == 0 or i is None:
            a, i = 0, None
        if b == 0 or j is None:
            b, j = 0, None
        if i is None and j is not None:
            a, i, b, j = b, j, 0, None
        if i is not None and j is not None:
            if i == j:
                c = a + b
                if c == 0:
                    return cls(0, None, 0, None, d)
                # 2*y <= d  over the integers  <=>  y <= floor(d/2)
                return cls(c // 2, i, 0, None, d // 2)
            if i > j:
                a, i, b, j = b, j, a, i
        return cls(a, i, b, j, d)

    @classmethod
    def const(cls, d: int) -> "Utvpi":
        return cls(0, None, 0, None, d)

    @property
    def is_const(self) -> bool:
        return self.i is None

    @property
    def variables(self) -> frozenset[int]:
        return frozenset(v for v in (self.i, self.j) if v is not None)

    def value(self, beta: Mapping[int, int]) -> int:
        total = 0
        if self.i is not None:
            total += self.a * beta.get(self.i, 0)
        if self.j is not None:
            total += self.b * beta.get(self.j, 0)
        return total

    def holds(self, beta: Mapping[int, int]) -> bool:
        return self.value(beta) <= self.d

    def negate(self) -> "Utvpi":
        return Utvpi(-self.a, self.i, -self.b, self.j, -self.d - 1)

    def rename(self, mapping: Mapping[int, int]) -> "Utvpi":
        i = mapping.get(self.i, self.i) if self.i is not None else None
        j = mapping.get(self.j, self.j) if self.j is not None else None
        return Utvpi.make(self.a, i, self.b, j, self.d)

    def __str__(self) -> str:
        if self.is_const:
            return f"0 <= {self.d}"
        lhs = ("-" if self.a < 0 else "") + f"y{self.i}"
        if self.j is not None:
            lhs += (" - " if self.b < 0 else " + ") + f"y{self.j}"
        return f"{lhs} <= {self.d}"


@dataclass(frozen=True)
class UtvpiConj:
    atoms: tuple[Utvpi, ...]

    def __str__(self) -> str:
        if not self.atoms:
            return "0 <= 0"
        return " & ".join(str(u) for u in self.atoms)


CFormula = Union[Utvpi, UtvpiConj, logic.And, logic.Or, logic.Not]


def normalize_comparison(op: str, a: int, i: Optional[int], b: int, j: Optional[int], d: int) -> list[Utvpi]:
    """Rewrite ``a*y_i + b*y_j <op> d`` into ``<=``-form UTVPIs."""
    if op == "<=":
        return [Utvpi.make(a, i, b, j, d)]
    if op == ">=":
        return [Utvpi.make(-a, i, -b, j, -d)]
    if op == "<":
        return [Utvpi.make(a, i, b, j, d - 1)]
    if op == ">":
        return [Utvpi.make(-a, i, -b, j, -(d + 1))]
    if op == "=":
        return [Utvpi.make(a, i, b, j, d), Utvpi.make(-a, i, -b, j, -d)]
    raise ValueError(f"unknown comparison {op!r}")


def negate_utvpi(u: Utvpi) -> Utvpi:
    return u.negate()


def negate_cformula(f: CFormula) -> CFormula:
    if isinstance(f, Utvpi):
        return f.negate()
    if isinstance(f, UtvpiConj):
        if len(f.atoms) == 1:
            return f.atoms[0].negate()
        if not f.atoms:
            return Utvpi.const(-1)
        raise NegationNotSingleAtom(
            f"negation of the conjunction {f} is not a UTVPI set; use 'mode butvpi'"
        )
    if isinstance(f, logic.Not):
        return f.arg
    return logic.Not(f)


def holds(f: CFormula, beta: Mapping[int, int]) -> bool:
    if isinstance(f, Utvpi):
        return f.holds(beta)
    if isinstance(f, UtvpiConj):
        return all(u.holds(beta) for u in f.atoms)
    return logic.evaluate(f, lambda u: u.holds(beta))


def atoms_of(f: CFormula) -> list[Utvpi]:
    """All UTVPI leaves of ``f`` (with repetitions, in order)."""
    if isinstance(f, Utvpi):
        return [f]
    if isinstance(f, UtvpiConj):
        return list(f.atoms)
    return list(logic.leaves(f))


def variables(f: CFormula) -> frozenset[int]:
    out: set[int] = set()
    for u in atoms_of(f):
        out |= u.variables
    return frozenset(out)


def is_conjunctive(f: CFormula) -> bool:
    """True when ``f`` is a plain conjunction of atoms (UTVPI-solvable)."""
    return isinstance(f, (Utvpi, UtvpiConj))


def rename(f: CFormula, mapping: Mapping[int, int]) -> CFormula:
    if isinstance(f, Utvpi):
        return f.rename(mapping)
    if isinstance(f, UtvpiConj):
        return UtvpiConj(tuple(u.rename(mapping) for u in f.atoms))
    return logic.map_leaves(f, lambda u: u.rename(mapping))


def max_abs_bound(formulas) -> int:
    return max((abs(u.d) for f in formulas for u in atoms_of(f)), default=0)
