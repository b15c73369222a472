"""Propositional abstraction of CDCs and views.

Every equality ``x_i = a`` becomes the variable ``p_i^a``; every CDC
consequent and view y-condition gets a variable of its own, mapped back
to the formula by the idf map.  A valuation picks, per position, at most
one constant to be true, which builds the unique-value axioms into the
representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from hdec import logic
from hdec.cformula import CFormula, negate_cformula
from hdec.errors import AlphaViolatesUniqueValue
from hdec.model import Cdc, EqAtom, ViewDef, format_constant


@dataclass(frozen=True, order=True)
class PosConst:
    position: int
    constant: str

    def __str__(self) -> str:
        return f"p{self.position}^{format_constant(self.constant)}"


@dataclass(frozen=True, order=True)
class CVar:
    id: int
    primed: bool = False

    def __str__(self) -> str:
        return f"v'{self.id}" if self.primed else f"v{self.id}"


@dataclass(frozen=True)
class Bottom:
    def __str__(self) -> str:
        return "bottom"


BOTTOM = Bottom()


@dataclass(frozen=True)
class PropFormula:
    lhs: object
    rhs: object  # CVar or BOTTOM

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class PropTheory:
    formulas: tuple[PropFormula, ...] = ()

    @property
    def var_p(self) -> frozenset[PosConst]:
        return frozenset(p for f in self.formulas for p in logic.leaves(f.lhs))

    @property
    def var_v(self) -> frozenset[CVar]:
        return frozenset(f.rhs for f in self.formulas if isinstance(f.rhs, CVar))

    def __or__(self, other: "PropTheory") -> "PropTheory":
        return PropTheory(self.formulas + other.formulas)


IdfMap = dict  # CVar -> CFormula


def _abstract(e):
    def leaf(a: EqAtom):
        p = PosConst(a.position, a.constant)
        return p if a.equal else logic.Not(p)

    return logic.map_leaves(e, leaf)


def encode_cdcs(cdcs: Sequence[Cdc]) -> tuple[PropTheory, IdfMap]:
    formulas, idf = [], {}
    for n, c in enumerate(cdcs, 1):
        v = CVar(n)
        formulas.append(PropFormula(_abstract(c.antecedent), v))
        idf[v] = c.consequent
    return PropTheory(tuple(formulas)), idf


def encode_views(views: Sequence[ViewDef]) -> tuple[PropTheory, IdfMap]:
    formulas, idf = [], {}
    for n, v in enumerate(views, 1):
        if v.disjunctive:
            raise ValueError(f"view {v.name} must be split before encoding")
        if v.y_condition is None:
            formulas.append(PropFormula(_abstract(v.x_condition), BOTTOM))
        else:
            cv = CVar(n, primed=True)
            formulas.append(PropFormula(_abstract(v.x_condition), cv))
            idf[cv] = v.y_condition
    return PropTheory(tuple(formulas)), idf


def aux_theory(theory: PropTheory) -> PropTheory:
    """Unique-value axioms over ``var_p`` plus the formulas with rhs bottom."""
    by_position: dict[int, list[PosConst]] = {}
    for p in sorted(theory.var_p):
        by_position.setdefault(p.position, []).append(p)
    out = []
    for ps in by_position.values():
        for p, q in itertools.combinations(ps, 2):
            out.append(PropFormula(logic.And((p, q)), BOTTOM))
    out.extend(f for f in theory.formulas if isinstance(f.rhs, Bottom))
    return PropTheory(tuple(out))


@dataclass(frozen=True)
class Valuation:
    """Per position of ``var_p``, the constant made true (or None).

    Variables outside ``var_p`` read as false.
    """

    choices: tuple[tuple[int, Optional[str]], ...]
    var_p: tuple[PosConst, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_map", dict(self.choices))

    @classmethod
    def from_truths(cls, truths: Mapping[PosConst, bool]) -> "Valuation":
        chosen: dict[int, Optional[str]] = {}
        for p in sorted(truths):
            chosen.setdefault(p.position, None)
            if truths[p]:
                if chosen[p.position] is not None:
                    raise AlphaViolatesUniqueValue(
                        f"x{p.position} cannot equal both {chosen[p.position]} and {p.constant}"
                    )
                chosen[p.position] = p.constant
        return cls(tuple(sorted(chosen.items())), tuple(sorted(truths)))

    def chosen(self, position: int) -> Optional[str]:
        return self._map.get(position)

    def truth(self, p: PosConst) -> bool:
        return self.chosen(p.position) == p.constant

    def holds(self, lhs) -> bool:
        return logic.evaluate(lhs, self.truth)

    def report(self) -> dict[str, bool]:
        return {str(p): self.truth(p) for p in self.var_p}

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}: {'T' if v else 'F'}" for k, v in self.report().items()) + "}"


def enumerate_valuations(var_p: Iterable[PosConst], aux: PropTheory) -> Iterator[Valuation]:
    """Valuations of ``var_p`` satisfying ``aux``, lexicographically with
    true before false: per position the constants in order, then none."""
    var_p = tuple(sorted(set(var_p)))
    positions: dict[int, list[str]] = {}
    for p in var_p:
        positions.setdefault(p.position, []).append(p.constant)
    keys = sorted(positions)
    bottoms = [f.lhs for f in aux.formulas if isinstance(f.rhs, Bottom)]
    for combo in itertools.product(*([*positions[i], None] for i in keys)):
        alpha = Valuation(tuple(zip(keys, combo)), var_p)
        if not any(alpha.holds(lhs) for lhs in bottoms):
            yield alpha


def alpha_filter_cdc(theory: PropTheory, idf: Mapping, alpha: Valuation) -> tuple[CFormula, ...]:
    out = [idf[f.rhs] for f in theory.formulas if isinstance(f.rhs, CVar) and alpha.holds(f.lhs)]
    return tuple(dict.fromkeys(out))


def alpha_filter_views(theory: PropTheory, idf: Mapping, alpha: Valuation) -> tuple[CFormula, ...]:
    out = [
        negate_cformula(idf[f.rhs])
        for f in theory.formulas
        if isinstance(f.rhs, CVar) and alpha.holds(f.lhs)
    ]
    return tuple(dict.fromkeys(out))
