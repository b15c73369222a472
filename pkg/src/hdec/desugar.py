"""Rewrites that bring constraints into the shapes the encoding expects."""

from __future__ import annotations

from typing import Sequence

from hdec import logic
from hdec.cformula import Utvpi, UtvpiConj
from hdec.errors import NoInterpretedPosition
from hdec.model import BUTVPI, Cdc, EqAtom, Schema, ViewDef

# Any formula that is satisfiable and has a satisfiable negation works here.
DOMAIN_DELTA = Utvpi.make(1, 1, 0, None, 0)


def split_conjunctive_cdc(c: Cdc, mode: str = "utvpi") -> list[Cdc]:
    if mode == BUTVPI or not isinstance(c.consequent, UtvpiConj):
        return [c]
    return [Cdc(c.antecedent, u) for u in dict.fromkeys(c.consequent.atoms)]


def split_disjunctive_view(v: ViewDef) -> list[ViewDef]:
    if not v.disjunctive:
        return [v]
    return [
        ViewDef(f"{v.name}'", v.x_condition, None),
        ViewDef(f"{v.name}''", logic.TOP, v.y_condition),
    ]


def desugar_domain_constraint(position: int, constants: Sequence[str], schema: Schema) -> tuple[Cdc, Cdc]:
    """``x_i`` must be one of ``constants``, as a pair of CDCs whose
    consequents contradict each other."""
    if schema.m < 1:
        raise NoInterpretedPosition(
            f"a domain constraint on x{position} needs at least one interpreted position"
        )
    if not constants:
        raise ValueError("a domain constraint needs at least one constant")
    outside = logic.conj(*(EqAtom(position, a, equal=False) for a in constants))
    return Cdc(outside, DOMAIN_DELTA), Cdc(outside, DOMAIN_DELTA.negate())
