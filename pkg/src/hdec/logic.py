"""Boolean expression trees with pluggable leaves.

The same node types carry equality antecedents (leaves are ``EqAtom``),
BUTVPI formulae (leaves are ``Utvpi``) and the left-hand sides of the
propositional encoding (leaves are ``PosConst``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "top"


TOP = Top()


@dataclass(frozen=True)
class Not:
    arg: Any

    def __str__(self) -> str:
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self) -> str:
        return " & ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self) -> str:
        return " | ".join(_wrap(a) for a in self.args)


def _wrap(e: Any) -> str:
    if isinstance(e, (And, Or)) and len(e.args) > 1:
        return f"({e})"
    return str(e)


def conj(*args: Any) -> Any:
    """And of ``args``, collapsing the trivial cases."""
    flat = []
    for a in args:
        if isinstance(a, Top):
            continue
        flat.extend(a.args if isinstance(a, And) else (a,))
    if not flat:
        return TOP
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*args: Any) -> Any:
    flat = []
    for a in args:
        flat.extend(a.args if isinstance(a, Or) else (a,))
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def is_node(e: Any) -> bool:
    return isinstance(e, (Top, Not, And, Or))


def evaluate(e: Any, leaf: Callable[[Any], bool]) -> bool:
    if isinstance(e, Top):
        return True
    if isinstance(e, Not):
        return not evaluate(e.arg, leaf)
    if isinstance(e, And):
        return all(evaluate(a, leaf) for a in e.args)
    if isinstance(e, Or):
        return any(evaluate(a, leaf) for a in e.args)
    return leaf(e)


def leaves(e: Any) -> Iterator[Any]:
    if isinstance(e, Top):
        return
    if isinstance(e, Not):
        yield from leaves(e.arg)
    elif isinstance(e, (And, Or)):
        for a in e.args:
            yield from leaves(a)
    else:
        yield e


def map_leaves(e: Any, fn: Callable[[Any], Any]) -> Any:
    if isinstance(e, Top):
        return e
    if isinstance(e, Not):
        return Not(map_leaves(e.arg, fn))
    if isinstance(e, And):
        return And(tuple(map_leaves(a, fn) for a in e.args))
    if isinstance(e, Or):
        return Or(tuple(map_leaves(a, fn) for a in e.args))
    return fn(e)


def depth(e: Any) -> int:
    if isinstance(e, Not):
        return 1 + depth(e.arg)
    if isinstance(e, (And, Or)):
        return 1 + max(depth(a) for a in e.args)
    return 0
