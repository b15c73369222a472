import itertools

import pytest

from hdec import logic
from hdec.cformula import (
    COMPARISONS,
    Utvpi,
    UtvpiConj,
    holds,
    negate_cformula,
    negate_utvpi,
    normalize_comparison,
    rename,
)
from hdec.errors import CoefficientOutOfRange, NegationNotSingleAtom

GRID = list(itertools.product(range(-10, 11), repeat=2))
OPS = {
    "<=": lambda l, d: l <= d,
    ">=": lambda l, d: l >= d,
    "<": lambda l, d: l < d,
    ">": lambda l, d: l > d,
    "=": lambda l, d: l == d,
}


def test_normalize_examples():
    assert normalize_comparison(">=", 1, 2, 0, None, 4) == [Utvpi.make(-1, 2, 0, None, -4)]
    assert normalize_comparison("<", 1, 2, 0, None, 4) == [Utvpi.make(1, 2, 0, None, 3)]
    assert normalize_comparison("=", 1, 1, 0, None, 0) == [Utvpi.make(1, 1, 0, None, 0), Utvpi.make(-1, 1, 0, None, 0)]


def test_coefficient_range():
    with pytest.raises(CoefficientOutOfRange):
        Utvpi.make(2, 1, 0, None, 0)


def test_canonical_form():
    assert Utvpi.make(1, 2, -1, 1, 3) == Utvpi.make(-1, 1, 1, 2, 3)
    assert Utvpi.make(0, None, 1, 2, 3) == Utvpi.make(1, 2, 0, None, 3)
    # 2*y1 <= 5 over the integers is y1 <= 2
    assert Utvpi.make(1, 1, 1, 1, 5) == Utvpi.make(1, 1, 0, None, 2)
    assert Utvpi.make(1, 1, -1, 1, -1).is_const


def test_constant_atoms():
    assert holds(Utvpi.const(0), {})
    assert not holds(Utvpi.const(-1), {})


@pytest.mark.parametrize("op", COMPARISONS)
@pytest.mark.parametrize("a,b", [(1, 0), (-1, 0), (1, 1), (1, -1), (-1, -1), (-1, 1)])
def test_normalize_exhaustive(op, a, b):
    for d in range(-6, 7):
        j = 2 if b else None
        atoms = normalize_comparison(op, a, 1, b, j, d)
        for y1, y2 in GRID:
            beta = {1: y1, 2: y2}
            assert all(u.holds(beta) for u in atoms) == OPS[op](a * y1 + b * y2, d)


def test_negate_examples():
    assert negate_utvpi(Utvpi.make(1, 2, 0, None, 3)) == Utvpi.make(-1, 2, 0, None, -4)
    assert negate_utvpi(Utvpi.make(1, 1, -1, 2, -1)) == Utvpi.make(-1, 1, 1, 2, 0)
    u = Utvpi.make(1, 1, 1, 2, 5)
    assert negate_utvpi(negate_utvpi(u)) == u


@pytest.mark.parametrize("a,b", [(1, 0), (-1, 0), (1, 1), (1, -1), (-1, -1)])
def test_negation_complements_pointwise(a, b):
    for d in range(-5, 6):
        u = Utvpi.make(a, 1, b, 2 if b else None, d)
        n = negate_utvpi(u)
        assert negate_utvpi(n) == u
        for y1, y2 in GRID:
            beta = {1: y1, 2: y2}
            assert u.holds(beta) != n.holds(beta)


def test_negate_cformula():
    lt4 = normalize_comparison("<", 1, 2, 0, None, 4)[0]
    assert negate_cformula(lt4) == normalize_comparison(">=", 1, 2, 0, None, 4)[0]
    lo, hi = Utvpi.make(1, 1, 0, None, 0), Utvpi.make(-1, 1, 0, None, -1)
    tree = logic.And((lo, hi))
    assert negate_cformula(negate_cformula(tree)) == tree
    assert negate_cformula(logic.Not(tree)) == tree
    with pytest.raises(NegationNotSingleAtom):
        negate_cformula(UtvpiConj((lo, hi)))
    assert negate_cformula(UtvpiConj((lo,))) == lo.negate()


def test_rename():
    u = Utvpi.make(1, 1, -1, 2, 0)
    assert rename(u, {1: 3}) == Utvpi.make(-1, 2, 1, 3, 0)
    assert rename(logic.Not(u), {2: 1}) == logic.Not(Utvpi.const(0))
