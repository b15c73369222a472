import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import rand_cdc_problem
from hdec import logic
from hdec.cformula import Utvpi, normalize_comparison
from hdec.decision import (
    build_witness_tuple,
    check_consistency,
    check_global_consistency,
    check_losslessness,
)
from hdec.encoding import PosConst, Valuation
from hdec.errors import AlphaViolatesUniqueValue
from hdec.model import BUTVPI, Cdc, EqAtom, Schema, Tuple, ViewDef, cdc_holds, view_selects
from hdec.oracle import (
    brute_force_consistency,
    brute_force_global_consistency,
    brute_force_losslessness,
    sat_to_consistency,
)
from hdec.solver import check_model

Y1LE0 = Utvpi.make(1, 1, 0, None, 0)
Y1GT0 = Y1LE0.negate()
GT3 = normalize_comparison(">", 1, 1, 0, None, 3)[0]


def test_running_consistency(load):
    p = load("running.hdec")
    v = check_consistency(p.schema, p.cdcs)
    assert v.consistent
    assert v.witness.x[1:] == ("ICT", "Manager") and v.witness.x[0] == "⋆1"
    assert check_model(v.check.filtered, v.witness.beta)
    assert all(cdc_holds(c, v.witness) for c in p.cdcs)


def test_inconsistent():
    s = Schema("R", 0, 1)
    assert not check_consistency(s, [Cdc(logic.TOP, Y1LE0), Cdc(logic.TOP, Y1GT0)]).consistent


def test_reduction_instance_consistent():
    p = sat_to_consistency(2, [[1, -2]])
    assert check_consistency(p.schema, p.cdcs).consistent


def test_running_losslessness(load):
    p = load("running.hdec")
    v = check_losslessness(p.schema, p.views, p.cdcs)
    assert v.lossless and v.witness is None
    (only,) = v.checks
    assert only.valuation.report() == {"p2^ICT": True, "p3^Manager": True}
    assert len(only.filtered) == 4 and not only.result


def test_running_without_cdcs(load):
    p = load("running_nocdc.hdec")
    v = check_losslessness(p.schema, p.views, p.cdcs)
    assert not v.lossless
    assert v.witness.x[1:] == ("ICT", "Manager") and v.witness.y[1] >= 4
    assert not any(view_selects(w, v.witness) for w in p.views)


def test_closure_view_lossless():
    s = Schema("R", 0, 1)
    assert check_losslessness(s, [ViewDef("V", logic.TOP, GT3)], [Cdc(logic.TOP, GT3)]).lossless


def test_select_all_view():
    s = Schema("R", 1, 1)
    assert check_losslessness(s, [ViewDef("V")], [Cdc(EqAtom(1, "a"), Y1LE0)]).lossless


def test_global_consistency():
    s = Schema("R", 2, 1)
    d2 = [Cdc(EqAtom(1, "a"), Y1GT0), Cdc(EqAtom(2, "a"), normalize_comparison(">", 1, 1, 0, None, 1)[0])]
    assert check_global_consistency(s, d2).globally_consistent
    assert check_global_consistency(s, []).globally_consistent
    bad = check_global_consistency(s, [Cdc(EqAtom(2, "a"), Y1LE0), Cdc(EqAtom(2, "a"), Y1GT0)])
    assert not bad.globally_consistent
    assert bad.check.valuation.report() == {"p2^a": True}
    assert set(bad.check.filtered) == {Y1LE0, Y1GT0}


def test_build_witness_tuple():
    alpha = Valuation.from_truths({PosConst(2, "ICT"): True, PosConst(3, "Manager"): False})
    s = Schema("R", 3, 2)
    assert build_witness_tuple(alpha, {1: 3, 2: 2}, s) == Tuple(("⋆1", "ICT", "⋆3"), (3, 2))
    assert build_witness_tuple(Valuation(()), {}, s) == Tuple(("⋆1", "⋆2", "⋆3"), (0, 0))
    with pytest.raises(AlphaViolatesUniqueValue):
        build_witness_tuple(Valuation(((1, "a"), (1, "b"))), {}, s)


def test_no_interpreted_positions():
    s = Schema("R", 1, 0)
    assert check_consistency(s, []).consistent
    assert not check_losslessness(s, [ViewDef("V", EqAtom(1, "a"))], []).lossless
    assert check_losslessness(s, [ViewDef("V", EqAtom(1, "a")), ViewDef("W", EqAtom(1, "a", False))], []).lossless


def test_butvpi_problem(load):
    p = load("nonsep.hdec")
    assert p.mode == BUTVPI
    assert check_consistency(p.schema, p.cdcs).consistent
    assert not check_global_consistency(p.schema, p.cdcs).globally_consistent


def _agree(p):
    cons = check_consistency(p.schema, p.cdcs)
    assert cons.consistent == (brute_force_consistency(p.schema, p.cdcs) is not None)
    loss = check_losslessness(p.schema, p.views, p.cdcs)
    assert loss.lossless == (brute_force_losslessness(p.schema, p.views, p.cdcs) is None)
    gc = check_global_consistency(p.schema, p.cdcs)
    assert gc.globally_consistent == (brute_force_global_consistency(p.schema, p.cdcs) is None)
    return loss


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_matches_oracle_utvpi(rnd):
    _agree(rand_cdc_problem(random.Random(rnd.random())))


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_matches_oracle_butvpi(rnd):
    _agree(rand_cdc_problem(random.Random(rnd.random()), k_max=2, m_max=2, mode=BUTVPI))


@settings(max_examples=100, deadline=None)
@given(st.randoms(use_true_random=False))
def test_monotonicity(rnd):
    rng = random.Random(rnd.random())
    p = rand_cdc_problem(rng)
    if not check_losslessness(p.schema, p.views, p.cdcs).lossless:
        return
    q = rand_cdc_problem(rng)
    while q.schema != p.schema:
        q = rand_cdc_problem(rng)
    extra_v = [ViewDef(f"W{n}", v.x_condition, v.y_condition) for n, v in enumerate(q.views)]
    assert check_losslessness(p.schema, list(p.views) + extra_v, p.cdcs).lossless
    assert check_losslessness(p.schema, p.views, list(p.cdcs) + list(q.cdcs)).lossless


def test_parallel_matches_sequential():
    rng = random.Random(11)
    for _ in range(8):
        p = rand_cdc_problem(rng, k_max=3, nconst_max=3, max_cdcs=6)
        for f in (check_consistency, check_global_consistency):
            assert f(p.schema, p.cdcs) == f(p.schema, p.cdcs, parallel=3)
        a = check_losslessness(p.schema, p.views, p.cdcs)
        b = check_losslessness(p.schema, p.views, p.cdcs, parallel=3)
        assert a == b
