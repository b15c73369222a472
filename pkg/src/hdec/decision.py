"""Consistency, losslessness and global consistency over admissible valuations.

Each procedure walks the valuations of the propositional abstraction in
a fixed order and asks the theory solver about the matching filtering.
Witness tuples are rebuilt from the valuation and the solver model and
re-checked against the constraints before they leave this module.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Sequence

from hdec.cformula import CFormula
from hdec.encoding import (
    PropTheory,
    Valuation,
    alpha_filter_cdc,
    alpha_filter_views,
    aux_theory,
    encode_cdcs,
    encode_views,
    enumerate_valuations,
)
from hdec.errors import AlphaViolatesUniqueValue, WitnessCheckFailed
from hdec.model import Cdc, Schema, Tuple, ViewDef, beta_tuple, cdc_holds, fresh_constant, view_selects
from hdec.solver import DEFAULT_BUDGET, SatResult, solve


@dataclass(frozen=True)
class Check:
    """One valuation, its filtering and what the solver said about it."""

    valuation: Valuation
    filtered: tuple[CFormula, ...]
    result: SatResult


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    witness: Optional[Tuple] = None
    check: Optional[Check] = None


@dataclass(frozen=True)
class LosslessnessVerdict:
    lossless: bool
    witness: Optional[Tuple] = None
    check: Optional[Check] = None
    checks: tuple[Check, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class GlobalConsistencyVerdict:
    globally_consistent: bool
    check: Optional[Check] = None


def build_witness_tuple(alpha: Valuation, beta: Mapping[int, int], schema: Schema) -> Tuple:
    """The tuple consistent with ``alpha`` whose y-part is ``beta``."""
    seen: dict[int, str] = {}
    for position, constant in alpha.choices:
        if constant is None:
            continue
        if position in seen and seen[position] != constant:
            raise AlphaViolatesUniqueValue(f"x{position} is assigned two constants")
        seen[position] = constant
    x = tuple(seen.get(i, fresh_constant(i)) for i in range(1, schema.k + 1))
    return Tuple(x, beta_tuple(beta, schema.m))


# Valuation scanning ----------------------------------------------------------


def _solve_one(args) -> SatResult:
    formulas, budget = args
    return solve(formulas, budget)


def _scan(
    jobs: Iterable[tuple[Valuation, tuple]],
    stop: Callable[[SatResult], bool],
    budget: int,
    parallel: int,
) -> Iterator[Check]:
    """Yield checks in valuation order, ending after the first one ``stop``
    accepts.  With several workers the results still arrive in order, so
    the reported check is the least one whatever the worker count."""
    if parallel <= 1:
        for alpha, formulas in jobs:
            check = Check(alpha, formulas, solve(formulas, budget))
            yield check
            if stop(check.result):
                return
        return
    jobs = list(jobs)
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        results = pool.map(_solve_one, [(f, budget) for _, f in jobs], chunksize=max(1, len(jobs) // (4 * parallel)))
        for (alpha, formulas), res in zip(jobs, results):
            check = Check(alpha, formulas, res)
            yield check
            if stop(res):
                pool.shutdown(cancel_futures=True)
                return


def _cdc_jobs(cdcs: Sequence[Cdc]) -> Iterator[tuple[Valuation, tuple]]:
    theory, idf = encode_cdcs(cdcs)
    for alpha in enumerate_valuations(theory.var_p, aux_theory(theory)):
        yield alpha, alpha_filter_cdc(theory, idf, alpha)


def _self_check(ok: bool, what: str) -> None:
    if not ok:
        raise WitnessCheckFailed(what)


def check_consistency(
    schema: Schema, cdcs: Sequence[Cdc], *, budget: int = DEFAULT_BUDGET, parallel: int = 1
) -> ConsistencyVerdict:
    last = None
    for last in _scan(_cdc_jobs(cdcs), lambda r: r.satisfiable, budget, parallel):
        pass
    if last is None or not last.result.satisfiable:
        return ConsistencyVerdict(False)
    t = build_witness_tuple(last.valuation, last.result.model, schema)
    _self_check(all(cdc_holds(c, t) for c in cdcs), f"consistency witness {t} violates a CDC")
    return ConsistencyVerdict(True, t, last)


def check_losslessness(
    schema: Schema,
    views: Sequence[ViewDef],
    cdcs: Sequence[Cdc],
    *,
    budget: int = DEFAULT_BUDGET,
    parallel: int = 1,
) -> LosslessnessVerdict:
    pd, idf_d = encode_cdcs(cdcs)
    ps, idf_s = encode_views(views)
    merged: PropTheory = pd | ps

    def jobs():
        for alpha in enumerate_valuations(merged.var_p, aux_theory(merged)):
            yield alpha, alpha_filter_cdc(pd, idf_d, alpha) + alpha_filter_views(ps, idf_s, alpha)

    checks = tuple(_scan(jobs(), lambda r: r.satisfiable, budget, parallel))
    if not checks or not checks[-1].result.satisfiable:
        return LosslessnessVerdict(True, checks=checks)
    last = checks[-1]
    t = build_witness_tuple(last.valuation, last.result.model, schema)
    _self_check(all(cdc_holds(c, t) for c in cdcs), f"lossy witness {t} violates a CDC")
    _self_check(not any(view_selects(v, t) for v in views), f"lossy witness {t} is selected by a view")
    return LosslessnessVerdict(False, t, last, checks)


def check_global_consistency(
    schema: Schema, cdcs: Sequence[Cdc], *, budget: int = DEFAULT_BUDGET, parallel: int = 1
) -> GlobalConsistencyVerdict:
    last = None
    for last in _scan(_cdc_jobs(cdcs), lambda r: not r.satisfiable, budget, parallel):
        pass
    if last is None or last.result.satisfiable:
        return GlobalConsistencyVerdict(True)
    return GlobalConsistencyVerdict(False, last)
