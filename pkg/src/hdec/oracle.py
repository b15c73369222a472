"""Deliberately naive reference semantics, plus the hardness reductions.

Nothing in here shares code with the solver or the encoding: the
single-tuple oracles enumerate tuples and evaluate constraints directly,
and the formula oracle enumerates integer points.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from hdec import logic
from hdec.cformula import CFormula, Utvpi, UtvpiConj, atoms_of, holds, normalize_comparison
from hdec.model import (
    UTVPI,
    Cdc,
    EqAtom,
    Instance,
    Problem,
    Schema,
    Tuple,
    ViewDef,
    cdc_holds,
    fd_holds,
    fresh_constant,
    uind_holds,
    view_selects,
)
from hdec.solver import SatResult

SAT_CONSTANT = "sat_a"


# Formula satisfiability ------------------------------------------------------


def _eval_vec(f, env: dict[int, np.ndarray], size: int) -> np.ndarray:
    if isinstance(f, Utvpi):
        total = np.zeros(size, dtype=np.int64)
        if f.i is not None:
            total = total + f.a * env[f.i]
        if f.j is not None:
            total = total + f.b * env[f.j]
        return total <= f.d
    if isinstance(f, UtvpiConj):
        out = np.ones(size, dtype=bool)
        for u in f.atoms:
            out &= _eval_vec(u, env, size)
        return out
    if isinstance(f, logic.Top):
        return np.ones(size, dtype=bool)
    if isinstance(f, logic.Not):
        return ~_eval_vec(f.arg, env, size)
    parts = [_eval_vec(a, env, size) for a in f.args]
    if isinstance(f, logic.And):
        return np.logical_and.reduce(parts)
    return np.logical_or.reduce(parts)


def brute_force_cformula_sat(formulas: Iterable[CFormula], bound: int) -> SatResult:
    """Search ``[-bound, bound]^v`` for a model.

    All variables but the last are enumerated on a grid.  Along the last
    axis every atom is a half-line, so the formulae are piecewise constant
    between the breakpoints; probing each breakpoint, its neighbour and
    the two box ends covers every piece of the axis.
    """
    formulas = list(formulas)
    variables = sorted({v for f in formulas for u in atoms_of(f) for v in u.variables})
    if not variables:
        ok = all(holds(f, {}) for f in formulas)
        return SatResult.sat({}) if ok else SatResult.unsat(formulas)
    *rest, last = variables
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    if rest:
        grids = np.meshgrid(*([axis] * len(rest)), indexing="ij")
        env = {v: g.ravel() for v, g in zip(rest, grids)}
    else:
        env = {}
    size = len(axis) ** len(rest)

    candidates = [np.full(size, -bound, dtype=np.int64), np.full(size, bound, dtype=np.int64)]
    for u in {u for f in formulas for u in atoms_of(f)}:
        if last not in u.variables:
            continue
        coeff, other = (u.a, u.j) if u.i == last else (u.b, u.i)
        other_coeff = u.b if u.i == last else u.a
        slack = u.d - (other_coeff * env[other] if other is not None else 0)
        edge = np.broadcast_to(slack if coeff > 0 else -slack, (size,)).astype(np.int64)
        step = 1 if coeff > 0 else -1
        candidates.append(edge)
        candidates.append(edge + step)

    for cand in candidates:
        cand = np.clip(cand, -bound, bound)
        env[last] = cand
        ok = np.ones(size, dtype=bool)
        for f in formulas:
            ok &= _eval_vec(f, env, size)
            if not ok.any():
                break
        if ok.any():
            at = int(np.argmax(ok))
            model = {v: int(env[v][at]) for v in variables}
            return SatResult.sat(model)
    return SatResult.unsat(formulas)


def oracle_bound(formulas: Iterable[CFormula], m: int) -> int:
    """Box half-width covering every filtering built from ``formulas`` or
    their negations (negating an atom moves its bound by one)."""
    d = max((abs(u.d) for f in formulas for u in atoms_of(f)), default=0)
    return (m + 1) * (d + 2)


def _tree(f: CFormula):
    if isinstance(f, UtvpiConj):
        return logic.conj(*f.atoms)
    return f


# Single-tuple semantics ------------------------------------------------------


def default_pool(schema: Schema, exprs: Iterable) -> dict[int, list[str]]:
    """Per x-position: the constants mentioned there plus one fresh name.
    Any constant not mentioned at a position behaves like the fresh one."""
    seen: dict[int, set[str]] = {i: set() for i in range(1, schema.k + 1)}
    for e in exprs:
        for a in logic.leaves(e):
            seen[a.position].add(a.constant)
    return {i: sorted(cs) + [fresh_constant(i)] for i, cs in seen.items()}


def _pool_for(schema: Schema, const_pool) -> list[list[str]]:
    if const_pool is None:
        raise ValueError("a constant pool is required")
    if isinstance(const_pool, dict):
        return [list(const_pool[i]) for i in range(1, schema.k + 1)]
    return [list(const_pool)] * schema.k


def _x_parts(schema: Schema, const_pool) -> Iterator[tuple[str, ...]]:
    return itertools.product(*_pool_for(schema, const_pool))


def _holds_x(e, x: Sequence[str]) -> bool:
    return logic.evaluate(e, lambda a: (x[a.position - 1] == a.constant) == a.equal)


def _search_y(active: list, m: int, bound: int) -> Optional[tuple[int, ...]]:
    res = brute_force_cformula_sat(active, bound)
    if not res.satisfiable:
        return None
    return tuple(res.model.get(j, 0) for j in range(1, m + 1))


def brute_force_consistency(
    schema: Schema, cdcs: Sequence[Cdc], const_pool=None, bound: Optional[int] = None
) -> Optional[Tuple]:
    """A tuple whose singleton instance satisfies every CDC, or None."""
    cdcs = list(cdcs)
    if const_pool is None:
        const_pool = default_pool(schema, [c.antecedent for c in cdcs])
    if bound is None:
        bound = oracle_bound([c.consequent for c in cdcs], schema.m)
    cache: dict[frozenset, Optional[tuple]] = {}
    for x in _x_parts(schema, const_pool):
        active = frozenset(_tree(c.consequent) for c in cdcs if _holds_x(c.antecedent, x))
        if active not in cache:
            cache[active] = _search_y(list(active), schema.m, bound)
        if cache[active] is not None:
            return Tuple(tuple(x), cache[active])
    return None


def brute_force_losslessness(
    schema: Schema,
    views: Sequence[ViewDef],
    cdcs: Sequence[Cdc],
    const_pool=None,
    bound: Optional[int] = None,
) -> Optional[Tuple]:
    """A tuple satisfying every CDC that no view selects, or None when the
    decomposition is lossless."""
    views, cdcs = list(views), list(cdcs)
    if const_pool is None:
        const_pool = default_pool(schema, [c.antecedent for c in cdcs] + [v.x_condition for v in views])
    if bound is None:
        ys = [v.y_condition for v in views if v.y_condition is not None]
        bound = oracle_bound([c.consequent for c in cdcs] + ys, schema.m)
    cache: dict[frozenset, Optional[tuple]] = {}
    for x in _x_parts(schema, const_pool):
        active = {_tree(c.consequent) for c in cdcs if _holds_x(c.antecedent, x)}
        blocked = False
        for v in views:
            x_ok = _holds_x(v.x_condition, x)
            if x_ok and (v.disjunctive or v.y_condition is None):
                blocked = True
                break
            if (x_ok or v.disjunctive) and v.y_condition is not None:
                active.add(logic.Not(_tree(v.y_condition)))
        if blocked:
            continue
        key = frozenset(active)
        if key not in cache:
            cache[key] = _search_y(list(key), schema.m, bound)
        if cache[key] is not None:
            t = Tuple(tuple(x), cache[key])
            assert all(cdc_holds(c, t) for c in cdcs) and not any(view_selects(v, t) for v in views)
            return t
    return None


# Bounded instances -----------------------------------------------------------


def _universe(problem: Problem, const_pool, bound: int) -> list[Tuple]:
    schema = problem.schema
    ys = list(itertools.product(range(-bound, bound + 1), repeat=schema.m))
    out = []
    for x in _x_parts(schema, const_pool):
        for y in ys:
            t = Tuple(tuple(x), tuple(y))
            if all(cdc_holds(c, t) for c in problem.cdcs):
                out.append(t)
    return out


def brute_force_instance_models(
    problem: Problem, max_tuples: int, const_pool, bound: int
) -> Iterator[Instance]:
    """Every instance of at most ``max_tuples`` tuples over the bounded
    universe that satisfies all of the problem's CDCs, FDs and UINDs."""
    universe = _universe(problem, const_pool, bound)
    for size in range(0, max_tuples + 1):
        for rows in itertools.combinations(universe, size):
            if all(fd_holds(fd, rows) for fd in problem.fds) and all(
                uind_holds(u, rows) for u in problem.uinds
            ):
                yield Instance(frozenset(rows))


# Hardness reductions ---------------------------------------------------------


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Variable count and clause list of a DIMACS CNF document."""
    nvars = 0
    clauses: list[list[int]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {raw!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
                nvars = max(nvars, abs(lit))
    if current:
        clauses.append(current)
    return nvars, clauses


def truth_table_sat(nvars: int, clauses: Sequence[Sequence[int]]) -> bool:
    for bits in itertools.product((False, True), repeat=nvars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in clauses):
            return True
    return False


def _clause_cdc(clause: Sequence[int]) -> Cdc:
    ante = logic.conj(*(EqAtom(abs(l), SAT_CONSTANT, equal=l < 0) for l in clause))
    (positive,) = normalize_comparison(">", 1, 1, 0, None, 0)
    return Cdc(ante, positive)


def _reduction_schema(nvars: int) -> Schema:
    return Schema("R", nvars, 1)


def sat_to_consistency(nvars: int, clauses: Sequence[Sequence[int]]) -> Problem:
    """CDCs that are consistent exactly when the CNF is satisfiable.

    Literal ``L_i`` true corresponds to ``x_i = sat_a``; each clause forbids
    the tuples falsifying it from having ``y1 <= 0``, which ``top -> y1 <= 0``
    then demands of every tuple.
    """
    cdcs = [_clause_cdc(cl) for cl in clauses]
    cdcs.append(Cdc(logic.TOP, Utvpi.make(1, 1, 0, None, 0)))
    return Problem(_reduction_schema(nvars), UTVPI, tuple(cdcs))


def unsat_to_losslessness(nvars: int, clauses: Sequence[Sequence[int]]) -> Problem:
    """A view ``y1 > 0`` that is lossless under the clause CDCs exactly when
    the CNF is unsatisfiable."""
    cdcs = tuple(_clause_cdc(cl) for cl in clauses)
    (positive,) = normalize_comparison(">", 1, 1, 0, None, 0)
    return Problem(_reduction_schema(nvars), UTVPI, cdcs, (ViewDef("V", logic.TOP, positive),))


def brute_force_global_consistency(
    schema: Schema, cdcs: Sequence[Cdc], const_pool=None, bound: Optional[int] = None
) -> Optional[tuple[str, ...]]:
    """An x-part for which no interpreted values satisfy the CDCs, or None."""
    cdcs = list(cdcs)
    if const_pool is None:
        const_pool = default_pool(schema, [c.antecedent for c in cdcs])
    if bound is None:
        bound = oracle_bound([c.consequent for c in cdcs], schema.m)
    for x in _x_parts(schema, const_pool):
        active = [_tree(c.consequent) for c in cdcs if _holds_x(c.antecedent, x)]
        if _search_y(active, schema.m, bound) is None:
            return tuple(x)
    return None
