"""Seeded random inputs shared by the property and acceptance tests."""

from __future__ import annotations

import itertools
import random

from hdec import logic
from hdec.cformula import Utvpi
from hdec.model import BUTVPI, UTVPI, Cdc, EqAtom, Fd, Problem, Schema, ViewDef, make_uind

CONSTANTS = ["a", "b", "c"]


def rand_utvpi(rng: random.Random, nvars: int, dmax: int) -> Utvpi:
    i = rng.randint(1, nvars)
    a = rng.choice((-1, 1))
    d = rng.randint(-dmax, dmax)
    if nvars > 1 and rng.random() < 0.6:
        j = rng.choice([v for v in range(1, nvars + 1) if v != i])
        return Utvpi.make(a, i, rng.choice((-1, 1)), j, d)
    return Utvpi.make(a, i, 0, None, d)


def rand_tree(rng: random.Random, nvars: int, dmax: int, depth: int, budget: list):
    if depth == 0 or budget[0] <= 1 or rng.random() < 0.3:
        budget[0] -= 1
        return rand_utvpi(rng, nvars, dmax)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        return logic.Not(rand_tree(rng, nvars, dmax, depth - 1, budget))
    args = tuple(rand_tree(rng, nvars, dmax, depth - 1, budget) for _ in range(rng.randint(2, 3)))
    return logic.And(args) if kind == "and" else logic.Or(args)


def rand_utvpi_set(rng: random.Random, max_vars=4, max_atoms=8, dmax=5) -> list[Utvpi]:
    nvars = rng.randint(1, max_vars)
    return [rand_utvpi(rng, nvars, dmax) for _ in range(rng.randint(0, max_atoms))]


def rand_butvpi_set(rng: random.Random, max_vars=4, max_atoms=8, dmax=5, depth=3, max_formulas=4) -> list:
    nvars = rng.randint(1, max_vars)
    budget = [max_atoms]
    out = []
    for _ in range(rng.randint(1, max_formulas)):
        if budget[0] <= 0:
            break
        out.append(rand_tree(rng, nvars, dmax, depth, budget))
    return out


def rand_x_condition(rng: random.Random, k: int, nconst: int, max_atoms=2):
    if k == 0 or rng.random() < 0.2:
        return logic.TOP
    atoms = [
        EqAtom(rng.randint(1, k), rng.choice(CONSTANTS[:nconst]), rng.random() < 0.6)
        for _ in range(rng.randint(1, max_atoms))
    ]
    return logic.disj(*atoms) if rng.random() < 0.25 else logic.conj(*atoms)


def rand_cdc_problem(
    rng: random.Random, k_max=3, m_max=3, nconst_max=3, dmax=5, max_cdcs=6, max_views=4, mode=UTVPI
) -> Problem:
    k = rng.randint(0, k_max)
    m = rng.randint(1, m_max)
    nconst = rng.randint(1, nconst_max)
    schema = Schema("R", k, m)

    def consequent():
        if mode == BUTVPI:
            return rand_tree(rng, m, dmax, 2, [3])
        return rand_utvpi(rng, m, dmax)

    cdcs = tuple(Cdc(rand_x_condition(rng, k, nconst), consequent()) for _ in range(rng.randint(0, max_cdcs)))
    views = []
    for n in range(rng.randint(1, max_views)):
        x = rand_x_condition(rng, k, nconst)
        y = consequent() if rng.random() < 0.6 else None
        if y is None and isinstance(x, logic.Top):
            y = consequent()
        views.append(ViewDef(f"V{n + 1}", x, y))
    return Problem(schema, mode, cdcs, tuple(views))


def _clause(rng, nvars):
    return [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, nvars + 1), 3)]


def rand_3cnf(rng: random.Random, max_vars=8, max_clauses=12) -> tuple[int, list[list[int]]]:
    """Uniform 3-CNF is nearly always satisfiable at this size, so a quarter
    of the draws are dense and a quarter contain all eight sign patterns
    over some three variables (hence unsatisfiable)."""
    kind = rng.random()
    if kind < 0.5:
        nvars = rng.randint(3, max_vars)
        return nvars, [_clause(rng, nvars) for _ in range(rng.randint(1, max_clauses))]
    if kind < 0.75:
        nvars = rng.randint(3, 4)
        return nvars, [_clause(rng, nvars) for _ in range(rng.randint(max_clauses - 2, max_clauses))]
    nvars = rng.randint(3, max_vars)
    vs = rng.sample(range(1, nvars + 1), 3)
    clauses = [[v * sign for v, sign in zip(vs, signs)] for signs in itertools.product((1, -1), repeat=3)]
    clauses += [_clause(rng, nvars) for _ in range(rng.randint(0, max_clauses - 8))]
    rng.shuffle(clauses)
    return nvars, clauses


def close_gaps(rng: random.Random, p: Problem, rounds=3, dmax=2) -> Problem:
    """Add views that select the current lossy witness, so that many
    problems end up lossless with CDCs doing part of the covering."""
    from hdec.decision import check_losslessness

    views = list(p.views)
    mentioned = sorted({a.constant for v in views for a in logic.leaves(v.x_condition)}) or ["a"]
    for n in range(rounds):
        v = check_losslessness(p.schema, views, p.cdcs)
        if v.lossless:
            break
        t = v.witness
        x = logic.TOP
        if p.schema.k and rng.random() < 0.7:
            i = rng.randint(1, p.schema.k)
            if t.x[i - 1] in CONSTANTS:
                x = EqAtom(i, t.x[i - 1])
            else:
                x = EqAtom(i, rng.choice(mentioned), False)
        u = rand_utvpi(rng, p.schema.m, dmax)
        slack = rng.randint(0, 1)
        u = Utvpi.make(u.a, u.i, u.b, u.j, max(u.value(t.beta) + slack, -dmax - 1))
        views.append(ViewDef(f"G{n + 1}", x, u))
    return Problem(p.schema, p.mode, p.cdcs, tuple(views), p.uinds, p.fds)


def rand_case_b(rng: random.Random, dmax=2) -> Problem:
    """Y-UINDs (plus optional X-/YX-FDs) with dp-controllable CDCs."""
    k, m = rng.randint(0, 2), rng.randint(2, 2)
    schema = Schema("R", k, m)
    nconst = rng.randint(1, 2)
    uinds = [make_uind(k + 1, k + 2, schema)] if rng.random() < 0.5 else [make_uind(k + 2, k + 1, schema)]
    cdcs = []
    for _ in range(rng.randint(0, 3)):
        y = rng.randint(1, m)
        cdcs.append(Cdc(logic.TOP, Utvpi.make(rng.choice((-1, 1)), y, 0, None, rng.randint(-dmax, dmax))))
    fds = []
    if k >= 1 and rng.random() < 0.3:
        if k == 2 and rng.random() < 0.5:
            fds.append(Fd(frozenset({1}), frozenset({2})))
        else:
            fds.append(Fd(frozenset({k + 1}), frozenset({1})))
    views = []
    for n in range(rng.randint(1, 3)):
        x = rand_x_condition(rng, k, nconst, 1)
        y = rand_utvpi(rng, m, dmax) if rng.random() < 0.7 else None
        if y is None and isinstance(x, logic.Top):
            y = rand_utvpi(rng, m, dmax)
        views.append(ViewDef(f"V{n + 1}", x, y))
    return Problem(schema, UTVPI, tuple(cdcs), tuple(views), tuple(uinds), tuple(fds))


def rand_case_c(rng: random.Random, dmax=2) -> Problem:
    """X-UINDs only, no FDs; the CDCs may or may not meet the preconditions."""
    k, m = 2, rng.randint(1, 2)
    schema = Schema("R", k, m)
    nconst = rng.randint(1, 2)
    lhs = rng.randint(1, 2)
    uinds = [make_uind(lhs, 3 - lhs, schema)]
    cdcs = tuple(
        Cdc(rand_x_condition(rng, k, nconst, 1), rand_utvpi(rng, m, dmax)) for _ in range(rng.randint(0, 3))
    )
    views = []
    for n in range(rng.randint(1, 3)):
        x = rand_x_condition(rng, k, nconst, 1)
        y = rand_utvpi(rng, m, dmax) if rng.random() < 0.5 else None
        if y is None and isinstance(x, logic.Top):
            y = rand_utvpi(rng, m, dmax)
        views.append(ViewDef(f"V{n + 1}", x, y))
    return Problem(schema, UTVPI, cdcs, tuple(views), tuple(uinds))
