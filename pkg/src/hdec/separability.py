"""Reduce CDCs plus FDs and UINDs to CDCs alone, when a known theorem allows.

The pipeline only accepts combinations for which dropping the FDs and
UINDs (after closing the CDCs under domain propagation) provably leaves
every losslessness verdict unchanged; everything else is reported as
unsupported with the first precondition that failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from hdec import cformula, logic
from hdec.decision import Check, check_global_consistency
from hdec.errors import MixedFd, NotDpControllable, PreconditionViolated
from hdec.model import (
    X_UIND,
    Y_FD,
    XY_FD,
    Y_UIND,
    Cdc,
    Instance,
    Problem,
    Schema,
    Tuple,
    Uind,
    beta_tuple,
    cdc_holds,
    classify_fd,
    eval_bool_expr,
    uind_holds,
)
from hdec.solver import DEFAULT_BUDGET, solve

FD_ONLY = "FD-only"
Y_UIND_DP = "Y-UIND-dp"
X_UIND_GC = "X-UIND-gc"
X_UIND_DISJ = "X-UIND-disj"
UIND_GC = "UIND-gc"
UIND_DISJ = "UIND-disj"
XFD_YXFD_YUIND = "XFD-YXFD-YUIND"


@dataclass(frozen=True)
class SeparabilityOutcome:
    reduced: bool
    cdcs: tuple[Cdc, ...] = ()
    tag: Optional[str] = None
    reason: Optional[str] = None
    log: tuple[str, ...] = ()
    uinds: tuple[Uind, ...] = ()
    gc_failure: Optional[Check] = field(default=None, compare=False)


def _yvar(u_pos: int, schema: Schema) -> int:
    return u_pos - schema.k


def _unary_top(c: Cdc, y: int) -> bool:
    return isinstance(c.antecedent, logic.Top) and cformula.variables(c.consequent) <= {y}


def check_dp_controllable(
    cdcs: Sequence[Cdc], yuinds: Sequence[Uind], schema: Schema
) -> tuple[bool, Optional[tuple[Uind, Cdc]]]:
    """Every CDC mentioning a y-variable touched by a Y-UIND must read
    ``top -> delta(y)``.  Returns the first offending (UIND, CDC) pair."""
    for u in yuinds:
        if u.lhs == u.rhs:
            continue
        for y in (_yvar(u.lhs, schema), _yvar(u.rhs, schema)):
            for c in cdcs:
                if y in cformula.variables(c.consequent) and not _unary_top(c, y):
                    return False, (u, c)
    return True, None


def dp_closure(cdcs: Sequence[Cdc], yuinds: Sequence[Uind], schema: Schema) -> list[Cdc]:
    """Close under: from ``top -> delta(y_i)`` and ``R[y_j] <= R[y_i]``
    derive ``top -> delta(y_j)``."""
    ok, bad = check_dp_controllable(cdcs, yuinds, schema)
    if not ok:
        u, c = bad
        raise NotDpControllable(f"{u.label(schema)} with CDC {c}")
    out = list(dict.fromkeys(cdcs))
    seen = set(out)
    todo = list(out)
    while todo:
        c = todo.pop(0)
        vs = cformula.variables(c.consequent)
        if not isinstance(c.antecedent, logic.Top) or len(vs) != 1:
            continue
        (yi,) = vs
        for u in yuinds:
            if u.lhs == u.rhs or _yvar(u.rhs, schema) != yi:
                continue
            yj = _yvar(u.lhs, schema)
            derived = Cdc(logic.TOP, cformula.rename(c.consequent, {yi: yj}))
            if derived not in seen:
                seen.add(derived)
                out.append(derived)
                todo.append(derived)
    return out


def _grouped(cdcs: Sequence[Cdc]) -> list[tuple[object, list]]:
    """CDCs sharing an antecedent, merged into one consequent set.  Split
    conjunctions come back together this way, so ``x = a -> y1 = 0`` is
    not mistaken for two CDCs sharing ``y1``."""
    groups: dict[object, list] = {}
    for c in cdcs:
        groups.setdefault(c.antecedent, []).append(c.consequent)
    return list(groups.items())


def check_disjoint(
    cdcs: Sequence[Cdc], xuind: Uind, schema: Schema, budget: int = DEFAULT_BUDGET
) -> tuple[bool, Optional[str]]:
    j = xuind.rhs
    groups = _grouped(cdcs)
    for n, (ante, cons) in enumerate(groups):
        if not any(a.position == j for a in logic.leaves(ante)):
            continue
        if not solve(cons, budget):
            return False, f"the CDCs on {ante} have an unsatisfiable consequent"
        mine = set().union(*(cformula.variables(f) for f in cons))
        for m, (other, ocons) in enumerate(groups):
            if m == n:
                continue
            shared = mine & set().union(*(cformula.variables(f) for f in ocons))
            if shared:
                names = ", ".join(f"y{v}" for v in sorted(shared))
                return False, f"CDCs on {ante} and on {other} share {names}"
    return True, None


def _unsupported(reason: str, log: list[str], gc: Optional[Check] = None) -> SeparabilityOutcome:
    return SeparabilityOutcome(False, reason=reason, log=tuple(log), gc_failure=gc)


def separability_pipeline(
    problem: Problem, *, budget: int = DEFAULT_BUDGET, parallel: int = 1
) -> SeparabilityOutcome:
    schema = problem.schema
    log: list[str] = []
    uinds = []
    for u in problem.uinds:
        if u.lhs == u.rhs:
            log.append(f"dropped trivial {u.label(schema)}")
        else:
            uinds.append(u)
    xu = [u for u in uinds if u.kind == X_UIND]
    yu = [u for u in uinds if u.kind == Y_UIND]
    fd_kinds = []
    for fd in problem.fds:
        try:
            fd_kinds.append(classify_fd(fd, schema))
        except MixedFd as e:
            return _unsupported(str(e), log)
    cdcs = list(problem.cdcs)

    if not uinds:
        if problem.fds:
            log.append(f"dropped {len(problem.fds)} FD(s)")
        return SeparabilityOutcome(True, tuple(cdcs), FD_ONLY, log=tuple(log))

    if xu and problem.fds:
        kind = Y_FD if Y_FD in fd_kinds else fd_kinds[0]
        return _unsupported(f"{kind} with X-UIND", log)
    bad_fd = next((k for k in fd_kinds if k in (Y_FD, XY_FD)), None)
    if bad_fd:
        return _unsupported(f"{bad_fd} with Y-UIND", log)

    if yu:
        ok, bad = check_dp_controllable(cdcs, yu, schema)
        if not ok:
            u, c = bad
            return _unsupported(f"not dp-controllable: {u.label(schema)} with CDC {c}", log)
        before = len(cdcs)
        cdcs = dp_closure(cdcs, yu, schema)
        log.append(f"dp closure added {len(cdcs) - before} CDC(s)")
        if not xu:
            tag = XFD_YXFD_YUIND if problem.fds else Y_UIND_DP
            return SeparabilityOutcome(True, tuple(cdcs), tag, log=tuple(log), uinds=tuple(uinds))

    disjoint, why = True, None
    for u in xu:
        disjoint, why = check_disjoint(cdcs, u, schema, budget)
        if not disjoint:
            break
    log.append("disjoint w.r.t. every X-UIND" if disjoint else f"not disjoint: {why}")
    gc = check_global_consistency(schema, cdcs, budget=budget, parallel=parallel)
    if gc.globally_consistent:
        log.append("globally consistent")
    else:
        log.append(f"not globally consistent at {gc.check.valuation}")
    if not disjoint and not gc.globally_consistent:
        return _unsupported("X-UIND present; CDCs neither globally consistent nor disjoint", log, gc.check)
    if yu:
        tag = UIND_DISJ if disjoint else UIND_GC
    else:
        tag = X_UIND_DISJ if disjoint else X_UIND_GC
    return SeparabilityOutcome(True, tuple(cdcs), tag, log=tuple(log), uinds=tuple(uinds), gc_failure=gc.check)


# Model extension --------------------------------------------------------------


def _resolve_y(x: tuple, template: Tuple, cdcs: Sequence[Cdc], schema: Schema, budget: int) -> tuple:
    """Interpreted values for a tuple with x-part ``x``: the template's own
    when they already work, otherwise a solver model of the applicable CDCs."""
    candidate = Tuple(x, template.y)
    if all(cdc_holds(c, candidate) for c in cdcs):
        return template.y
    active = [c.consequent for c in cdcs if eval_bool_expr(c.antecedent, candidate)]
    res = solve(active, budget)
    if not res:
        raise PreconditionViolated(f"no interpreted values satisfy the CDCs applying to {x}")
    return beta_tuple(res.model, schema.m)


def _first_violation(rows: set, u: Uind):
    lhs = {t.value(u.lhs) for t in rows}
    rhs = {t.value(u.rhs) for t in rows}
    missing = sorted(lhs - rhs, key=repr)
    if not missing:
        return None
    v = missing[0]
    source = min(t for t in rows if t.value(u.lhs) == v)
    return v, source


def extend_to_uind_model(
    instance: Instance,
    cdcs: Sequence[Cdc],
    uinds: Sequence[Uind],
    schema: Schema,
    *,
    budget: int = DEFAULT_BUDGET,
) -> Instance:
    """Add tuples to ``instance`` until every UIND holds, keeping the CDCs.

    X-UINDs first: copy the missing constant into the target column and
    pick interpreted values that satisfy the CDCs now applying.  Then
    Y-UINDs: copy the missing integer into the target column.
    """
    rows = set(instance.rows)
    for t in rows:
        for c in cdcs:
            if not cdc_holds(c, t):
                raise PreconditionViolated(f"{t} violates CDC {c}")
    xu = [u for u in uinds if u.kind == X_UIND and u.lhs != u.rhs]
    yu = [u for u in uinds if u.kind == Y_UIND and u.lhs != u.rhs]
    # Each repair settles one (UIND, value) pair for good and draws its
    # value from the active domain, so both loops terminate.
    changed = True
    while changed:
        changed = False
        for u in xu:
            hit = _first_violation(rows, u)
            if hit is None:
                continue
            a, t = hit
            x = list(t.x)
            x[u.rhs - 1] = a
            x = tuple(x)
            rows.add(Tuple(x, _resolve_y(x, t, cdcs, schema, budget)))
            changed = True
            break

    changed = True
    while changed:
        changed = False
        for u in yu:
            hit = _first_violation(rows, u)
            if hit is None:
                continue
            d, t = hit
            y = list(t.y)
            y[_yvar(u.rhs, schema) - 1] = d
            new = Tuple(t.x, tuple(y))
            if not all(cdc_holds(c, new) for c in cdcs):
                raise PreconditionViolated(f"copying {d} into {schema.position_name(u.rhs)} breaks a CDC")
            rows.add(new)
            changed = True
            break

    out = Instance(frozenset(rows))
    assert all(uind_holds(u, out.rows) for u in xu + yu)
    return out
