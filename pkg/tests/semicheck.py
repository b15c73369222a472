"""Bounded-instance semi-check of the separability reduction."""

from __future__ import annotations

from generators import close_gaps, rand_case_b, rand_case_c
from hdec.decision import check_losslessness
from hdec.errors import PreconditionViolated
from hdec.model import Instance, view_selects, violations
from hdec.oracle import brute_force_instance_models, default_pool
from hdec.separability import (
    X_UIND_DISJ,
    X_UIND_GC,
    XFD_YXFD_YUIND,
    Y_UIND_DP,
    extend_to_uind_model,
    separability_pipeline,
)

CASE_TAGS = {Y_UIND_DP, XFD_YXFD_YUIND, X_UIND_GC, X_UIND_DISJ}


def semi_check(p, bound=3):
    """(problem description or None, verdict, bounded instances searched)."""
    outcome = separability_pipeline(p)
    v = check_losslessness(p.schema, p.views, outcome.cdcs)
    pool = default_pool(p.schema, [c.antecedent for c in p.cdcs] + [w.x_condition for w in p.views])
    if v.lossless:
        n = 0
        for inst in brute_force_instance_models(p, 2, pool, bound):
            n += 1
            for t in inst.rows:
                if not any(view_selects(w, t) for w in p.views):
                    return f"lossless verdict contradicted by {sorted(inst.rows)}", "lossless", n
        return None, "lossless", n
    try:
        model = extend_to_uind_model(Instance(frozenset([v.witness])), outcome.cdcs, outcome.uinds, p.schema)
    except PreconditionViolated as e:
        return f"extension of {v.witness} impossible: {e}", "lossy", 0
    broken = violations(p, model)
    if broken or v.witness not in model.rows or any(view_selects(w, v.witness) for w in p.views):
        return f"extension of {v.witness} fails: {broken}", "lossy", 0
    return None, "lossy", 0


def separable_problems(rng, n):
    out = []
    while len(out) < n:
        p = rand_case_b(rng) if len(out) % 2 == 0 else rand_case_c(rng)
        outcome = separability_pipeline(p)
        if outcome.reduced and outcome.tag in CASE_TAGS:
            out.append(close_gaps(rng, p) if rng.random() < 0.6 else p)
    return out
