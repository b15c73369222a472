"""Satisfiability of finite sets of C-formulae over the integers.

UTVPI sets are decided with the doubled-variable difference graph: every
variable ``y`` gets a node for ``+y`` and one for ``-y`` and each atom
becomes two edges.  Shortest-path closure detects rational infeasibility
(a negative cycle); tightening the unary bounds to even numbers and
strengthening through them makes the check exact over the integers.
Every matrix entry carries the bitmask of atoms its path was built from,
which yields the unsat core for free.

BUTVPI sets go through a small DPLL search over the Tseitin encoding of
the Boolean skeleton, calling the UTVPI procedure on the asserted atoms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from hdec import logic
from hdec.cformula import CFormula, Utvpi, UtvpiConj, atoms_of, holds, is_conjunctive
from hdec.errors import ResourceLimit

INF = math.inf
DEFAULT_BUDGET = 10**6


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    model: Optional[dict] = None
    core: Optional[tuple] = None

    @classmethod
    def sat(cls, model: Mapping[int, int]) -> "SatResult":
        return cls(True, dict(sorted(model.items())), None)

    @classmethod
    def unsat(cls, core: Iterable) -> "SatResult":
        return cls(False, None, tuple(core))

    def __bool__(self) -> bool:
        return self.satisfiable


def check_model(formulas: Iterable[CFormula], beta: Mapping[int, int]) -> bool:
    return all(holds(f, beta) for f in formulas)


class _Octagon:
    """Difference-bound matrix over signed nodes; ``2*t`` is ``+y`` and
    ``2*t + 1`` is ``-y`` for the ``t``-th variable.  ``dist[s][t] = w``
    reads ``val(t) - val(s) <= w``."""

    def __init__(self, nvars: int):
        n = 2 * nvars
        self.n = n
        self.dist = [[0 if i == j else INF for j in range(n)] for i in range(n)]
        self.prov = [[0] * n for _ in range(n)]

    def add_edge(self, s: int, t: int, w: int, mask: int = 0) -> None:
        if w < self.dist[s][t]:
            self.dist[s][t] = w
            self.prov[s][t] = mask

    def add_atom(self, u: Utvpi, index: Mapping[int, int], mask: int = 0) -> None:
        p = 2 * index[u.i] + (0 if u.a > 0 else 1)
        if u.j is None:
            self.add_edge(p ^ 1, p, 2 * u.d, mask)
            return
        q = 2 * index[u.j] + (0 if u.b > 0 else 1)
        self.add_edge(q ^ 1, p, u.d, mask)
        self.add_edge(p ^ 1, q, u.d, mask)

    def close(self) -> None:
        d, pv, n = self.dist, self.prov, self.n
        for k in range(n):
            dk, pk = d[k], pv[k]
            for i in range(n):
                dik = d[i][k]
                if dik == INF:
                    continue
                di, pi, pik = d[i], pv[i], pv[i][k]
                for j in range(n):
                    w = dik + dk[j]
                    if w < di[j]:
                        di[j] = w
                        pi[j] = pik | pk[j]

    def insert_edge(self, s: int, t: int, w: int) -> None:
        """Add one edge to an already closed matrix, keeping it closed."""
        d, n = self.dist, self.n
        if w >= d[s][t]:
            return
        col_s = [d[i][s] for i in range(n)]
        row_t = d[t]
        row_t = list(row_t)
        for i in range(n):
            if col_s[i] == INF:
                continue
            base = col_s[i] + w
            di = d[i]
            for j in range(n):
                v = base + row_t[j]
                if v < di[j]:
                    di[j] = v

    def negative_cycle(self) -> Optional[int]:
        for i in range(self.n):
            if self.dist[i][i] < 0:
                return self.prov[i][i]
        return None

    def tighten(self) -> Optional[int]:
        """Round unary bounds to even values; return a conflict mask or None."""
        d, pv = self.dist, self.prov
        for i in range(self.n):
            w = d[i ^ 1][i]
            if w != INF and w % 2:
                d[i ^ 1][i] = w - 1
        for i in range(0, self.n, 2):
            if d[i ^ 1][i] + d[i][i ^ 1] < 0:
                return pv[i ^ 1][i] | pv[i][i ^ 1]
        return None

    def strengthen(self) -> None:
        d, pv, n = self.dist, self.prov, self.n
        for i in range(n):
            ui = d[i][i ^ 1]
            if ui == INF:
                continue
            for j in range(n):
                uj = d[j ^ 1][j]
                if uj == INF:
                    continue
                w = (ui + uj) // 2
                if w < d[i][j]:
                    d[i][j] = w
                    pv[i][j] = pv[i][i ^ 1] | pv[j ^ 1][j]

    def tight_close(self) -> Optional[int]:
        self.close()
        conflict = self.negative_cycle()
        if conflict is not None:
            return conflict
        conflict = self.tighten()
        if conflict is not None:
            return conflict
        self.strengthen()
        return None

    def bounds(self, t: int) -> tuple[float, float]:
        p = 2 * t
        hi = self.dist[p ^ 1][p]
        lo = self.dist[p][p ^ 1]
        return (-lo / 2 if lo != INF else -INF), (hi / 2 if hi != INF else INF)


def _mask_items(mask: int, items: Sequence) -> tuple:
    return tuple(items[b] for b in range(len(items)) if mask >> b & 1)


def utvpi_sat(atoms: Iterable[Utvpi]) -> SatResult:
    atoms = list(dict.fromkeys(atoms))
    for u in atoms:
        if u.is_const and u.d < 0:
            return SatResult.unsat((u,))
    live = [u for u in atoms if not u.is_const]
    variables = sorted({v for u in live for v in u.variables})
    index = {v: t for t, v in enumerate(variables)}
    oct_ = _Octagon(len(variables))
    for b, u in enumerate(live):
        oct_.add_atom(u, index, 1 << b)
    conflict = oct_.tight_close()
    if conflict is not None:
        return SatResult.unsat(_mask_items(conflict, live))

    model: dict[int, int] = {}
    for t, v in enumerate(variables):
        lo, hi = oct_.bounds(t)
        if lo > hi:
            raise RuntimeError(f"tight closure left an empty range for y{v}")
        if lo <= 0 <= hi:
            c = 0
        else:
            c = int(lo) if lo > 0 else int(hi)
        model[v] = c
        p = 2 * t
        oct_.insert_edge(p ^ 1, p, 2 * c)
        oct_.insert_edge(p, p ^ 1, -2 * c)
        if oct_.negative_cycle() is not None or oct_.tighten() is not None:
            raise RuntimeError(f"fixing y{v} = {c} made a tightly closed system infeasible")
        oct_.strengthen()
    return SatResult.sat(model)


# BUTVPI ----------------------------------------------------------------------


class _Tseitin:
    def __init__(self) -> None:
        self.clauses: list[list[int]] = []
        self.atom_var: dict[Utvpi, int] = {}
        self.var_atom: dict[int, Utvpi] = {}
        self.nvars = 0

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def atom_lit(self, u: Utvpi) -> int:
        key = min(u, u.negate())
        sign = 1 if key == u else -1
        if key not in self.atom_var:
            v = self.fresh()
            self.atom_var[key] = v
            self.var_atom[v] = key
        return sign * self.atom_var[key]

    def encode(self, f) -> int:
        if isinstance(f, Utvpi):
            if f.is_const:
                v = self.fresh()
                self.clauses.append([v] if f.d >= 0 else [-v])
                return v
            return self.atom_lit(f)
        if isinstance(f, UtvpiConj):
            return self.encode(logic.conj(*f.atoms) if f.atoms else Utvpi.const(0))
        if isinstance(f, logic.Top):
            return self.encode(Utvpi.const(0))
        if isinstance(f, logic.Not):
            return -self.encode(f.arg)
        subs = [self.encode(a) for a in f.args]
        v = self.fresh()
        if isinstance(f, logic.And):
            for s in subs:
                self.clauses.append([-v, s])
            self.clauses.append([v] + [-s for s in subs])
        else:
            for s in subs:
                self.clauses.append([v, -s])
            self.clauses.append([-v] + subs)
        return v


def butvpi_sat(formulas: Iterable[CFormula], budget: int = DEFAULT_BUDGET) -> SatResult:
    formulas = list(formulas)
    enc = _Tseitin()
    for f in formulas:
        enc.clauses.append([enc.encode(f)])
    clauses = enc.clauses
    nodes = 0

    def propagate(assign: dict[int, bool]) -> Optional[dict[int, bool]]:
        changed = True
        while changed:
            changed = False
            for cl in clauses:
                unassigned = None
                count = 0
                sat = False
                for lit in cl:
                    val = assign.get(abs(lit))
                    if val is None:
                        count += 1
                        unassigned = lit
                    elif val == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if count == 0:
                    return None
                if count == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    changed = True
        return assign

    def theory_literals(assign: dict[int, bool]) -> list[Utvpi]:
        out = []
        for v, u in enc.var_atom.items():
            val = assign.get(v)
            if val is not None:
                out.append(u if val else u.negate())
        return out

    def search(assign: dict[int, bool]) -> Optional[dict[int, int]]:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise ResourceLimit(f"BUTVPI search exceeded {budget} nodes")
        assign = propagate(assign)
        if assign is None:
            return None
        theory = utvpi_sat(theory_literals(assign))
        if not theory:
            return None
        branch = None
        for cl in clauses:
            if any(assign.get(abs(lit)) == (lit > 0) for lit in cl):
                continue
            branch = next(abs(lit) for lit in cl if abs(lit) not in assign)
            break
        if branch is None:
            return theory.model
        for val in (True, False):
            found = search({**assign, branch: val})
            if found is not None:
                return found
        return None

    model = search({})
    if model is None:
        return SatResult.unsat(formulas)
    return SatResult.sat(model)


def solve(formulas: Iterable[CFormula], budget: int = DEFAULT_BUDGET) -> SatResult:
    """Decide a set of C-formulae, picking the UTVPI procedure when the set
    is a plain conjunction of atoms."""
    formulas = list(formulas)
    if all(is_conjunctive(f) for f in formulas):
        atoms = [u for f in formulas for u in atoms_of(f)]
        return utvpi_sat(atoms)
    return butvpi_sat(formulas, budget)


def small_model_bound(formulas: Iterable[CFormula]) -> int:
    """Half-width of a box guaranteed to contain a model of any satisfiable
    UTVPI set built from these formulae (or their negations)."""
    formulas = list(formulas)
    atoms = [u for f in formulas for u in atoms_of(f)]
    nvars = len({v for u in atoms for v in u.variables})
    d = max((abs(u.d) for u in atoms), default=0)
    if not all(is_conjunctive(f) for f in formulas):
        d += 1  # negated leaves move the bound by one
    return (nvars + 1) * (d + 1)
