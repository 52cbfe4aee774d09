"""Deterministic anytime branch-and-bound over the 0/1 encoding.

The search dives depth-first over the canonical (chronological) column
order, branching 1-before-0, with integer bound propagation and
combinatorial admissible bounds. Everything is exact rational arithmetic:
two solver instances given identical inputs return bit-identical results,
which is the property the distributed planning cycle relies on.

Storage-flag (D) columns are never branched: once every X and C column is
decided, propagation has fixed each D that matters and the rest complete to
0, which is always row-feasible and objective-neutral.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from . import lp
from .encoder import IlpInstance, assignment_from_schedule, check_assignment, decode
from .model import Schedule, frac
from .oracle import TooLarge, brute_force  # noqa: F401  (solving surface includes the oracle)

NEG_INF = float("-inf")


class _Conflict:
    def __repr__(self):
        return "CONFLICT"


CONFLICT = _Conflict()


class InfeasibleSeed(ValueError):
    """The warm-start schedule violates the instance."""


@dataclass(frozen=True)
class SolveBudget:
    """Deterministic stopping criterion: a fixed number of search nodes."""

    max_nodes: int
    wall_clock_s: float | None = None  # reporting only, never affects search

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("budget must allow at least one node")


@dataclass(frozen=True)
class SolveResult:
    incumbent: Schedule
    incumbent_value: Fraction
    best_bound: Fraction
    status: str  # "optimal" | "budget_exhausted" | "infeasible_proven"
    nodes_explored: int

    def to_text(self, p=None) -> str:
        lines = [
            "RESULT v1",
            f"status {self.status}",
            f"value {self.incumbent_value}",
            f"bound {self.best_bound}",
            f"nodes {self.nodes_explored}",
        ]
        return "\n".join(lines) + "\n" + self.incumbent.to_text(p)


class _Search:
    """Trail-based propagation state shared by solve/propagate/bound."""

    def __init__(self, inst: IlpInstance):
        self.inst = inst
        meta = inst.meta
        self.weights = meta.objective.weight_vector() if meta.objective else None
        n = len(inst.variables)
        self.is_binary = [v.kind == "binary" for v in inst.variables]
        self.state = [-1] * n
        for col, v in enumerate(inst.variables):
            if self.is_binary[col] and v.lb == v.ub:
                self.state[col] = int(v.lb)

        self.row_cols: list[list[int]] = []
        self.row_coefs: list[list[int]] = []
        self.row_eq: list[bool] = []
        self.row_rhs: list[int] = []
        self.col_adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # col -> (row, coef)
        m = len(inst.rows)
        self.amin: list = [0] * m
        self.amax: list = [0] * m
        for ri, row in enumerate(inst.rows):
            cols, coefs = [], []
            lo = hi = 0
            for col, a in row.coeffs:
                if self.is_binary[col]:
                    cols.append(col)
                    coefs.append(a)
                    self.col_adj[col].append((ri, a))
                    s = self.state[col]
                    if s == -1:
                        lo += min(0, a)
                        hi += max(0, a)
                    else:
                        lo += a * s
                        hi += a * s
                else:
                    v = inst.variables[col]
                    lo += min(a * v.lb, a * v.ub)
                    hi += max(a * v.lb, a * v.ub)
            self.row_cols.append(cols)
            self.row_coefs.append(coefs)
            self.row_eq.append(row.sense == "=")
            self.row_rhs.append(row.rhs)
            self.amin[ri] = lo
            self.amax[ri] = hi

        self.trail: list[int] = []
        self.queue: deque[int] = deque(range(m))
        self.in_queue = bytearray([1]) * m

        self.obj = dict(inst.objective)
        self.x_by_task: dict[int, list[tuple[int, int, Fraction]]] = {}
        self.x_info: dict[int, tuple[int, int, Fraction]] = {}
        for (ai, ti, k), col in inst.x_index.items():
            completion = k + meta.durations[ai][ti]
            energy = meta.energies[ai][ti]
            self.x_by_task.setdefault(ti, []).append((col, completion, energy))
            self.x_info[col] = (ti, completion, energy)
        self.c_energy: dict[int, Fraction] = {}
        if meta.comm_energy_per_bit > 0 and not meta.interference_mode:
            for (ai, aj, ti, k), col in inst.c_index.items():
                bits = meta.link_bits.get((ai, aj, k), Fraction(0))
                if ai != aj and bits > 0:
                    self.c_energy[col] = meta.comm_energy_per_bit * bits
        self.alive_x = {ti: len(cols) for ti, cols in self.x_by_task.items()}
        self.placed: dict[int, int | None] = {ti: None for ti in self.x_by_task}
        self.sum_reward = Fraction(0)
        self.sum_energy = Fraction(0)
        self.max_completion = 0
        self.optional = sorted(
            ti for ti in self.x_by_task if ti not in meta.required and meta.rewards[ti] > 0
        )
        self.required_open = sorted(meta.required - meta.done)

    # -- state updates ----------------------------------------------------

    def fix(self, col: int, value: int) -> bool:
        s = self.state[col]
        if s != -1:
            return s == value
        self.state[col] = value
        self.trail.append(col)
        for ri, a in self.col_adj[col]:
            lo, hi = min(0, a), max(0, a)
            contrib = a * value
            self.amin[ri] += contrib - lo
            self.amax[ri] += contrib - hi
            if not self.in_queue[ri]:
                self.in_queue[ri] = 1
                self.queue.append(ri)
        info = self.x_info.get(col)
        if value == 1:
            if info is not None:
                ti, completion, energy = info
                self.placed[ti] = col
                self.sum_reward += self.inst.meta.rewards[ti]
                self.sum_energy += energy
                if completion > self.max_completion:
                    self.max_completion = completion
            ce = self.c_energy.get(col)
            if ce:
                self.sum_energy += ce
        elif info is not None:
            self.alive_x[info[0]] -= 1
        return True

    def undo_to(self, mark: int):
        while len(self.trail) > mark:
            col = self.trail.pop()
            value = self.state[col]
            self.state[col] = -1
            for ri, a in self.col_adj[col]:
                lo, hi = min(0, a), max(0, a)
                contrib = a * value
                self.amin[ri] -= contrib - lo
                self.amax[ri] -= contrib - hi
            info = self.x_info.get(col)
            if value == 1:
                if info is not None:
                    ti, _, energy = info
                    self.placed[ti] = None
                    self.sum_reward -= self.inst.meta.rewards[ti]
                    self.sum_energy -= energy
                ce = self.c_energy.get(col)
                if ce:
                    self.sum_energy -= ce
            elif info is not None:
                self.alive_x[info[0]] += 1
        self.queue.clear()
        self.in_queue = bytearray(len(self.in_queue))
        self.max_completion = 0
        for ti, col in self.placed.items():
            if col is not None and self.x_info[col][1] > self.max_completion:
                self.max_completion = self.x_info[col][1]

    def propagate_pending(self) -> bool:
        while self.queue:
            ri = self.queue.popleft()
            self.in_queue[ri] = 0
            if not self._propagate_row(ri):
                return False
        return True

    def _propagate_row(self, ri: int) -> bool:
        rhs = self.row_rhs[ri]
        amin = self.amin[ri]
        amax = self.amax[ri]
        eq = self.row_eq[ri]
        if amin > rhs or (eq and amax < rhs):
            return False
        if amax <= rhs and not eq:
            return True  # row satisfied whatever happens
        cols, coefs = self.row_cols[ri], self.row_coefs[ri]
        state = self.state
        for idx in range(len(cols)):
            col = cols[idx]
            if state[col] != -1:
                continue
            a = coefs[idx]
            if a > 0:
                if amin + a > rhs:
                    if not self.fix(col, 0):
                        return False
                    amin = self.amin[ri]
                    amax = self.amax[ri]
                elif eq and amax - a < rhs:
                    if not self.fix(col, 1):
                        return False
                    amin = self.amin[ri]
                    amax = self.amax[ri]
            else:
                if eq and amax + a < rhs:
                    if not self.fix(col, 0):
                        return False
                    amin = self.amin[ri]
                    amax = self.amax[ri]
                elif amin - a > rhs:
                    if not self.fix(col, 1):
                        return False
                    amin = self.amin[ri]
                    amax = self.amax[ri]
        return True

    # -- bound ------------------------------------------------------------

    def bound(self):
        """Admissible upper bound on any completion of the current fixing."""
        meta = self.inst.meta
        w = self.weights
        total = Fraction(0)
        if w["reward"] > 0:
            rew = self.sum_reward
            for ti in self.optional:
                if self.placed[ti] is None and self.alive_x[ti] > 0:
                    rew += meta.rewards[ti]
            total += w["reward"] * rew
        if w["energy"] > 0:
            energy = self.sum_energy
            for ti in self.required_open:
                if self.placed.get(ti) is None:
                    best = None
                    for col, _, e in self.x_by_task.get(ti, ()):
                        if self.state[col] != 0 and (best is None or e < best):
                            best = e
                    if best is None:
                        return NEG_INF
                    energy += best
            total -= w["energy"] * energy
        if w["makespan"] > 0:
            horizon = self.max_completion
            for ti in self.required_open:
                if self.placed.get(ti) is None:
                    best = None
                    for col, completion, _ in self.x_by_task.get(ti, ()):
                        if self.state[col] != 0 and (best is None or completion < best):
                            best = completion
                    if best is None:
                        return NEG_INF
                    horizon = max(horizon, best)
            total -= w["makespan"] * horizon
        return total

    # -- leaves -----------------------------------------------------------

    def leaf_assignment(self) -> dict[int, Fraction] | None:
        """Complete a fully-branched node into an exact assignment."""
        inst = self.inst
        values: dict[int, Fraction] = {}
        for col in range(len(inst.variables)):
            if self.is_binary[col]:
                values[col] = Fraction(1) if self.state[col] == 1 else Fraction(0)
        if inst.z_col is not None:
            values[inst.z_col] = Fraction(self.max_completion)
        if inst.meta.interference_mode:
            if not self._complete_r(values):
                return None
        if check_assignment(inst, values, tol=Fraction(0)):
            return None
        return values

    def _complete_r(self, values: dict[int, Fraction]) -> bool:
        """Pick bit-flow values for active transfer steps via the exact LP."""
        inst = self.inst
        active = [
            col
            for (ai, aj, ti, k), col in sorted(inst.r_index.items(), key=lambda kv: kv[1])
            if values.get(inst.c_index[(ai, aj, ti, k)]) == 1 and inst.variables[col].ub > 0
        ]
        var_of = {col: i for i, col in enumerate(active)}
        for col, v in enumerate(inst.variables):
            if v.kind == "continuous" and col != inst.z_col and col not in var_of:
                values[col] = Fraction(0)
        cons = []
        for col in active:
            cons.append(({var_of[col]: Fraction(1)}, lp.LE, inst.variables[col].ub))
        for row in inst.rows:
            rcols = [(c, a) for c, a in row.coeffs if c in var_of]
            if not rcols:
                continue
            const = sum(
                (Fraction(a) * values.get(c, Fraction(0)) for c, a in row.coeffs if c not in var_of),
                Fraction(0),
            )
            coeffs = {var_of[c]: Fraction(a) for c, a in rcols}
            sense = lp.EQ if row.sense == "=" else lp.LE
            cons.append((coeffs, sense, Fraction(row.rhs) - const))
        minimize = {var_of[c]: -self.obj[c] for c in active if self.obj.get(c)} or None
        sol = lp.solve_lp(len(active), cons, minimize=minimize)
        if sol is None:
            return False
        for col, v in zip(active, sol):
            values[col] = v
        return True

    def value_of(self, values: Mapping[int, Fraction]) -> Fraction:
        return sum(
            (coef * values.get(col, Fraction(0)) for col, coef in self.obj.items()),
            Fraction(0),
        )


@dataclass
class _Level:
    col: int
    mark: int
    parent_bound: object
    scan_from: int
    pending0: bool = True


def _strip_idle_transfers(inst: IlpInstance, values: dict[int, Fraction]) -> dict[int, Fraction]:
    """Zero objective-neutral transfer steps that no row needs.

    The 1-before-0 dive can leave transfers that deliver nothing anybody
    uses; dropping them keeps the assignment feasible and the value exact,
    and makes decoded schedules canonical. Deterministic greedy pass in
    column order.
    """
    rows_of: dict[int, list[int]] = {}
    for ri, row in enumerate(inst.rows):
        for col, _ in row.coeffs:
            rows_of.setdefault(col, []).append(ri)

    def row_ok(ri: int) -> bool:
        row = inst.rows[ri]
        act = sum(a * values.get(col, Fraction(0)) for col, a in row.coeffs)
        return act == row.rhs if row.sense == "=" else act <= row.rhs

    order = sorted(inst.c_index.items(), key=lambda kv: kv[1])
    for (ai, aj, ti, k), col in order:
        if not values.get(col) or inst.objective.get(col):
            continue
        rcol = inst.r_index.get((ai, aj, ti, k))
        saved_r = None
        if rcol is not None:
            if inst.objective.get(rcol):
                continue
            saved_r = values.get(rcol, Fraction(0))
            values[rcol] = Fraction(0)
        values[col] = Fraction(0)
        affected = rows_of.get(col, []) + (rows_of.get(rcol, []) if rcol is not None else [])
        if not all(row_ok(ri) for ri in affected):
            values[col] = Fraction(1)
            if rcol is not None:
                values[rcol] = saved_r
    return values


def solve(inst: IlpInstance, seed: Schedule, budget: SolveBudget) -> SolveResult:
    """Anytime exact search, warm-started with a feasible schedule.

    The result is a pure function of (inst, seed, budget): tree policy,
    tie-breaks, and the stopping rule are all deterministic.
    """
    seed_assignment = assignment_from_schedule(inst, seed)
    errors = check_assignment(inst, seed_assignment, tol=Fraction(0))
    if errors:
        raise InfeasibleSeed("; ".join(errors[:5]))

    search = _Search(inst)
    inc_values = {col: frac(v) for col, v in seed_assignment.items()}
    inc_value = search.value_of(inc_values)

    levels: list[_Level] = []
    nodes = 0
    status = "optimal"
    branch_cols = inst.branch_cols

    def next_undecided(start: int):
        for idx in range(start, len(branch_cols)):
            if search.state[branch_cols[idx]] == -1:
                return idx
        return None

    scan_from = 0
    while True:
        if nodes >= budget.max_nodes:
            status = "budget_exhausted"
            break
        nodes += 1
        descend = False
        if search.propagate_pending():
            b = search.bound()
            if b > inc_value:
                idx = next_undecided(scan_from)
                if idx is None:
                    values = search.leaf_assignment()
                    if values is not None:
                        v = search.value_of(values)
                        if v > inc_value:
                            inc_value = v
                            inc_values = values
                else:
                    col = branch_cols[idx]
                    levels.append(_Level(col, len(search.trail), b, scan_from))
                    search.fix(col, 1)
                    scan_from = idx
                    descend = True
        if descend:
            continue
        while levels:
            lev = levels[-1]
            search.undo_to(lev.mark)
            if lev.pending0:
                lev.pending0 = False
                search.fix(lev.col, 0)
                scan_from = lev.scan_from
                break
            levels.pop()
        else:
            break

    if status == "optimal" or not levels:
        best_bound = inc_value
    else:
        best_bound = inc_value
        for lev in levels:
            if lev.parent_bound != NEG_INF and lev.parent_bound > best_bound:
                best_bound = lev.parent_bound

    inc_values = _strip_idle_transfers(inst, dict(inc_values))
    incumbent = decode(None, inst, inc_values)
    return SolveResult(
        incumbent=incumbent,
        incumbent_value=inc_value,
        best_bound=frac(best_bound),
        status=status,
        nodes_explored=nodes,
    )


def propagate(inst: IlpInstance, fixing: Mapping[int, int]):
    """Fixpoint of bound propagation from a partial fixing, or CONFLICT.

    The returned mapping covers every binary column decided so far,
    including the ones given in `fixing`.
    """
    search = _Search(inst)
    for col in sorted(fixing):
        if not search.fix(col, int(fixing[col])):
            return CONFLICT
    if not search.propagate_pending():
        return CONFLICT
    return {
        col: search.state[col]
        for col in range(len(inst.variables))
        if search.is_binary[col] and search.state[col] != -1
    }


def bound(inst: IlpInstance, fixing: Mapping[int, int]):
    """Admissible upper bound under a partial fixing; -inf when infeasible."""
    search = _Search(inst)
    for col in sorted(fixing):
        if not search.fix(col, int(fixing[col])):
            return NEG_INF
    if not search.propagate_pending():
        return NEG_INF
    return search.bound()
