"""Exhaustive reference solver for desk-scale instances.

Searches directly over discrete schedules by simulating the agents step by
step: at every step each free agent may idle, start a task whose inputs it
holds, or take part in one directed product transfer. This is a semantic
enumeration, deliberately independent of the 0/1 encoding, and is used as
the ground-truth oracle in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from . import lp
from .model import (
    CommEvent,
    Placement,
    ProblemInstance,
    Schedule,
    frac,
    occupancy_steps,
)

MAX_AGENTS = 3
MAX_TASKS = 5
MAX_STEPS = 8


class TooLarge(ValueError):
    """Instance exceeds the oracle's enumeration guard."""


@dataclass
class _Ctx:
    p: ProblemInstance
    na: int
    nt: int
    steps: int
    dt: Fraction
    durations: list[list[int | None]]
    occ: list[list[int | None]]
    energies: list[list[Fraction | None]]
    rewards: list[Fraction]
    sizes: list[Fraction]
    pred_mask: list[int]
    required_mask: int
    all_mask: int
    link_bits: dict[tuple[int, int, int], Fraction]
    weights: dict[str, Fraction]
    comm_e: Fraction
    track_mk: bool
    placed0: int
    holdings0: tuple[int, ...]
    isets: list[tuple[list[tuple[int, int]], Fraction]]


def _context(p: ProblemInstance) -> _Ctx:
    agents = p.agent_ids
    task_ids = p.network.task_ids
    tindex = {t: i for i, t in enumerate(task_ids)}
    na, nt, steps = len(agents), len(task_ids), p.horizon.num_steps
    dt = p.horizon.step_duration
    durations = [[p.duration_steps(a, t) for t in task_ids] for a in agents]
    occ = [[None if d is None else occupancy_steps(d) for d in row] for row in durations]
    energies = [
        [
            None if durations[ai][ti] is None else frac(p.agents[ai].energy_for(task_ids[ti]))
            for ti in range(nt)
        ]
        for ai in range(na)
    ]
    rewards = [t.effective_reward for t in p.network.tasks]
    sizes = [t.product_size for t in p.network.tasks]
    pred_mask = [
        sum(1 << tindex[q] for q in t.predecessors if q in tindex) for t in p.network.tasks
    ]
    required_mask = sum(1 << ti for ti, t in enumerate(p.network.tasks) if t.required)
    link_bits = {}
    for (src, dst, k), rate in p.contacts.rates.items():
        if rate > 0 and k < steps:
            link_bits[(agents.index(src), agents.index(dst), k)] = rate * dt
    placed0 = sum(1 << tindex[t] for t in p.done_tasks if t in tindex)
    holdings = [0] * na
    for a, prods in p.initial_products.items():
        if a in agents:
            ai = agents.index(a)
            for t in prods:
                if t in tindex:
                    holdings[ai] |= 1 << tindex[t]
    weights = p.objective.weight_vector()
    isets = [
        (
            sorted(
                (agents.index(s), agents.index(d))
                for (s, d) in iset.links
                if s in agents and d in agents and s != d
            ),
            iset.capacity_bps * dt,
        )
        for iset in p.contacts.interference_sets
    ]
    return _Ctx(
        p=p,
        na=na,
        nt=nt,
        steps=steps,
        dt=dt,
        durations=durations,
        occ=occ,
        energies=energies,
        rewards=rewards,
        sizes=sizes,
        pred_mask=pred_mask,
        required_mask=required_mask,
        all_mask=(1 << nt) - 1,
        link_bits=link_bits,
        weights=weights,
        comm_e=p.comm_energy_per_bit,
        track_mk=weights["makespan"] > 0,
        placed0=placed0,
        holdings0=tuple(holdings),
        isets=isets,
    )


def _required_completable(ctx: _Ctx, k: int, busy, placed: int) -> bool:
    """Relaxed check: every missing required task still fits on some agent."""
    missing = ctx.required_mask & ~placed
    ti = 0
    while missing:
        if missing & 1:
            ok = False
            for ai in range(ctx.na):
                o = ctx.occ[ai][ti]
                if o is None:
                    continue
                est = k if busy[ai] is None else busy[ai][1]
                if est + o <= ctx.steps:
                    ok = True
                    break
            if not ok:
                return False
        missing >>= 1
        ti += 1
    return True


def _joint_actions(ctx: _Ctx, k: int, busy, holdings, accum: dict, placed: int):
    """All per-step joint actions, in canonical deterministic order.

    An action is a tuple of ops: ("start", ai, ti) or ("move", src, dst, ti).
    Idle agents carry no op. Transfers pair two free agents on a live link.
    """
    free = [i for i in range(ctx.na) if busy[i] is None]
    needed = 0
    for ti in range(ctx.nt):
        if not (placed >> ti) & 1:
            needed |= ctx.pred_mask[ti]
    out = []

    def gen(idx: int, used: frozenset, claimed: int, ops: tuple):
        if idx == len(free):
            out.append(ops)
            return
        i = free[idx]
        if i in used:
            gen(idx + 1, used, claimed, ops)
            return
        for ti in range(ctx.nt):
            if ((placed | claimed) >> ti) & 1:
                continue
            o = ctx.occ[i][ti]
            if o is None or k + o > ctx.steps:
                continue
            if ctx.pred_mask[ti] & ~holdings[i]:
                continue
            gen(idx + 1, used | {i}, claimed | (1 << ti), ops + (("start", i, ti),))
        for j in free[idx + 1 :]:
            if j in used:
                continue
            for src, dst in ((i, j), (j, i)):
                if (src, dst, k) not in ctx.link_bits:
                    continue
                for ti in range(ctx.nt):
                    if not (needed >> ti) & 1:
                        continue
                    if not (holdings[src] >> ti) & 1:
                        continue
                    if (holdings[dst] >> ti) & 1:
                        continue
                    gen(idx + 1, used | {i, j}, claimed, ops + (("move", src, dst, ti),))
        gen(idx + 1, used | {i}, claimed, ops)

    gen(0, frozenset(), 0, ())
    return out


def _apply(ctx: _Ctx, k: int, busy, holdings, accum, placed, ops):
    """Next-step state after executing a joint action; returns value delta."""
    w = ctx.weights
    delta = Fraction(0)
    completion = 0
    busy2 = list(busy)
    holdings2 = list(holdings)
    accum2 = dict(accum)
    placed2 = placed
    for op in ops:
        if op[0] == "start":
            _, ai, ti = op
            dur = ctx.durations[ai][ti]
            busy2[ai] = (ti, k + ctx.occ[ai][ti])
            placed2 |= 1 << ti
            delta += w["reward"] * ctx.rewards[ti] - w["energy"] * ctx.energies[ai][ti]
            completion = max(completion, k + dur)
        else:
            _, src, dst, ti = op
            bits = ctx.link_bits.get((src, dst, k), Fraction(0))
            delta -= w["energy"] * ctx.comm_e * bits
            size = ctx.sizes[ti]
            if size == 0:
                holdings2[dst] |= 1 << ti  # applied at k+1 below; empty product
                accum2.pop((dst, ti), None)
            else:
                acc = accum2.get((dst, ti), Fraction(0)) + bits
                if acc >= size:
                    holdings2[dst] |= 1 << ti
                    accum2.pop((dst, ti), None)
                else:
                    accum2[(dst, ti)] = acc
    for ai in range(ctx.na):
        if busy2[ai] is not None and busy2[ai][1] == k + 1:
            holdings2[ai] |= 1 << busy2[ai][0]
            busy2[ai] = None
    return tuple(busy2), tuple(holdings2), accum2, placed2, delta, completion


def _dp(ctx: _Ctx):
    memo: dict = {}

    def key(k, busy, holdings, accum, placed, mk):
        acc = tuple(sorted(accum.items()))
        if ctx.track_mk:
            return (k, busy, holdings, acc, placed, mk)
        return (k, busy, holdings, acc, placed)

    def solve(k, busy, holdings, accum, placed, mk):
        if k == ctx.steps:
            if ctx.required_mask & ~placed:
                return None
            return -ctx.weights["makespan"] * mk if ctx.track_mk else Fraction(0)
        if not _required_completable(ctx, k, busy, placed):
            return None
        kk = key(k, busy, holdings, accum, placed, mk)
        if kk in memo:
            return memo[kk]
        best = None
        for ops in _joint_actions(ctx, k, busy, holdings, accum, placed):
            b2, h2, a2, p2, delta, comp = _apply(ctx, k, busy, holdings, accum, placed, ops)
            sub = solve(k + 1, b2, h2, a2, p2, max(mk, comp))
            if sub is None:
                continue
            total = delta + sub
            if best is None or total > best:
                best = total
        memo[kk] = best
        return best

    def reconstruct():
        k, busy, holdings = 0, (None,) * ctx.na, ctx.holdings0
        accum: dict = {}
        placed, mk = ctx.placed0, 0
        target = solve(k, busy, holdings, accum, placed, mk)
        if target is None:
            return None, None
        trace = []
        value = target
        while k < ctx.steps:
            for ops in _joint_actions(ctx, k, busy, holdings, accum, placed):
                b2, h2, a2, p2, delta, comp = _apply(ctx, k, busy, holdings, accum, placed, ops)
                sub = solve(k + 1, b2, h2, a2, p2, max(mk, comp))
                if sub is not None and delta + sub == target:
                    trace.append((k, ops))
                    busy, holdings, accum, placed = b2, h2, a2, p2
                    mk = max(mk, comp)
                    target = sub
                    k += 1
                    break
            else:  # pragma: no cover - solve() guarantees a matching action
                raise AssertionError("reconstruction lost the optimal branch")
        return value, trace

    return reconstruct()


def _schedule_from_trace(ctx: _Ctx, value: Fraction, trace, bits_lookup=None) -> Schedule:
    placements = []
    makespan = 0
    sends: dict[tuple[int, int, int], list[tuple[int, Fraction]]] = {}
    for k, ops in trace:
        for op in ops:
            if op[0] == "start":
                _, ai, ti = op
                placements.append(
                    Placement(ctx.p.agent_ids[ai], ctx.p.network.task_ids[ti], k)
                )
                makespan = max(makespan, k + ctx.durations[ai][ti])
            else:
                _, src, dst, ti = op
                bits = (
                    bits_lookup[(src, dst, ti, k)]
                    if bits_lookup is not None
                    else ctx.link_bits.get((src, dst, k), Fraction(0))
                )
                sends.setdefault((src, dst, ti), []).append((k, bits))
    comms = []
    for (src, dst, ti), steps in sorted(sends.items()):
        steps.sort()
        run: list[tuple[int, Fraction]] = []
        for item in steps + [(None, None)]:
            if run and (item[0] is None or item[0] != run[-1][0] + 1):
                comms.append(
                    CommEvent(
                        ctx.p.agent_ids[src],
                        ctx.p.agent_ids[dst],
                        ctx.p.network.task_ids[ti],
                        run[0][0],
                        run[-1][0],
                        tuple(b for _, b in run),
                    )
                )
                run = []
            if item[0] is not None:
                run.append(item)
    return Schedule(tuple(placements), tuple(comms), value, makespan)


def _lp_rows(ctx: _Ctx, activations: list, requirements: dict):
    """LP feasibility of bit allocations for the activated transfer steps."""
    var_of = {act: i for i, act in enumerate(activations)}
    cons = []
    for act, vi in var_of.items():
        src, dst, ti, k = act
        cons.append(({vi: Fraction(1)}, lp.LE, ctx.link_bits.get((src, dst, k), Fraction(0))))
    by_step: dict[tuple[int, int], dict[int, Fraction]] = {}
    for si, (links, cap) in enumerate(ctx.isets):
        linkset = set(links)
        for act, vi in var_of.items():
            src, dst, ti, k = act
            if (src, dst) in linkset:
                by_step.setdefault((si, k), {})[vi] = Fraction(1)
    for (si, k), coeffs in sorted(by_step.items()):
        cons.append((coeffs, lp.LE, ctx.isets[si][1]))
    for (ai, ti), by in sorted(requirements.items()):
        coeffs = {
            vi: Fraction(1)
            for act, vi in var_of.items()
            if act[1] == ai and act[2] == ti and act[3] < by
        }
        cons.append((coeffs, lp.GE, ctx.sizes[ti]))
    return len(activations), cons


def _interference_search(ctx: _Ctx):
    """DFS over placements and transfer activations with LP-checked bit flows.

    Holdings are tracked exactly for computed/initial products; products that
    arrive by communication become lower-bound requirements on the bit-flow
    LP, which decides whether the shared-channel capacities admit them.
    """
    best: list = [None, None, None]  # value, trace, (activations, requirements)

    def optional_bound(placed, value, mk):
        rest = Fraction(0)
        for ti in range(ctx.nt):
            if not (placed >> ti) & 1:
                rest += ctx.weights["reward"] * ctx.rewards[ti]
        return value + rest - ctx.weights["makespan"] * mk

    def recurse(k, busy, holdings, placed, mk, value, trace, activations, requirements):
        if not _required_completable(ctx, k, busy, placed):
            return
        if best[0] is not None and optional_bound(placed, value, mk) <= best[0]:
            return
        if k == ctx.steps:
            if ctx.required_mask & ~placed:
                return
            total = value - ctx.weights["makespan"] * mk
            if ctx.comm_e > 0 and ctx.weights["energy"] > 0 and activations:
                nvars, cons = _lp_rows(ctx, activations, requirements)
                sol = lp.solve_lp(nvars, cons, minimize={i: Fraction(1) for i in range(nvars)})
                total -= ctx.weights["energy"] * ctx.comm_e * sum(sol)
            if best[0] is None or total > best[0]:
                best[0], best[1], best[2] = total, list(trace), (list(activations), dict(requirements))
            return

        free = [i for i in range(ctx.na) if busy[i] is None]
        needed = 0
        for ti in range(ctx.nt):
            if not (placed >> ti) & 1:
                needed |= ctx.pred_mask[ti]

        def has_product(ai, ti):
            return bool((holdings[ai] >> ti) & 1)

        def delivered(ai, ti, by):
            req = requirements.get((ai, ti))
            return req is not None and req <= by

        def gen(idx, used, claimed, ops, new_reqs):
            if idx == len(free):
                step(ops, new_reqs)
                return
            i = free[idx]
            if i in used:
                gen(idx + 1, used, claimed, ops, new_reqs)
                return
            for ti in range(ctx.nt):
                if ((placed | claimed) >> ti) & 1:
                    continue
                o = ctx.occ[i][ti]
                if o is None or k + o > ctx.steps:
                    continue
                reqs = []
                feasible = True
                pm = ctx.pred_mask[ti]
                li = 0
                while pm:
                    if pm & 1 and not has_product(i, li) and not delivered(i, li, k):
                        # Needs at least one earlier inbound activation; for
                        # sized products the LP additionally checks the bits.
                        if not any(a[1] == i and a[2] == li and a[3] < k for a in activations):
                            feasible = False
                            break
                        if ctx.sizes[li] > 0:
                            reqs.append((i, li, k))
                    pm >>= 1
                    li += 1
                if feasible:
                    gen(
                        idx + 1,
                        used | {i},
                        claimed | (1 << ti),
                        ops + (("start", i, ti),),
                        new_reqs + reqs,
                    )
            for j in free[idx + 1 :]:
                if j in used:
                    continue
                for src, dst in ((i, j), (j, i)):
                    if (src, dst, k) not in ctx.link_bits:
                        continue
                    for ti in range(ctx.nt):
                        if not (needed >> ti) & 1:
                            continue
                        if has_product(dst, ti) or delivered(dst, ti, k):
                            continue
                        reqs = []
                        if not has_product(src, ti) and not delivered(src, ti, k):
                            if not any(
                                a[1] == src and a[2] == ti and a[3] < k for a in activations
                            ):
                                continue
                            if ctx.sizes[ti] > 0:
                                reqs.append((src, ti, k))
                        gen(
                            idx + 1,
                            used | {i, j},
                            claimed,
                            ops + (("move", src, dst, ti),),
                            new_reqs + reqs,
                        )
            gen(idx + 1, used | {i}, claimed, ops, new_reqs)

        def step(ops, new_reqs):
            acts2 = list(activations)
            reqs2 = dict(requirements)
            for (ai, ti, by) in new_reqs:
                prev = reqs2.get((ai, ti))
                if prev is None or by < prev:
                    reqs2[(ai, ti)] = by
            busy2 = list(busy)
            holdings2 = list(holdings)
            placed2 = placed
            delta = Fraction(0)
            comp = 0
            for op in ops:
                if op[0] == "start":
                    _, ai, ti = op
                    busy2[ai] = (ti, k + ctx.occ[ai][ti])
                    placed2 |= 1 << ti
                    delta += (
                        ctx.weights["reward"] * ctx.rewards[ti]
                        - ctx.weights["energy"] * ctx.energies[ai][ti]
                    )
                    comp = max(comp, k + ctx.durations[ai][ti])
                else:
                    _, src, dst, ti = op
                    acts2.append((src, dst, ti, k))
            if new_reqs:
                nvars, cons = _lp_rows(ctx, acts2, reqs2)
                if lp.solve_lp(nvars, cons) is None:
                    return
            for ai in range(ctx.na):
                if busy2[ai] is not None and busy2[ai][1] == k + 1:
                    holdings2[ai] |= 1 << busy2[ai][0]
                    busy2[ai] = None
            recurse(
                k + 1,
                tuple(busy2),
                tuple(holdings2),
                placed2,
                max(mk, comp),
                value + delta,
                trace + [(k, ops)],
                acts2,
                reqs2,
            )

        gen(0, frozenset(), 0, (), [])

    recurse(0, (None,) * ctx.na, ctx.holdings0, ctx.placed0, 0, Fraction(0), [], [], {})
    if best[0] is None:
        return None, None, None
    return best


def brute_force(p: ProblemInstance, interference: bool = False) -> Schedule:
    """Exhaustively optimal schedule for a desk-scale instance."""
    if (
        len(p.agents) > MAX_AGENTS
        or p.network.M > MAX_TASKS
        or p.horizon.num_steps > MAX_STEPS
    ):
        raise TooLarge(
            f"oracle guard: N<={MAX_AGENTS}, M<={MAX_TASKS}, steps<={MAX_STEPS}"
        )
    ctx = _context(p)
    if interference or ctx.isets:
        value, trace, flows = _interference_search(ctx)
        if value is None:
            raise ValueError("no feasible schedule exists")
        activations, requirements = flows
        bits_lookup = {}
        if activations:
            nvars, cons = _lp_rows(ctx, activations, requirements)
            minimize = {i: Fraction(1) for i in range(nvars)} if ctx.comm_e > 0 else None
            sol = lp.solve_lp(nvars, cons, minimize=minimize)
            for act, v in zip(activations, sol):
                bits_lookup[act] = v
        return _schedule_from_trace(ctx, value, trace, bits_lookup)
    value, trace = _dp(ctx)
    if value is None:
        raise ValueError("no feasible schedule exists")
    return _schedule_from_trace(ctx, value, trace)
