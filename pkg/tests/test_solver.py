"""Branch-and-bound: determinism, anytime behavior, propagation, bounds."""

import pytest

from commsched import (
    AgentProfile,
    CONFLICT,
    ContactGraph,
    Horizon,
    InfeasibleSeed,
    Objective,
    ProblemInstance,
    Schedule,
    SoftwareNetwork,
    SolveBudget,
    Task,
    bound,
    brute_force,
    encode,
    encode_objective,
    propagate,
    solve,
)
from commsched.baseline import selfish_schedule
from commsched.model import Placement
from commsched.solver import NEG_INF

from helpers import random_instance


def single_slot_problem():
    """Exactly one feasible point: the seed itself."""
    net = SoftwareNetwork([Task("t0", required=True)])
    p = ProblemInstance(
        network=net,
        agents=(AgentProfile("a0", {"t0": 1}, {"t0": 1}),),
        contacts=ContactGraph(),
        horizon=Horizon(1, 1),
        objective=Objective.reward(),
    )
    return p, encode_objective(p, p.objective, encode(p))


def offload_problem():
    net = SoftwareNetwork([Task("gen", product_size=8), Task("use", predecessors={"gen"})])
    p = ProblemInstance(
        network=net,
        agents=(
            AgentProfile("a0", {"gen": 1, "use": 4}, {"gen": 1, "use": 4}),
            AgentProfile("a1", {"use": 1}, {"use": 1}),
        ),
        contacts=ContactGraph({("a0", "a1", k): 8 for k in range(8)}),
        horizon=Horizon(8, 8),
        objective=Objective.makespan(),
    )
    return p, encode_objective(p, p.objective, encode(p))


class TestSolve:
    def test_only_feasible_point_is_the_seed(self):
        p, inst = single_slot_problem()
        seed = selfish_schedule(p)
        res = solve(inst, seed, SolveBudget(100))
        assert res.status == "optimal"
        assert res.incumbent_value == seed.objective_value
        assert res.incumbent.placements == seed.placements

    def test_budget_one_returns_the_seed(self):
        p, inst = offload_problem()
        seed = selfish_schedule(p)
        res = solve(inst, seed, SolveBudget(1))
        assert res.status == "budget_exhausted"
        assert res.incumbent_value == seed.objective_value
        assert res.nodes_explored == 1
        assert res.best_bound >= res.incumbent_value

    def test_infeasible_seed_rejected(self):
        p, inst = offload_problem()
        bad = Schedule((Placement("a1", "use", 0),), ())  # no gen at all
        with pytest.raises(InfeasibleSeed):
            solve(inst, bad, SolveBudget(10))

    def test_bit_identical_reruns(self):
        p, inst = offload_problem()
        seed = selfish_schedule(p)
        a = solve(inst, seed, SolveBudget(100000))
        b = solve(inst, seed, SolveBudget(100000))
        assert a.to_text(p) == b.to_text(p)

    def test_agreement_across_rebuilt_instances(self):
        # Two independently built encoder+solver pipelines agree bitwise.
        p1 = random_instance(77)
        p2 = random_instance(77)
        out = []
        for p in (p1, p2):
            inst = encode_objective(p, p.objective, encode(p))
            res = solve(inst, selfish_schedule(p, mode="storage_excepted"), SolveBudget(50000))
            out.append(res.to_text(p))
        assert out[0] == out[1]

    @pytest.mark.parametrize("seed", range(6))
    def test_anytime_monotone_in_budget(self, seed):
        p = random_instance(seed + 300)
        inst = encode_objective(p, p.objective, encode(p))
        warm = selfish_schedule(p, mode="storage_excepted")
        values = [
            solve(inst, warm, SolveBudget(n)).incumbent_value for n in (1, 5, 25, 125, 100000)
        ]
        assert values == sorted(values)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_oracle_with_generous_budget(self, seed):
        p = random_instance(seed + 2000)
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p, mode="storage_excepted"), SolveBudget(200000))
        assert res.status == "optimal"
        assert res.incumbent_value == brute_force(p).objective_value


class TestPropagate:
    def test_required_last_survivor_is_forced_true(self):
        p, inst = single_slot_problem()
        # only one X column exists; propagation must set it from nothing
        result = propagate(inst, {})
        xcol = inst.x_index[(0, 0, 0)]
        assert result is not CONFLICT
        assert result[xcol] == 1

    def test_resource_exclusion(self):
        net = SoftwareNetwork([Task("t0", required=False, reward=1),
                               Task("t1", required=False, reward=1)])
        p = ProblemInstance(
            network=net,
            agents=(AgentProfile("a0", {"t0": 2, "t1": 1}, {"t0": 1, "t1": 1}),),
            contacts=ContactGraph(),
            horizon=Horizon(6, 6),
            objective=Objective.reward(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        start = inst.x_index[(0, 0, 3)]  # t0 occupies steps 3 and 4
        result = propagate(inst, {start: 1})
        assert result is not CONFLICT
        assert result[inst.x_index[(0, 1, 3)]] == 0
        assert result[inst.x_index[(0, 1, 4)]] == 0
        assert inst.x_index[(0, 1, 2)] not in result or result[inst.x_index[(0, 1, 2)]] != 0

    def test_conflict_when_required_has_no_column_left(self):
        p, inst = single_slot_problem()
        xcol = inst.x_index[(0, 0, 0)]
        assert propagate(inst, {xcol: 0}) is CONFLICT

    @pytest.mark.parametrize("seed", range(8))
    def test_never_cuts_the_oracle_optimum(self, seed):
        # Fixing a prefix of the oracle's own solution must never conflict,
        # and propagation must never force a column away from that solution.
        import random

        from commsched.encoder import assignment_from_schedule

        p = random_instance(seed + 500)
        inst = encode_objective(p, p.objective, encode(p))
        best = brute_force(p)
        values = assignment_from_schedule(inst, best)
        rng = random.Random(seed)
        cols = [c for c in inst.branch_cols if rng.random() < 0.3]
        fixing = {c: int(values.get(c, 0)) for c in cols}
        result = propagate(inst, fixing)
        assert result is not CONFLICT
        # The oracle solution completes this fixing, so every forced value
        # must agree with it.
        for col, v in result.items():
            assert v == int(values.get(col, 0))


class TestBound:
    def test_root_bound_counts_open_optionals(self):
        net = SoftwareNetwork([Task("t0", required=False, reward=7)])
        p = ProblemInstance(
            network=net,
            agents=(AgentProfile("a0", {"t0": 1}, {"t0": 1}),),
            contacts=ContactGraph(),
            horizon=Horizon(4, 4),
            objective=Objective.reward(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        assert bound(inst, {}) >= 7

    def test_all_optionals_fixed_false_bounds_to_zero(self):
        net = SoftwareNetwork([Task("t0", required=False, reward=7)])
        p = ProblemInstance(
            network=net,
            agents=(AgentProfile("a0", {"t0": 1}, {"t0": 1}),),
            contacts=ContactGraph(),
            horizon=Horizon(4, 4),
            objective=Objective.reward(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        fixing = {col: 0 for (ai, ti, k), col in inst.x_index.items()}
        assert bound(inst, fixing) == 0

    @pytest.mark.parametrize("seed", range(10))
    def test_root_bound_is_admissible(self, seed):
        p = random_instance(seed + 700)
        inst = encode_objective(p, p.objective, encode(p))
        b = bound(inst, {})
        assert b is not NEG_INF
        assert b >= brute_force(p).objective_value
