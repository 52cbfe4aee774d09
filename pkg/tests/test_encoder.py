"""Encoding: variable layout, rows, objectives, decode, LP export."""

from fractions import Fraction

import pytest

from commsched import (
    AgentProfile,
    ContactGraph,
    Horizon,
    InfeasibleAssignment,
    InfeasibleHorizon,
    Objective,
    ProblemInstance,
    SoftwareNetwork,
    Task,
    SolveBudget,
    brute_force,
    check_assignment,
    check_schedule,
    decode,
    encode,
    encode_objective,
    export_lp,
    solve,
)
from commsched.baseline import selfish_schedule
from commsched.encoder import assignment_from_schedule

from helpers import random_instance


def grid_instance(na: int, nt: int, steps: int) -> ProblemInstance:
    """All tasks one step everywhere, full mesh contacts: nothing is pruned."""
    tasks = [Task(f"t{i}", required=False, reward=1, product_size=4) for i in range(nt)]
    agents = [
        AgentProfile(f"a{j}", {t.id: 1 for t in tasks}, {t.id: 1 for t in tasks})
        for j in range(na)
    ]
    rates = {
        (f"a{i}", f"a{j}", k): 8
        for i in range(na)
        for j in range(na)
        if i != j
        for k in range(steps)
    }
    return ProblemInstance(
        network=SoftwareNetwork(tasks),
        agents=tuple(agents),
        contacts=ContactGraph(rates),
        horizon=Horizon(steps, steps),
        objective=Objective.reward(),
    )


class TestVariableCount:
    def test_paper_example_600_binaries(self):
        # N=3, M=4, steps=10: 9*4*10 + 2*3*4*10 = 600
        inst = encode(grid_instance(3, 4, 10))
        assert inst.num_binary == 600

    @pytest.mark.parametrize("na,nt,steps", [(1, 1, 1), (2, 3, 5), (3, 5, 8), (4, 2, 6)])
    def test_count_law_holds_on_grid(self, na, nt, steps):
        inst = encode(grid_instance(na, nt, steps))
        assert inst.num_binary == na * na * nt * steps + 2 * na * nt * steps

    def test_empty_network(self):
        p = grid_instance(2, 1, 3)
        from dataclasses import replace

        p = replace(p, network=SoftwareNetwork([]))
        inst = encode(p)
        assert len(inst.variables) == 0 and len(inst.rows) == 0
        res = solve(encode_objective(p, p.objective, inst),
                    selfish_schedule(p), SolveBudget(10))
        assert res.incumbent.placements == () and res.incumbent_value == 0

    def test_forbidden_pairs_have_no_x_columns(self):
        p = grid_instance(2, 2, 4)
        from dataclasses import replace

        agents = (
            AgentProfile("a0", {"t0": 1}, {"t0": 1}),
            AgentProfile("a1", {"t0": 1, "t1": 1}, {"t0": 1, "t1": 1}),
        )
        inst = encode(replace(p, agents=agents))
        assert all(key[1] != 1 or key[0] != 0 for key in inst.x_index)  # (a0, t1) absent
        # count shrinks by exactly the missing task-agent block
        assert inst.num_binary == 2 * 2 * 2 * 4 + 2 * 2 * 2 * 4 - 4

    def test_infeasible_horizon_raises(self):
        p = grid_instance(1, 1, 2)
        from dataclasses import replace

        agents = (AgentProfile("a0", {"t0": 5}, {"t0": 1}),)
        tasks = SoftwareNetwork([Task("t0", required=True)])
        with pytest.raises(InfeasibleHorizon):
            encode(replace(p, agents=agents, network=tasks))


class TestObjectives:
    def test_single_optional_reward(self):
        tasks = SoftwareNetwork([Task("t0", required=False, reward=7)])
        p = ProblemInstance(
            network=tasks,
            agents=(AgentProfile("a0", {"t0": 1}, {"t0": 1}),),
            contacts=ContactGraph(),
            horizon=Horizon(4, 4),
            objective=Objective.reward(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p), SolveBudget(1000))
        assert res.incumbent_value == 7 and res.status == "optimal"

    def test_energy_with_no_choice(self):
        tasks = SoftwareNetwork([Task("t0"), Task("t1")])
        p = ProblemInstance(
            network=tasks,
            agents=(AgentProfile("a0", {"t0": 1, "t1": 1}, {"t0": 3, "t1": 4}),),
            contacts=ContactGraph(),
            horizon=Horizon(6, 6),
            objective=Objective.energy(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p), SolveBudget(5000))
        assert res.incumbent_value == -7

    def test_makespan_matches_brute_force_when_offloading_helps(self):
        tasks = SoftwareNetwork(
            [Task("gen", product_size=8), Task("use", predecessors={"gen"})]
        )
        p = ProblemInstance(
            network=tasks,
            agents=(
                AgentProfile("a0", {"gen": 1, "use": 4}, {"gen": 1, "use": 1}),
                AgentProfile("a1", {"use": 1}, {"use": 1}),
            ),
            contacts=ContactGraph({("a0", "a1", k): 8 for k in range(8)}),
            horizon=Horizon(8, 8),
            objective=Objective.makespan(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p), SolveBudget(100000))
        bf = brute_force(p)
        assert res.incumbent_value == bf.objective_value == -3

    def test_reward_scaling_keeps_argmax(self):
        from dataclasses import replace

        p = random_instance(11, objective=Objective.reward())
        base = solve(
            encode_objective(p, p.objective, encode(p)),
            selfish_schedule(p, mode="storage_excepted"),
            SolveBudget(100000),
        )
        scaled_tasks = [
            replace(t, reward=t.reward * 3) for t in p.network.tasks
        ]
        p3 = replace(p, network=SoftwareNetwork(scaled_tasks))
        res3 = solve(
            encode_objective(p3, p3.objective, encode(p3)),
            selfish_schedule(p3, mode="storage_excepted"),
            SolveBudget(100000),
        )
        assert res3.incumbent_value == 3 * base.incumbent_value
        assert res3.incumbent.placements == base.incumbent.placements


class TestDecode:
    def decode_setup(self):
        tasks = SoftwareNetwork(
            [Task("gen", product_size=8), Task("use", required=False, reward=2, predecessors={"gen"})]
        )
        p = ProblemInstance(
            network=tasks,
            agents=(
                AgentProfile("a0", {"gen": 1}, {"gen": 1}),
                AgentProfile("a1", {"use": 1}, {"use": 1}),
            ),
            contacts=ContactGraph({("a0", "a1", k): 4 for k in range(6)}),
            horizon=Horizon(6, 6),
            objective=Objective.reward(),
        )
        return p, encode_objective(p, p.objective, encode(p))

    def test_all_zero_assignment_when_nothing_required(self):
        tasks = SoftwareNetwork([Task("t0", required=False, reward=1)])
        p = ProblemInstance(
            network=tasks,
            agents=(AgentProfile("a0", {"t0": 1}, {"t0": 1}),),
            contacts=ContactGraph(),
            horizon=Horizon(3, 3),
            objective=Objective.reward(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        s = decode(p, inst, {})
        assert s.placements == () and s.comms == () and s.objective_value == 0

    def test_hand_built_assignment_decodes(self):
        p, inst = self.decode_setup()
        values = {inst.x_index[(0, 0, 0)]: 1, inst.x_index[(1, 1, 4)]: 1}
        # transfer gen's 8 bits at 4 bits/step over steps 2..3
        values[inst.c_index[(0, 1, 0, 2)]] = 1
        values[inst.c_index[(0, 1, 0, 3)]] = 1
        for k in range(1, 6):
            values[inst.d_index[(0, 0, k)]] = 1
        for k in range(4, 6):
            values[inst.d_index[(1, 0, k)]] = 1
        values[inst.d_index[(1, 1, 5)]] = 1
        s = decode(p, inst, values)
        assert len(s.placements) == 2 and len(s.comms) == 1
        comm = s.comms[0]
        assert (comm.src, comm.dst, comm.start, comm.end) == ("a0", "a1", 2, 3)
        assert not check_schedule(p, s)

    def test_resource_violation_rejected(self):
        p, inst = self.decode_setup()
        from dataclasses import replace

        agents = (
            AgentProfile("a0", {"gen": 1, "use": 1}, {"gen": 1, "use": 1}),
            AgentProfile("a1", {}, {}),
        )
        p2 = replace(p, network=SoftwareNetwork(
            [Task("gen", product_size=0), Task("use", required=False, reward=2)]))
        p2 = replace(p2, agents=agents)
        inst2 = encode_objective(p2, p2.objective, encode(p2))
        values = {inst2.x_index[(0, 0, 0)]: 1, inst2.x_index[(0, 1, 0)]: 1}
        with pytest.raises(InfeasibleAssignment):
            decode(p2, inst2, values)

    def test_round_trip_through_schedule(self):
        p, inst = self.decode_setup()
        sched = brute_force(p)
        values = assignment_from_schedule(inst, sched)
        assert not check_assignment(inst, values, tol=Fraction(0))
        again = decode(p, inst, values)
        assert again.placements == sched.placements
        assert not check_schedule(p, again)


class TestExport:
    def test_empty_instance_exports(self):
        p = grid_instance(2, 1, 3)
        from dataclasses import replace

        inst = encode(replace(p, network=SoftwareNetwork([])))
        text = export_lp(inst)
        assert text.startswith("\\")
        assert "Maximize" in text and "Binaries" in text and text.endswith("End\n")

    def test_declares_exactly_600_binaries(self):
        inst = encode(grid_instance(3, 4, 10))
        text = export_lp(inst)
        section = text.split("Binaries", 1)[1].rsplit("End", 1)[0]
        assert len(section.split()) == 600

    def test_byte_identical_reexport(self):
        p = grid_instance(2, 2, 4)
        inst = encode_objective(p, p.objective, encode(p))
        assert export_lp(inst) == export_lp(encode_objective(p, p.objective, encode(p)))


class TestEncodingEquivalence:
    def test_pinned_predecessor_instance_matches_oracle(self):
        tasks = SoftwareNetwork(
            [Task("gen", product_size=8), Task("use", predecessors={"gen"})]
        )
        p = ProblemInstance(
            network=tasks,
            agents=(
                AgentProfile("a0", {"gen": 1, "use": 2}, {"gen": 1, "use": 2}),
                AgentProfile("a1", {"use": 1}, {"use": 1}),
            ),
            contacts=ContactGraph({("a0", "a1", k): 8 for k in range(6)}),
            horizon=Horizon(6, 6),
            objective=Objective.makespan(),
        )
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p), SolveBudget(100000))
        assert res.status == "optimal"
        assert res.incumbent_value == brute_force(p).objective_value

    @pytest.mark.parametrize("seed", range(0, 24))
    def test_small_instances_match_oracle(self, seed):
        p = random_instance(seed + 1000)
        inst = encode_objective(p, p.objective, encode(p))
        res = solve(inst, selfish_schedule(p, mode="storage_excepted"), SolveBudget(200000))
        assert res.status == "optimal"
        assert res.incumbent_value == brute_force(p).objective_value
        assert not check_schedule(p, res.incumbent)
