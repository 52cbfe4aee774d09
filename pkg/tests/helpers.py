"""Shared test utilities: tiny random instances within the oracle guard."""

from __future__ import annotations

import random

from commsched import (
    AgentProfile,
    ContactGraph,
    FORBIDDEN,
    Horizon,
    InterferenceSet,
    Objective,
    ProblemInstance,
    SoftwareNetwork,
    Task,
    validate_problem,
)

OBJECTIVES = (Objective.reward(), Objective.makespan(), Objective.energy())


def random_instance(seed: int, objective: Objective | None = None) -> ProblemInstance:
    """Deterministic desk-scale instance (N<=3, M<=5, steps<=8).

    Rejection-samples until validate_problem accepts, so every returned
    instance is admissible; the retry sequence is part of the seed's output.
    """
    rng = random.Random(seed)
    if objective is None:
        objective = OBJECTIVES[seed % len(OBJECTIVES)]
    while True:
        p = _draw(rng, objective)
        if p is not None and validate_problem(p).ok:
            return p


def _draw(rng: random.Random, objective: Objective) -> ProblemInstance | None:
    na = rng.randint(1, 3)
    nt = rng.randint(1, 5)
    steps = rng.randint(3, 8)
    agents = [f"a{i}" for i in range(na)]

    tasks = []
    owners: dict[str, str] = {}
    required_by_owner: dict[str, list[str]] = {a: [] for a in agents}
    for ti in range(nt):
        tid = f"t{ti}"
        required = rng.random() < 0.6
        if required:
            owner = rng.choice(agents)
            pool = required_by_owner[owner]
            preds = set(rng.sample(pool, k=min(len(pool), rng.randint(0, 2))))
            required_by_owner[owner].append(tid)
            owners[tid] = owner
        else:
            earlier = [t.id for t in tasks]
            preds = set(rng.sample(earlier, k=min(len(earlier), rng.randint(0, 2))))
        tasks.append(
            Task(
                tid,
                required=required,
                reward=0 if required else rng.randint(1, 10),
                product_size=rng.choice((0, 2, 4, 8, 12)),
                predecessors=preds,
            )
        )

    profiles = []
    for a in agents:
        time: dict = {}
        energy: dict = {}
        for t in tasks:
            if t.required and owners.get(t.id) == a:
                allowed = True  # owner always capable
            else:
                allowed = rng.random() < 0.8
            if allowed:
                time[t.id] = rng.randint(0, 3)
                energy[t.id] = rng.randint(0, 6)
            else:
                time[t.id] = FORBIDDEN
                energy[t.id] = FORBIDDEN
        profiles.append(AgentProfile(a, time, energy))

    rates: dict = {}
    for src in agents:
        for dst in agents:
            if src == dst:
                continue
            if rng.random() < 0.25:
                continue  # never-connected pair
            for k in range(steps):
                rate = rng.choice((0, 0, 2, 4, 8))
                if rate:
                    rates[(src, dst, k)] = rate

    try:
        return ProblemInstance(
            network=SoftwareNetwork(tasks),
            agents=tuple(profiles),
            contacts=ContactGraph(rates),
            horizon=Horizon(steps, steps),
            objective=objective,
            owners=owners,
        )
    except ValueError:
        return None


def interference_instance(seed: int) -> ProblemInstance:
    """Tiny instance with one shared channel over all links."""
    rng = random.Random(seed)
    while True:
        p = _draw_interference(rng)
        if p is not None and validate_problem(p).ok:
            return p


def _draw_interference(rng: random.Random) -> ProblemInstance | None:
    agents = ["a0", "a1", "a2"]
    steps = rng.randint(4, 6)
    rate = rng.choice((4, 8))
    size = rng.choice((4, 8))
    tasks = [
        Task("src0", required=True, product_size=size),
        Task("src1", required=True, product_size=size),
        Task("sink", required=False, reward=10, predecessors={"src0", "src1"}),
    ]
    owners = {"src0": "a0", "src1": "a1"}
    profiles = [
        AgentProfile("a0", {"src0": 1}, {"src0": 1}),
        AgentProfile("a1", {"src1": 1}, {"src1": 1}),
        AgentProfile("a2", {"sink": 1}, {"sink": 1}),
    ]
    rates = {}
    links = set()
    for src in ("a0", "a1"):
        for k in range(steps):
            rates[(src, "a2", k)] = rate
        links.add((src, "a2"))
    cap = rate if rng.random() < 0.5 else rate * 2
    contacts = ContactGraph(rates, (InterferenceSet(frozenset(links), cap),))
    return ProblemInstance(
        network=SoftwareNetwork(tasks),
        agents=tuple(profiles),
        contacts=contacts,
        horizon=Horizon(steps, steps),
        objective=Objective.reward(),
        owners=owners,
    )
