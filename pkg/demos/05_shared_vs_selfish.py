"""Shared-vs-selfish comparison over a small seeded geometric corpus.

Each instance is a base station plus rovers at random positions under the
range-tiered bandwidth model, science rovers carrying three sample slots.
The solver is seeded with the selfish schedule, so its reward can only
dominate; the interesting number is how often sharing is strictly better.
"""

from commsched import SolveBudget, encode, encode_objective, solve, validate_problem
from commsched.baseline import compare, selfish_schedule
from commsched.scenarios import generate_random

print(f"{'seed':>4} {'N':>2} {'selfish':>8} {'shared':>7} {'collect':>9} {'stored':>7}")
strictly_better = 0
for seed in range(6):
    scenario = generate_random(num_agents=3 + seed % 3, science_fraction=0.5,
                               samples_per_zone=3, seed=seed)
    problem = scenario.to_problem()
    assert validate_problem(problem).ok
    selfish = selfish_schedule(problem, mode="storage_excepted")
    instance = encode_objective(problem, problem.objective, encode(problem))
    result = solve(instance, selfish, SolveBudget(4_000))
    metrics = compare(problem, result.incumbent, selfish)
    strictly_better += result.incumbent_value > selfish.objective_value
    print(
        f"{seed:>4} {len(problem.agents):>2} {str(selfish.objective_value):>8} "
        f"{str(result.incumbent_value):>7} "
        f"{metrics.shared.category('collect'):>4} vs {metrics.selfish.category('collect'):<2} "
        f"{metrics.shared.category('store'):>4} vs {metrics.selfish.category('store'):<2}"
    )
print(f"\nsharing strictly improved {strictly_better}/6 instances")
