"""The four canned scenarios and the load-sharing behaviors they provoke.

Each scenario is small enough that the optimum is forced, so the behavior is
a theorem about the instance rather than a lucky solver artifact:

  relay           traffic routes through an agent that neither produces nor
                  consumes the data
  science_cluster a helper absorbs relocatable housekeeping so the rover in
                  the science zone collects three samples instead of one
  assembly_line   the relay analyzes the sample while it is in transit
  data_mule       the product is parked on a mobile agent before that
                  agent's contact window to the base opens
"""

from commsched import SolveBudget, encode, encode_objective, solve
from commsched.baseline import compare, selfish_schedule
from commsched.scenarios import canned_scenario

for name in ("relay", "science_cluster", "assembly_line", "data_mule"):
    scenario = canned_scenario(name)
    problem = scenario.to_problem()
    selfish = selfish_schedule(problem, mode="storage_excepted")
    instance = encode_objective(problem, problem.objective, encode(problem))
    result = solve(instance, selfish, SolveBudget(300_000))
    metrics = compare(problem, result.incumbent, selfish)
    print(f"== {name}: shared {result.incumbent_value} vs selfish {selfish.objective_value}")
    for placement in result.incumbent.placements:
        print(f"   run  {placement.task:18s} on {placement.agent:6s} at step {placement.start}")
    for comm in result.incumbent.comms:
        print(f"   send {comm.task:18s} {comm.src} -> {comm.dst} steps {comm.start}..{comm.end}")
    if name == "science_cluster":
        print(
            "   samples collected:",
            metrics.shared.category("collect"),
            "shared vs",
            metrics.selfish.category("collect"),
            "selfish (the threefold ceiling)",
        )
    print()
