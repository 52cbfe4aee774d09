"""Solve the relay scenario and render the schedule as an SVG Gantt chart.

The rover has no direct link to the base station, so storing the sample
forces a two-hop route through the relay agent. The deterministic solver is
warm-started with the selfish schedule (which cannot deliver at all).
"""

from pathlib import Path

from commsched import SolveBudget, encode, encode_objective, solve
from commsched.baseline import selfish_schedule
from commsched.render import render_schedule_svg
from commsched.scenarios import canned_scenario

scenario = canned_scenario("relay")
problem = scenario.to_problem()

seed = selfish_schedule(problem, mode="storage_excepted")
print("selfish reward:", seed.objective_value, "(the sample never reaches the base)")

instance = encode_objective(problem, problem.objective, encode(problem))
result = solve(instance, seed, SolveBudget(max_nodes=100_000))
print("shared reward:", result.incumbent_value, f"({result.status}, {result.nodes_explored} nodes)")
print()
print(result.incumbent.to_text(problem))

out = Path(__file__).with_suffix(".svg")
out.write_text(render_schedule_svg(result.incumbent.to_text(problem)))
print("wrote", out.name, "- the dashed arrows hop rover -> relay -> base")
