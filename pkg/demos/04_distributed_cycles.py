"""The broadcast-plan-execute cycle, including a mid-execution outage.

Agents flood compact 3N+23-bit states, each runs the identical deterministic
solve, and the per-agent schedule digests agree whenever flooding completed.
We then knock the relay out mid-cycle: its transfer misses, the dependent
task returns to the pool, and a later cycle finishes the job.
"""

from commsched.distsim import ScriptEvent, WorldScript, run_cycles
from commsched.scenarios import canned_scenario

scenario = canned_scenario("relay")
problem = scenario.to_problem()

events = tuple(scenario.script.events) + (
    ScriptEvent(18, "agent", "relay", "", 0),  # dies during cycle 0's execute phase
    ScriptEvent(60, "agent", "relay", "", 1),  # recovers before cycle 2
)
trace = run_cycles(problem, WorldScript(events), scenario.cycle, 3, scenario.capabilities())

for record in trace.records:
    print(record.line())

print()
digests = {}
for record in trace.select(phase="plan", event="digest"):
    digests.setdefault(record.cycle, set()).add(record.payload.split()[0])
for cycle, shas in sorted(digests.items()):
    print(f"cycle {cycle}: {len(shas)} distinct schedule digest(s)")
print("replay is byte-identical:",
      run_cycles(problem, WorldScript(events), scenario.cycle, 3,
                 scenario.capabilities()).to_text() == trace.to_text())
