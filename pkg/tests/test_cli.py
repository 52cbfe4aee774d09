"""Command-line interface: exit codes, outputs, frozen CSV header."""

import csv
import io

import pytest

from commsched.cli import BENCHMARK_HEADER, main
from commsched.scenarios import canned_scenario, generate_random

MINIMAL = """SCENARIO v1
[AGENTS]
agent id=a0 base=0 capability=7
cost agent=a0 task=t0 time=1 energy=1
[TASKS]
task id=t0 required=1 reward=0 size=0 preds= owner=a0 category= storage=0
[CONTACTS]
[SCRIPT]
[CONFIG]
horizon seconds=4 steps=4
objective kind=makespan
cycle broadcast=1 plan=1 execute=4 budget_nodes=100
comm_energy per_bit=0
[END]
"""

CYCLIC = MINIMAL.replace(
    "task id=t0 required=1 reward=0 size=0 preds= owner=a0 category= storage=0",
    "task id=t0 required=1 reward=0 size=0 preds=t1 owner=a0 category= storage=0\n"
    "task id=t1 required=1 reward=0 size=0 preds=t0 owner=a0 category= storage=0",
).replace("cost agent=a0 task=t0 time=1 energy=1",
          "cost agent=a0 task=t0 time=1 energy=1\ncost agent=a0 task=t1 time=1 energy=1")


@pytest.fixture
def scenario_file(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


class TestSolve:
    def test_minimal_scenario(self, tmp_path, scenario_file):
        out = tmp_path / "result.txt"
        rc = main(["solve", scenario_file("min.scn", MINIMAL), "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert "status optimal" in text
        assert text.count("placement ") == 1

    def test_relay_output_contains_two_hops(self, tmp_path, scenario_file):
        out = tmp_path / "relay.txt"
        rc = main(["solve", scenario_file("relay.scn", canned_scenario("relay").to_text()),
                   "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert "comm src=rover dst=relay task=sample_rover" in text
        assert "comm src=relay dst=base task=sample_rover" in text

    def test_cyclic_scenario_exits_2(self, capsys, scenario_file):
        rc = main(["solve", scenario_file("cyc.scn", CYCLIC)])
        assert rc == 2
        assert "cycle" in capsys.readouterr().err

    def test_missing_file_exits_2(self):
        assert main(["solve", "/nonexistent.scn"]) == 2

    def test_objective_override(self, tmp_path, scenario_file):
        out = tmp_path / "r.txt"
        rc = main(["solve", scenario_file("min.scn", MINIMAL), "--objective", "reward",
                   "--out", str(out)])
        assert rc == 0
        assert "value 0" in out.read_text()


class TestSimulate:
    def test_static_scenario_digests_agree(self, tmp_path, scenario_file):
        out = tmp_path / "sim"
        rc = main(["simulate", scenario_file("relay.scn", canned_scenario("relay").to_text()),
                   "--cycles", "2", "--out", str(out)])
        assert rc == 0
        digests = (out / "digests.txt").read_text().splitlines()
        by_cycle = {}
        for line in digests:
            cycle, agent, sha = line.split()
            by_cycle.setdefault(cycle, set()).add(sha)
        assert all(len(shas) == 1 for shas in by_cycle.values())
        assert (out / "trace.txt").exists()

    def test_rerun_reproduces_trace(self, tmp_path, scenario_file):
        path = scenario_file("mule.scn", canned_scenario("data_mule").to_text())
        outs = []
        for sub in ("s1", "s2"):
            out = tmp_path / sub
            assert main(["simulate", path, "--cycles", "2", "--out", str(out)]) == 0
            outs.append((out / "trace.txt").read_text())
        assert outs[0] == outs[1]


class TestBenchmark:
    def test_header_is_frozen(self):
        assert BENCHMARK_HEADER[:5] == ["scenario", "objective", "budget_nodes", "status", "nodes"]
        assert BENCHMARK_HEADER[-1] == "error"

    def test_zero_science_corpus_has_zero_deltas(self, tmp_path):
        paths = []
        for seed in range(2):
            sc = generate_random(3, 0.0, 1, seed=seed)
            path = tmp_path / f"s{seed}.scn"
            path.write_text(sc.to_text())
            paths.append(str(path))
        out = tmp_path / "bench.csv"
        rc = main(["benchmark", *paths, "--objective", "reward", "--budget-nodes", "500",
                   "--out", str(out)])
        assert rc == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert len(rows) == 2
        for row in rows:
            assert row["error"] == ""
            assert row["shared_value"] == row["selfish_value"] == "0"
            assert row["collected_shared"] == row["collected_selfish"] == "0"

    def test_broken_scenario_goes_to_error_column(self, tmp_path, scenario_file):
        bad = scenario_file("bad.scn", "not a scenario\n")
        out = tmp_path / "bench.csv"
        rc = main(["benchmark", bad, "--out", str(out)])
        assert rc == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert rows and all(r["error"] for r in rows)


class TestRender:
    def test_schedule_svg(self, tmp_path, scenario_file):
        sched = tmp_path / "sched.txt"
        rc = main(["solve", scenario_file("relay.scn", canned_scenario("relay").to_text()),
                   "--out", str(sched)])
        assert rc == 0
        out = tmp_path / "sched.svg"
        assert main(["render", str(sched), "--out", str(out)]) == 0
        svg = out.read_text()
        assert svg.startswith("<svg") and "sample_rover" in svg

    def test_identical_bytes(self, tmp_path, scenario_file):
        sched = tmp_path / "sched.txt"
        main(["solve", scenario_file("relay.scn", canned_scenario("relay").to_text()),
              "--out", str(sched)])
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        assert main(["render", str(sched), "--out", str(a)]) == 0
        assert main(["render", str(sched), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_input_exits_2(self, tmp_path):
        assert main(["render", "/nonexistent", "--out", str(tmp_path / "x.svg")]) == 2


class TestExportAndGenerate:
    def test_export_declares_binaries(self, tmp_path, scenario_file):
        out = tmp_path / "model.lp"
        rc = main(["export", scenario_file("relay.scn", canned_scenario("relay").to_text()),
                   "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert "Binaries" in text and text.endswith("End\n")

    def test_generate_round_trips(self, tmp_path):
        out = tmp_path / "gen.scn"
        rc = main(["generate", "--agents", "4", "--science-fraction", "0.5",
                   "--samples", "2", "--seed", "3", "--out", str(out)])
        assert rc == 0
        from commsched.scenarios import parse_scenario

        text = out.read_text()
        assert parse_scenario(text).to_text() == text
