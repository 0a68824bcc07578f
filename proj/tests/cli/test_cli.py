"""End-to-end checks of the oscseg command-line tool.

The binary comes from $OSCSEG_BIN; ctest sets it.
"""

import json
import os
import random
import re
import subprocess
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parents[2]
DATA = Path(__file__).resolve().parent / "data"
BIN = os.environ.get("OSCSEG_BIN", str(ROOT / "build" / "oscseg"))
SCHEMA = json.loads((ROOT / "docs" / "report.schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)
SCENARIOS = ["1a", "1b", "1c", "2a", "2b", "3", "4", "5", "6"]


def run(*args, check=True):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} exited {proc.returncode}: {proc.stderr}")
    return proc


def load(path):
    return json.loads(Path(path).read_text())


def simulate(tmp_path, scenario, *extra, seed=1):
    out = tmp_path / f"sim_{scenario}_{seed}.csv"
    run("simulate", "--scenario", scenario, "--seed", seed, "--out", out, *extra)
    return out, load(out.with_suffix(".truth.json"))


def write_report(path, T, cps, d=1):
    """Minimal detection report carrying only what evaluate reads."""
    report = {
        "kind": "detection",
        "partition": {"T": T, "cps": cps},
        "series": {"observed": [[0.0] * T] * d, "fitted": [[0.0] * T] * d},
    }
    Path(path).write_text(json.dumps(report))


def write_truth(path, T, cps):
    Path(path).write_text(json.dumps({"kind": "truth", "partition": {"T": T, "cps": cps}, "mean": None}))


def coverage_oracle(truth, est, T):
    def sets(cps):
        b = [0, *cps, T]
        return [set(range(b[j] + 1, b[j + 1] + 1)) for j in range(len(b) - 1)]

    total = 0.0
    for a in sets(truth):
        total += len(a) * max(len(a & e) / len(a | e) for e in sets(est))
    return total / T


def hausdorff_oracle(truth, est, T):
    a, b = [0, *truth, T], [0, *est, T]
    d1 = max(min(abs(x - y) for y in b) for x in a)
    d2 = max(min(abs(x - y) for y in a) for x in b)
    return max(d1, d2) / T


def test_simulate_scenario_1a(tmp_path):
    out, truth = simulate(tmp_path, "1a", "--sigma", 1, seed=3)
    lines = out.read_text().splitlines()
    assert lines[0] == "t,y1"
    assert len(lines) == 901
    assert truth["partition"]["cps"] == [300, 650]
    VALIDATOR.validate(truth)


def test_simulate_scenario_6_has_no_change_points(tmp_path):
    _, truth = simulate(tmp_path, "6")
    assert truth["partition"]["cps"] == []


def test_simulate_scenario_2a_spacing(tmp_path):
    _, truth = simulate(tmp_path, "2a", "--T", 1000, "--m", 4, seed=11)
    cps = truth["partition"]["cps"]
    assert len(cps) == 4
    assert min(b - a for a, b in zip(cps, cps[1:])) >= 100


def test_simulate_writes_stdout_and_explicit_truth(tmp_path):
    proc = run("simulate", "--scenario", "6", "--T", 50, "--truth", tmp_path / "t.json")
    assert len(proc.stdout.splitlines()) == 51
    assert load(tmp_path / "t.json")["T"] == 50


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_pipeline_runs_for_every_scenario(tmp_path, scenario):
    csv, truth = simulate(tmp_path, scenario, seed=4)
    report_path = tmp_path / "report.json"
    run("detect", "--input", csv, "--threads", 1, "--out", report_path)
    report = load(report_path)
    VALIDATOR.validate(report)
    VALIDATOR.validate(truth)
    assert report["partition"]["cps"] == sorted(report["partition"]["cps"])
    assert len(report["segments"]) == len(report["partition"]["cps"]) + 1
    assert all(len(s["series"]) == truth["d"] for s in report["segments"])

    eval_path = tmp_path / "eval.json"
    run("evaluate", "--report", report_path, "--truth", tmp_path / f"sim_{scenario}_4.truth.json", "--out", eval_path)
    evaluation = load(eval_path)
    VALIDATOR.validate(evaluation)
    assert 0.0 <= evaluation["coverage"] <= 1.0
    assert (evaluation["rmse_signal"] is None) == (truth["mean"] is None)
    assert (evaluation["peak_mse"] is not None) == (scenario == "5")

    run("plot", "--report", report_path, "--out", tmp_path / "plot.svg")
    svg = (tmp_path / "plot.svg").read_text()
    assert svg.count('class="panel"') == truth["d"]


def test_detect_example_flags(tmp_path):
    csv, _ = simulate(tmp_path, "1a", seed=7)
    proc = run("detect", "--input", csv, "--grid", "periodogram:50", "--ne", 2, "--delta", 1.01,
               "--select", "mdl", "--seed", 7)
    report = json.loads(proc.stdout)
    assert report["config"]["seed"] == 7
    assert report["config"]["grid"] == "periodogram:50"
    assert report["partition"]["cps"] == sorted(report["partition"]["cps"])


def test_detect_auto_ne(tmp_path):
    csv, _ = simulate(tmp_path, "1a", seed=8)
    report = json.loads(run("detect", "--input", csv, "--ne", "auto:4").stdout)
    assert 1 <= report["chosen_ne"] <= 4
    assert [t["ne"] for t in report["criterion"]["ne_trace"]] == [1, 2, 3, 4]


def test_detect_is_deterministic(tmp_path):
    csv, _ = simulate(tmp_path, "3", "--d", 2, seed=9)
    outputs = []
    for threads in (1, 1):
        path = tmp_path / f"r{len(outputs)}.json"
        run("detect", "--input", csv, "--threads", threads, "--out", path)
        text = path.read_text()
        # timings is the last top-level block
        head, sep, _ = text.rpartition('\n  "timings"')
        assert sep
        outputs.append(head)
    assert outputs[0] == outputs[1]


def test_thread_count_does_not_change_results(tmp_path):
    csv, _ = simulate(tmp_path, "2a", seed=10)
    a = json.loads(run("detect", "--input", csv, "--threads", 1).stdout)
    env = dict(os.environ, OSCSEG_THREADS="3")
    b = json.loads(subprocess.run([BIN, "detect", "--input", str(csv)], capture_output=True, text=True,
                                  env=env, check=True).stdout)
    assert b["config"]["threads"] == 3
    for key in ("partition", "segments", "tree", "criterion", "series"):
        assert a[key] == b[key]


def test_config_file(tmp_path):
    csv, _ = simulate(tmp_path, "1a", seed=12)
    cfg = tmp_path / "run.cfg"
    cfg.write_text('# detection settings\ngrid = "equal:40"\nne = 1\ndelta = 1.02\n')
    report = json.loads(run("detect", "--input", csv, "--config", cfg).stdout)
    assert report["config"]["grid"] == "equal:40"
    assert report["config"]["ne"] == 1
    assert report["config"]["delta"] == 1.02
    report = json.loads(run("detect", "--input", csv, "--config", cfg, "--ne", 2).stdout)
    assert report["config"]["ne"] == 2

    cfg.write_text("unknown_key = 3\n")
    assert run("detect", "--input", csv, "--config", cfg, check=False).returncode == 3
    cfg.write_text("not a pair\n")
    assert run("detect", "--input", csv, "--config", cfg, check=False).returncode == 3


def test_index_column_is_echoed(tmp_path):
    csv = tmp_path / "idx.csv"
    rows = ["time,a,b"] + [f"{10 + 2 * t},{(-1) ** t * 0.5 + t % 7},{t % 5}" for t in range(80)]
    csv.write_text("\r\n".join(rows) + "\r\n")
    report = json.loads(run("detect", "--input", csv, "--grid", "periodogram:10").stdout)
    assert report["input"]["index"][:3] == [10, 12, 14]
    assert report["input"]["labels"] == ["a", "b"]


@pytest.mark.parametrize(
    "text, where",
    [
        ("t,y\n1,2\n2,abc\n", ":3:3:"),
        ("t,y\n1,2\n2,nan\n", ":3:3:"),
        ("t,y\n1,2\n2,\"3\n", ":4:"),
        ("t,y\n1,2\n2,3,4\n", ":3:"),
        ("", "empty input"),
    ],
)
def test_malformed_csv_exits_2(tmp_path, text, where):
    csv = tmp_path / "bad.csv"
    csv.write_text(text)
    proc = run("detect", "--input", csv, check=False)
    assert proc.returncode == 2
    assert where in proc.stderr


def test_config_violations_exit_3(tmp_path):
    csv, _ = simulate(tmp_path, "6", "--T", 200)
    for flags in (["--delta", "0.9"], ["--ne", "auto:0"], ["--ne", "0"], ["--grid", "fft:3"],
                  ["--select", "best"], ["--min-seg", "1"], ["--bogus"]):
        assert run("detect", "--input", csv, *flags, check=False).returncode == 3, flags
    assert run("simulate", "--scenario", "7", check=False).returncode == 3
    assert run("simulate", "--scenario", "2a", "--T", 500, "--m", 5, check=False).returncode == 3
    assert run("detect", "--input", tmp_path / "missing.csv", check=False).returncode == 2


def test_evaluate_identical_and_displaced(tmp_path):
    write_report(tmp_path / "r.json", 100, [50])
    write_truth(tmp_path / "t.json", 100, [50])
    ev = json.loads(run("evaluate", "--report", tmp_path / "r.json", "--truth", tmp_path / "t.json").stdout)
    assert (ev["coverage"], ev["hausdorff"], ev["bias"]) == (1.0, 0.0, 0)
    write_truth(tmp_path / "t.json", 100, [60])
    ev = json.loads(run("evaluate", "--report", tmp_path / "r.json", "--truth", tmp_path / "t.json").stdout)
    assert ev["hausdorff"] == pytest.approx(0.1, abs=1e-15)
    write_truth(tmp_path / "t.json", 120, [60])
    assert run("evaluate", "--report", tmp_path / "r.json", "--truth", tmp_path / "t.json",
               check=False).returncode == 3


def test_evaluate_matches_oracles(tmp_path):
    rng = random.Random(5)
    for _ in range(25):
        T = rng.randint(2, 40)
        a = sorted(rng.sample(range(1, T), rng.randint(0, min(T - 1, 5))))
        b = sorted(rng.sample(range(1, T), rng.randint(0, min(T - 1, 5))))
        write_report(tmp_path / "r.json", T, b)
        write_truth(tmp_path / "t.json", T, a)
        ev = json.loads(run("evaluate", "--report", tmp_path / "r.json", "--truth", tmp_path / "t.json").stdout)
        assert ev["coverage"] == pytest.approx(coverage_oracle(a, b, T), rel=1e-12)
        assert ev["hausdorff"] == hausdorff_oracle(a, b, T)
        assert ev["bias"] == abs(len(a) - len(b))


def test_plot_matches_golden_file(tmp_path):
    out = tmp_path / "plot.svg"
    run("plot", "--report", DATA / "golden_report.json", "--out", out)
    assert out.read_bytes() == (DATA / "golden_plot.svg").read_bytes()


def test_plot_without_change_points(tmp_path):
    report = load(DATA / "golden_report.json")
    report["partition"]["cps"] = []
    (tmp_path / "r.json").write_text(json.dumps(report))
    svg = run("plot", "--report", tmp_path / "r.json").stdout
    assert 'class="cp"' not in svg
    assert svg.count('class="panel"') == 1


def test_plot_unreadable_report_exits_2(tmp_path):
    (tmp_path / "r.json").write_text("{ not json")
    assert run("plot", "--report", tmp_path / "r.json", check=False).returncode == 2
    assert run("plot", "--report", tmp_path / "missing.json", check=False).returncode == 2
    (tmp_path / "t.json").write_text('{"kind": "truth"}')
    assert run("plot", "--report", tmp_path / "t.json", check=False).returncode == 2


def test_help_and_version():
    assert run("--help").returncode == 0
    assert re.match(r"oscseg \d+\.\d+\.\d+", run("--version").stdout)
    assert run(check=False).returncode == 3
