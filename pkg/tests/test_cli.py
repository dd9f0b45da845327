import json
import os
import subprocess
import sys

import pytest

from degrenet import __version__
from degrenet.cli import main
from degrenet.graph_io import write_result
from degrenet.degree_law import stationary_pmf


@pytest.fixture(autouse=True)
def fixed_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_analytic_csv(capsys):
    code, out, _ = run(capsys, "analytic", "--policy", "linear", "--mu", "2", "--k-max", "3",
                       "--tail-tol", "1", "--format", "csv")
    assert code == 0
    assert out == "k,probability\n1,0.721347520444482\n2,0.180336880111120\n3,0.060112293370373\n"


def test_analytic_non_stationary(capsys):
    code, out, err = run(capsys, "analytic", "--policy", "linear", "--mu", "1.0")
    assert code == 3
    assert out == ""
    assert "mu > 1" in err and len(err.strip().splitlines()) == 1


def test_analytic_truncation_hint(capsys):
    code, _, err = run(capsys, "analytic", "--mu", "1.01", "--k-max", "50")
    assert code == 3 and "--k-max" in err


def test_analytic_log_head_direction(capsys):
    d = run_json(capsys, "analytic", "--policy", "log", "--mu", "0.4", "--k-max", "500")
    assert d["probs"][1] < d["probs"][0]
    d = run_json(capsys, "analytic", "--policy", "log", "--mu", "0.3")
    assert d["probs"][1] > d["probs"][0]


def test_metadata_block(capsys):
    d = run_json(capsys, "--seed", "5", "analytic", "--mu", "2")
    meta = d["metadata"]
    assert meta["version"] == __version__
    assert meta["seed"] == 5
    assert meta["config"]["mu"] == 2.0
    assert meta["wall_clock"]["started_at"].startswith("2023-11-14T22:13:20")
    assert d["schema"] == "degrenet/v1/stationary_pmf"


def test_thresholds(capsys):
    d = run_json(capsys, "thresholds", "--policy", "log", "--k", "2")
    assert round(d["mu_star"], 6) == 0.346574
    assert abs(d["metadata"]["root_finder_mu"] - d["mu_star"]) < 1e-9
    d = run_json(capsys, "thresholds", "--k", "3")
    assert round(d["mu_star"], 6) == 0.366204
    code, _, _ = run(capsys, "thresholds", "--k", "1")
    assert code == 2
    code, _, _ = run(capsys, "thresholds", "--policy", "linear", "--k", "2")
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "analytic")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "analytic", "--mu", "abc")[0] == 2


def test_simulate_chain_metrics(capsys):
    d = run_json(capsys, "simulate-chain", "--policy", "linear", "--mu", "3", "--t-end", "1e5", "--seed", "0")
    assert d["metadata"]["metrics_vs_theory"]["rho"] >= 0.97
    assert d["metadata"]["seed"] == 0
    assert d["metadata"]["config"]["t-end"] == 1e5


def test_simulate_chain_zero_horizon(capsys):
    d = run_json(capsys, "simulate-chain", "--mu", "2", "--t-end", "0", "--k0", "3")
    assert d["probs"] == [[3, 1.0]]


def test_simulate_chain_log_skewed(capsys):
    d = run_json(capsys, "simulate-chain", "--policy", "log", "--mu", "0.15", "--t-end", "1e5")
    probs = dict(d["probs"])
    assert max(probs, key=probs.get) > 1


def test_simulate_chain_replicas(capsys):
    d = run_json(capsys, "simulate-chain", "--mu", "2", "--t-end", "2e3", "--replicas", "3")
    assert len(d["metadata"]["replicas"]) == 3
    assert len(d["metadata"]["replica_metrics_vs_theory"]) == 3
    assert abs(sum(p for _, p in d["probs"]) - 1) < 1e-12


def test_simulate_network(capsys):
    d = run_json(capsys, "simulate-network", "--m0", "10", "--m", "3", "--policy", "linear", "--mu", "1.01",
                 "--t-end", "3.5", "--snapshots", "1,2,3.5")
    assert len(d["snapshots"]) >= 2
    assert d["metadata"]["extinct"] is False
    d = run_json(capsys, "simulate-network", "--mu", "2", "--t-end", "0")
    assert len(d["snapshots"]) == 1


def test_simulate_network_extinction_exit_zero(capsys):
    d = run_json(capsys, "simulate-network", "--m0", "2", "--m", "1", "--init", "ring", "--mu", "50",
                 "--t-end", "10")
    assert d["metadata"]["extinct"] is True
    assert d["extinct"] is True


def test_simulate_network_rejects_csv(capsys):
    assert run(capsys, "simulate-network", "--mu", "2", "--t-end", "1", "--format", "csv")[0] == 2


@pytest.fixture
def mu2_pmf_file(tmp_path):
    path = tmp_path / "mu2.csv"
    write_result(stationary_pmf("linear", 2.0), "csv", str(path))
    return str(path)


def test_fit_self(capsys, mu2_pmf_file):
    d = run_json(capsys, "fit", "--input", mu2_pmf_file, "--policy", "linear")
    assert abs(d["mu_star"] - 2.0) < 1e-3
    assert d["schema"] == "degrenet/v1/fit_report"


def test_fit_bounds_outside_region(capsys, mu2_pmf_file):
    code, _, err = run(capsys, "fit", "--input", mu2_pmf_file, "--mu-lo", "0.5", "--policy", "linear")
    assert code == 2 and "stationary" in err


def test_fit_edge_list(capsys, tmp_path):
    path = tmp_path / "star.txt"
    path.write_text("# star plus path\n0 1\n0 2\n0 3\n3 4\n4 5\n")
    d = run_json(capsys, "fit", "--input", str(path), "--input-kind", "edges", "--policy", "log")
    assert d["metadata"]["input"]["vertex_count"] == 6
    assert d["mu_star"] > 0


def test_compare(capsys, tmp_path, mu2_pmf_file):
    d = run_json(capsys, "compare", "--a", mu2_pmf_file, "--b", mu2_pmf_file)
    assert (d["rho"], d["kl"], d["js"], d["js_midpoint"]) == (1.0, 0.0, 0.0, 0.0)
    other = tmp_path / "mu5.json"
    write_result(stationary_pmf("linear", 5.0), "json", str(other))
    d = run_json(capsys, "compare", "--a", mu2_pmf_file, "--b", str(other))
    assert d["kl"] > 0 and d["js"] > 0 and d["js_midpoint"] > 0 and d["rho"] < 1


def test_compare_chain_against_theory(capsys, tmp_path):
    chain, theory = tmp_path / "chain.json", tmp_path / "theory.json"
    assert main(["simulate-chain", "--mu", "4", "--t-end", "1e5", "--output", str(chain)]) == 0
    assert main(["analytic", "--mu", "4", "--output", str(theory)]) == 0
    capsys.readouterr()
    d = run_json(capsys, "compare", "--a", str(chain), "--b", str(theory))
    assert d["js_midpoint"] <= 0.05


def test_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "compare", "--a", str(tmp_path / "missing.csv"), "--b", str(tmp_path / "x.csv"))
    assert code == 4
    code, _, _ = run(capsys, "fit", "--input", str(tmp_path / "nope.txt"))
    assert code == 4


def test_byte_identical_outputs_via_subprocess(tmp_path):
    env = {**os.environ, "SOURCE_DATE_EPOCH": "1700000000"}
    outputs = []
    path = tmp_path / "run.json"
    for _ in range(2):
        subprocess.run(
            [sys.executable, "-m", "degrenet", "simulate-network", "--mu", "1.41", "--t-end", "2",
             "--seed", "7", "--output", str(path), "--quiet"],
            check=True, env=env,
        )
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
