import json
import subprocess
import sys

import pytest

from imbench import cli
from imbench.bench import algorithms as bench_algorithms
from imbench.config import RunConfig


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_table1_default(capsys):
    code, out, _ = run(capsys, "table1")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "epsilon,chebyshev_n,chernoff_n"
    assert "0.05,400000,18243" in lines and "0.2,25000,1141" in lines
    assert len(lines) == 9


def test_table1_single_epsilon(capsys):
    # [DERIVED] 0.25/(1e-3*0.25*0.25) = 4000; ceil(3 ln 2000 / 0.125) = 183
    code, out, _ = run(capsys, "table1", "--epsilons", "0.5")
    assert code == 0 and out.splitlines()[1:] == ["0.5,4000,183"]


def test_ingest_zero_label(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("# comment\n0 1\n1 2\n2 0\n")
    report = tmp_path / "r.json"
    code, out, err = run(capsys, "ingest", str(f), "--scheme", "wc", "--report", str(report))
    assert code == 0 and "contained_zero=true" in err
    assert out.splitlines() == ["src,dst,p", "0,1,1.0", "1,2,1.0", "2,0,1.0"]
    assert json.loads(report.read_text())["normalization"]["contained_zero"] is True


def test_ingest_undirected_doubles_arcs(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n2 3\n3 4\n4 1\n1 3\n")
    code, out, _ = run(capsys, "ingest", str(f), "--undirected", "--scheme", "wc")
    assert code == 0 and len(out.splitlines()) == 1 + 10


def test_ingest_malformed_line(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("1 2\n" * 6 + "3 x\n")
    code, _, err = run(capsys, "ingest", str(f))
    assert code == 2 and "line 7" in err


def test_missing_graph_and_bad_flags(capsys):
    assert run(capsys, "simulate", "--graph", "/nonexistent", "--scheme", "wc", "--seeds", "0",
               "--seed", "1")[0] == 2
    assert run(capsys, "select", "--bogus")[0] == 2


def test_counterexample_default(capsys):
    code, out, _ = run(capsys, "counterexample", "--n", "10", "--r", "10000", "--seed", "3")
    assert code == 0 and "PASS" in out
    assert "closed form 11" in out and "9.7468" in out


def test_counterexample_exact_subgadget(capsys):
    code, out, _ = run(capsys, "counterexample", "--n", "2", "--r", "1000", "--exact", "--seed", "3")
    assert code == 0 and "exact root spread: 3" in out


def test_counterexample_preconditions(capsys, monkeypatch):
    assert run(capsys, "counterexample", "--n", "10", "--r", "10")[0] == 2
    monkeypatch.setenv("IMBENCH_MEMORY_CAP", "1000")
    assert run(capsys, "counterexample", "--n", "10", "--r", "1000")[0] == 3


def test_generate_and_simulate(tmp_path, capsys):
    out = tmp_path / "g.csv"
    assert run(capsys, "generate", "random:n=30,m=90", "--scheme", "uniform:0.1", "--seed", "2",
               "-o", str(out))[0] == 0
    code, text, _ = run(capsys, "simulate", "--graph", str(out), "--seeds", "0,1", "--rounds", "500",
                        "--seed", "4")
    assert code == 0 and text.strip()


def test_seed_is_generated_and_printed(tmp_path, capsys):
    out = tmp_path / "g.csv"
    code, _, err = run(capsys, "generate", "random:n=10,m=20", "--scheme", "wc", "-o", str(out))
    assert code == 0 and "seed" in err


def test_select_is_reproducible(tmp_path, capsys):
    g = tmp_path / "g.csv"
    run(capsys, "generate", "powerlaw:n=200,m=800", "--scheme", "wc", "--seed", "1", "-o", str(g))
    args = ["select", "--graph", str(g), "--k", "3", "--algorithm", "imm", "--param", "0.3", "--seed", "9"]
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == 0 and first[1] == second[1]
    assert first[1].splitlines()[0] == "rank,node_label,marginal_gain_estimate"


def test_bench_flip_config(tmp_path, capsys):
    cfg = tmp_path / "flip.json"
    cfg.write_text(json.dumps({"subcommand": "bench", "budget": 1e6, "seed": 1,
                               "extra": {"pipeline": "compare", "algorithms": ["flip-pair"]}}))
    code, out, _ = run(capsys, "bench", "--config", str(cfg), "-o", str(tmp_path / "rep"))
    assert code == 0 and "rankings differ" in out
    doc = json.loads((tmp_path / "rep.json").read_text())
    assert doc["ranking_flips"] is True
    assert doc["sound"]["ranking"] == ["A", "B"] and doc["flawed"]["ranking"] == ["B", "A"]
    assert doc["config"]["seed"] == 1
    assert (tmp_path / "rep.curves.csv").exists()


def test_bench_shared_seed_config(tmp_path, capsys):
    g = tmp_path / "g.csv"
    run(capsys, "generate", "random:n=40,m=120", "--scheme", "uniform:0.1", "--seed", "1", "-o", str(g))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"graph": str(g), "k": 2, "rounds": 32, "seed": 5,
                               "extra": {"pipeline": "shared-seed", "algorithms": ["celf", "celf++"],
                                         "run_count": 3}}))
    code, out, _ = run(capsys, "bench", "--config", str(cfg))
    assert code == 0 and "paired t-test celf vs celf++" in out and "p=" in out


def test_bench_algorithm_failure_exit_4(tmp_path, capsys, monkeypatch):
    def boom(*a):
        raise RuntimeError("kaput")
    monkeypatch.setitem(bench_algorithms._REGISTRY, "celf", boom)
    g = tmp_path / "g.csv"
    run(capsys, "generate", "random:n=20,m=40", "--scheme", "wc", "--seed", "1", "-o", str(g))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"graph": str(g), "k": 2, "seed": 5, "params": [10],
                               "extra": {"algorithms": ["celf"]}}))
    code, _, err = run(capsys, "bench", "--config", str(cfg))
    assert code == 4 and "kaput" in err


def test_bench_missing_graph(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"graph": str(tmp_path / "nope.txt"), "scheme": "wc", "k": 2, "seed": 1,
                               "params": [10], "extra": {"algorithms": ["celf"]}}))
    assert run(capsys, "bench", "--config", str(cfg))[0] == 2


def test_config_round_trip_and_precedence():
    cfg = RunConfig(subcommand="sweep", graph="g.txt", k=5, params=[0.1, 0.2], seed=3,
                    extra={"a": 1})
    assert RunConfig.from_json(cfg.to_json()) == cfg
    merged = cfg.merged({"k": 7, "seed": None, "extra": {"b": 2}})
    assert merged.k == 7 and merged.seed == 3 and merged.extra == {"a": 1, "b": 2}
    with pytest.raises(ValueError):
        RunConfig.from_dict({"kk": 1})


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "imbench.cli", "table1", "--epsilons", "0.4"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "0.4,6250,286" in res.stdout
