import csv
import json

import pytest

from helpers import unsat_corpus
from sampletest.cli import main, read_assignment
from sampletest.dimacs import load_dimacs, save_dimacs
from sampletest.distributions import sample_formula_fixed_m
from sampletest.rng import RandomStream


def test_gen_planted_and_verify(tmp_path, capsys):
    out = tmp_path / "p.cnf"
    assert main(["gen", "--mode", "planted", "--n", "16", "--k", "4", "--m", "163", "--seed", "7",
                 "--out", str(out)]) == 0
    f = load_dimacs(out)
    assert (f.n, f.k, f.m) == (16, 4, 163)
    assert f.is_satisfied_by(read_assignment(out.with_suffix(".sol"), 16))
    assert main(["verify", str(out), str(out.with_suffix(".sol"))]) == 0


def test_gen_is_byte_identical(tmp_path):
    args = ["gen", "--mode", "fixed-m", "--n", "30", "--k", "3", "--m", "120", "--seed", "11", "--count", "3"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    for i in range(3):
        name = f"instance_{i:04d}.cnf"
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "instance_0000.cnf").read_bytes() != (tmp_path / "a" / "instance_0001.cnf").read_bytes()


def test_gen_threshold_window(tmp_path, capsys):
    assert main(["gen", "--mode", "threshold-poisson", "--n", "100", "--k", "4", "--seed", "1",
                 "--count", "1000", "--out", str(tmp_path / "t")]) == 0
    ms = []
    for path in sorted((tmp_path / "t").glob("*.cnf")):
        with open(path) as fh:
            for line in fh:
                if line.startswith("p cnf"):
                    ms.append(int(line.split()[3]))
                    break
    assert len(ms) == 1000
    assert sum(924 <= m <= 1124 for m in ms) >= 990


def test_config_file_and_flag_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# planted sweep\nmode = planted\nn = 12\nk = 3\nm = 30\nseed = 4\n")
    out = tmp_path / "c.cnf"
    assert main(["gen", "--config", str(cfg), "--out", str(out)]) == 0
    assert load_dimacs(out).n == 12
    assert "seed=4" in out.read_text().splitlines()[0]
    assert main(["gen", "--config", str(cfg), "--n", "13", "--out", str(out)]) == 0
    assert load_dimacs(out).n == 13


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("SAMPLETEST_SEED", "99")
    out = tmp_path / "e.cnf"
    assert main(["gen", "--n", "8", "--k", "3", "--m", "5", "--out", str(out)]) == 0
    assert "seed=99" in out.read_text()


def test_bad_config_is_structural(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["gen", "--config", str(cfg), "--n", "4", "--k", "2", "--m", "1"]) == 3
    cfg.write_text("mode = sideways\n")
    assert main(["gen", "--config", str(cfg), "--n", "4", "--k", "2", "--m", "1"]) == 3


def test_solve_found_and_reverified(tmp_path, capsys):
    cnf = tmp_path / "p.cnf"
    main(["gen", "--mode", "planted", "--n", "16", "--k", "4", "--m", "163", "--seed", "2", "--out", str(cnf)])
    capsys.readouterr()
    res = tmp_path / "r.json"
    code = main(["solve", str(cnf), "--k-star", "4", "--alpha-n", "4", "--seed", "1", "--json-out", str(res)])
    payload = json.loads(res.read_text())
    assert code == 0 and payload["status"] == "found"
    assert main(["verify", str(cnf), str(res)]) == 0


def test_solve_not_found_exit_1(tmp_path, capsys):
    cnf = tmp_path / "u.cnf"
    save_dimacs(unsat_corpus(1)[0], cnf)
    assert main(["solve", str(cnf)]) == 1
    assert json.loads(capsys.readouterr().out)["status"] == "not_found"


def test_solve_inconclusive_exit_2(tmp_path, capsys):
    cnf = tmp_path / "big.cnf"
    save_dimacs(sample_formula_fixed_m(30, 3, 300, RandomStream(1)), cnf)
    assert main(["solve", str(cnf), "--restarts", "2"]) == 2


def test_verify_rejects_bad_assignment(tmp_path, capsys):
    cnf = tmp_path / "u.cnf"
    save_dimacs(unsat_corpus(1)[0], cnf)
    (tmp_path / "a.txt").write_text("0" * 14)
    assert main(["verify", str(cnf), str(tmp_path / "a.txt")]) == 1
    (tmp_path / "short.txt").write_text("0" * 13)
    assert main(["verify", str(cnf), str(tmp_path / "short.txt")]) == 3


def test_malformed_dimacs_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 2 1\n1 5 0\n")
    assert main(["solve", str(bad)]) == 3
    assert main(["solve", str(tmp_path / "missing.cnf")]) == 3


def test_validate_writes_csv(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert main(["validate", "expected-count", "--n", "10", "--k", "3", "--m", "15", "--formulas", "300",
                 "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert rows and all(r["passed"] == "True" for r in rows)
    assert "PASS" in capsys.readouterr().out


def test_bench_columns(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--n-values", "10,12,14", "--k", "4", "--density", "8", "--seeds", "2",
                 "--k-star", "4", "--alpha-n", "2", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6
    for r in rows:
        assert int(r["samples_used"]) <= int(r["sample_budget"])
        assert int(r["promising"]) <= float(r["cap_S"]) + 1
        assert int(r["searches_triggered"]) <= int(r["promising"])
        assert r["status"] in {"found", "not_found"}
        assert float(r["predicted_clause_evaluations"]) > 0


def test_bench_cost_grows_with_n(tmp_path):
    out = tmp_path / "grow.csv"
    assert main(["bench", "--n-values", "10,14,18", "--k", "4", "--density", "8", "--seeds", "8",
                 "--k-star", "4", "--alpha-n", "2", "--csv", str(out)]) == 0
    by_n = {}
    for r in csv.DictReader(out.open()):
        by_n.setdefault(int(r["n"]), []).append(int(r["clause_evaluations"]))
    means = [sum(v) / len(v) for _, v in sorted(by_n.items())]
    assert means == sorted(means) and means[0] < means[-1]
