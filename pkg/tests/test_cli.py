import csv
import io
import json
import math
import os

import numpy as np
import pytest

from ctqw import cli
from ctqw.circuit import reload_emitted, simulate
from ctqw.builders import build_search
from ctqw.spectral import Family, GraphSpec


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_build_complete_reports_t_opt(capsys):
    code, out, _ = run(capsys, "build", "--graph", "complete", "--qubits", "4")
    assert code == 0
    assert "width: 4" in out
    assert "t_opt = 6" in out
    assert "raw gates:" in out and "decomposed gates:" in out
    assert math.floor(math.pi / 2 * 4) == 6


def test_build_bipartite_below_minimum(capsys):
    code, _, err = run(capsys, "build", "--graph", "bipartite", "--qubits", "1")
    assert code == 1
    assert "at least 2 qubits" in err


def test_build_writes_qasm_that_resimulates(capsys, tmp_path):
    target = tmp_path / "q10.qasm"
    code, out, _ = run(capsys, "build", "--graph", "hypercube", "--qubits", "10",
                       "--out", str(target))
    assert code == 0 and target.exists()
    text = target.read_text()
    assert text.startswith("OPENQASM 3.0;\n")
    assert "qubit[10] r;" in text
    again = reload_emitted(text)
    ref = build_search(GraphSpec(Family.HYPERCUBE, 10), 1.0)
    psi = np.full(1024, 1 / 32, dtype=complex)
    assert np.abs(simulate(again, psi) - simulate(ref, psi)).max() <= 1e-10
    assert "re-simulation error" in out


def test_sweep_complete_q8(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "complete", "--qubits", "8", "--steps", "40")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["step", "p_circuit", "p_oracle"]
    assert len(table) == 41
    assert float(table[25]["p_circuit"]) >= 0.999


def test_sweep_bipartite_exact_and_approx(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "bipartite", "--qubits", "6", "--steps", "40",
                       "--mode", "approx", "--sources", "circuit")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["step", "p_circuit", "p_approx"]
    diff = max(abs(float(r["p_circuit"]) - float(r["p_approx"])) for r in table)
    assert diff <= 0.02


def test_sweep_zero_steps(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "hypercube", "--qubits", "3", "--steps", "0")
    assert code == 0
    table = rows(out)
    assert len(table) == 1
    assert float(table[0]["p_circuit"]) == pytest.approx(1 / 8, abs=1e-12)
    assert float(table[0]["p_oracle"]) == pytest.approx(1 / 8, abs=1e-12)


def test_sweep_twelve_significant_digits(capsys):
    _, out, _ = run(capsys, "sweep", "--graph", "complete", "--qubits", "3", "--steps", "3",
                    "--sources", "oracle")
    value = rows(out)[2]["p_oracle"]
    assert len(value.replace("0.", "", 1).lstrip("0")) <= 12


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "complete", "--qubits", "2", "--steps", "2",
                       "--format", "json", "--sources", "oracle")
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 3 and set(data["rows"][0]) == {"step", "p_oracle"}


def test_sweep_oracle_beyond_limit(capsys, tmp_path):
    target = tmp_path / "big.csv"
    code, _, err = run(capsys, "sweep", "--graph", "complete", "--qubits", "13", "--steps", "1",
                       "--out", str(target))
    assert code == 1 and "4096" in err
    assert not target.exists()
    assert os.listdir(tmp_path) == []


def test_sweep_unknown_source(capsys):
    code, _, err = run(capsys, "sweep", "--graph", "complete", "--qubits", "2", "--sources", "magic")
    assert code == 1 and "magic" in err


def test_sweep_negative_steps(capsys):
    code, _, _ = run(capsys, "sweep", "--graph", "complete", "--qubits", "2", "--steps", "-1")
    assert code == 1


def test_sweep_fine_dt(capsys):
    _, out, _ = run(capsys, "sweep", "--graph", "bipartite", "--qubits", "3", "--steps", "4",
                    "--dt", "0.5", "--sources", "oracle")
    assert [r["step"] for r in rows(out)] == ["0", "0.5", "1", "1.5", "2"]


def test_identical_runs_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["sweep", "--graph", "bipartite", "--qubits", "4", "--steps", "10",
                         "--mode", "approx", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_spectral_complete_q2(capsys):
    code, out, _ = run(capsys, "spectral", "--graph", "complete", "--qubits", "2")
    data = json.loads(out)
    assert code == 0
    assert data["lambda_plus"] == pytest.approx(-0.5)
    assert data["lambda_minus"] == pytest.approx(-1.5)


def test_spectral_bipartite_n8(capsys):
    _, out, _ = run(capsys, "spectral", "--graph", "bipartite", "--qubits", "4")
    data = json.loads(out)
    assert data["max_cubic_residual"] <= 1e-12
    assert data["lambda_minus"] < data["lambda_plus"] < data["lambda_0"]


def test_spectral_hypercube_epsilon(capsys):
    _, out, _ = run(capsys, "spectral", "--graph", "hypercube", "--qubits", "10",
                    "--asymptotic-eigs")
    assert json.loads(out)["epsilon"] == pytest.approx(1 / 32, rel=0.05)
    _, out, _ = run(capsys, "spectral", "--graph", "hypercube", "--qubits", "10")
    data = json.loads(out)
    # exact sums: epsilon sqrt(N) = 1 - O(1/n)
    assert data["epsilon"] * 32 == pytest.approx(1, abs=1.2 / 10)
    assert data["exact_eigenpairs"] is False


def test_gatecount_json_and_csv(capsys):
    code, out, _ = run(capsys, "gatecount", "--graph", "complete", "--qubits", "4")
    data = json.loads(out)
    assert code == 0 and data["search_step"]["total"] > 0
    assert len(data["stateprep"]) == 2
    code, out, _ = run(capsys, "gatecount", "--graph", "bipartite", "--qubits", "3",
                       "--format", "csv")
    table = rows(out)
    assert code == 0 and {r["circuit"] for r in table} >= {"search_step", "stateprep_2"}


def test_internal_error_exit_code(capsys, monkeypatch):
    def boom(cfg):
        raise RuntimeError("kaboom")
    monkeypatch.setitem(cli.COMMANDS, "spectral", boom)
    code, _, err = run(capsys, "spectral", "--graph", "complete", "--qubits", "2")
    assert code == 2 and "kaboom" in err


def test_failed_write_leaves_nothing(tmp_path, monkeypatch):
    target = tmp_path / "out.csv"

    class Boom(Exception):
        pass

    def bad_replace(src, dst):
        raise Boom()
    monkeypatch.setattr(cli.os, "replace", bad_replace)
    with pytest.raises(Boom):
        cli.write_atomic(str(target), "data")
    assert os.listdir(tmp_path) == []
