import json
import math

import numpy as np
import pytest

from magic_lab.cli import main
from magic_lab.mps import product_mps, random_mps
from magic_lab.repro import parse_grid, read_csv
from magic_lab.states import magic_state


def _run(tmp_path, *argv):
    return main([argv[0], "--out", str(tmp_path), *argv[1:]])


def _schema(path):
    return path.read_text().splitlines()[0]


def test_fig1(tmp_path):
    assert _run(tmp_path, "fig1") == 0
    path = tmp_path / "fig1_deltam.csv"
    assert _schema(path).startswith("# schema: magic_lab.fig1_deltam v1")
    rows = {float(r["n"]): float(r["delta_m"]) for r in read_csv(path)}
    assert len(rows) == 301
    assert rows[1.0] < 0 and rows[3.0] >= 0


def test_fig1_is_deterministic(tmp_path):
    _run(tmp_path / "a", "fig1", "--n-grid", "0:3:0.5")
    _run(tmp_path / "b", "fig1", "--n-grid", "0:3:0.5")
    assert (tmp_path / "a/fig1_deltam.csv").read_bytes() == (tmp_path / "b/fig1_deltam.csv").read_bytes()


def test_fig2_small(tmp_path):
    code = _run(tmp_path, "fig2", "--n-qubits", "6", "--chi", "8", "--samples", "200",
                "--chi-m2", "4", "--delta", "0,0.5")
    assert code == 0
    rows = read_csv(tmp_path / "fig2_xxz.csv")
    assert [float(r["delta"]) for r in rows] == [0.0, 0.5]
    assert all(r["dmrg_status"] == "converged" for r in rows)
    assert all(0 < float(r["m2"]) < float(r["m1_hat"]) + 5 * float(r["m1_stderr"]) for r in rows)


def test_fig2_needs_even_chain(tmp_path):
    assert _run(tmp_path, "fig2", "--n-qubits", "5") == 2


def test_fig3(tmp_path):
    assert _run(tmp_path, "fig3", "--nmax", "12") == 0
    rows = read_csv(tmp_path / "fig3_bound.csv")
    assert len(rows) == 12
    assert float(rows[0]["bound_c"]) == pytest.approx(4 * math.log(1.25))
    assert _run(tmp_path, "fig3", "--renyi", "1") == 2


def test_fig4_small(tmp_path):
    code = _run(tmp_path, "fig4", "--n-qubits", "6", "--chi", "8", "--samples", "4000",
                "--samples-list", "100,400", "--instances", "4")
    assert code == 0
    rows = read_csv(tmp_path / "fig4_sampling_error.csv")
    assert [int(r["S"]) for r in rows] == [100, 400]


def test_fig6_small(tmp_path):
    code = _run(tmp_path, "fig6", "--n-qubits", "6", "--chi-list", "2,4", "--chi-ref", "8",
                "--samples", "200", "--chi-m2", "4")
    assert code == 0
    rows = read_csv(tmp_path / "fig6_bond.csv")
    assert [int(r["chi"]) for r in rows] == [2, 4, 8]
    f = [float(r["fidelity_to_ref"]) for r in rows]
    assert f[0] <= f[1] + 1e-8 and f[2] == 1.0


def test_fig6_rejects_small_reference(tmp_path):
    assert _run(tmp_path, "fig6", "--n-qubits", "4", "--chi-list", "4", "--chi-ref", "2") == 2


def test_check_inequalities(tmp_path):
    code = _run(tmp_path, "check-inequalities", "--n-qubits-list", "1,2", "--num-states", "5")
    assert code == 0
    report = json.loads((tmp_path / "inequalities.json").read_text())
    assert report["checked"] == 30 and report["violations"] == 0 and report["pass"]
    assert _schema(tmp_path / "inequality_fuzz.csv").startswith("# schema: magic_lab.inequality_fuzz")
    assert _run(tmp_path, "check-inequalities", "--n-qubits-list", "4") == 2


def test_search_violation(tmp_path):
    code = _run(tmp_path, "search-violation", "--n-qubits", "4", "--renyi", "1", "--restarts", "2",
                "--seed", "0")
    assert code == 0
    payload = json.loads((tmp_path / "violation_N4.json").read_text())
    assert payload["delta_n"] < -1e-3
    assert len(payload["rounding_hints"]) == 16
    assert _run(tmp_path, "search-violation", "--n-qubits", "6") == 2


def test_state_commands(tmp_path):
    state = magic_state().tensor(magic_state())
    path = tmp_path / "state.json"
    path.write_text(state.to_json())
    assert _run(tmp_path, "se", str(path), "--n-grid", "2") == 0
    rows = read_csv(tmp_path / "se_curve.csv")
    assert float(rows[0]["m_n"]) == pytest.approx(2 * math.log(1.5), abs=1e-12)
    assert _run(tmp_path, "xi", str(path)) == 0
    assert (tmp_path / "xi_distribution.csv").exists()


def test_mps_se(tmp_path, capsys):
    path = tmp_path / "chi.mps"
    product_mps([magic_state().amplitudes] * 4).save(path)
    assert _run(tmp_path, "mps-se", str(path), "--samples", "500") == 0
    out = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert out["m2"] == pytest.approx(4 * math.log(1.5), abs=1e-10)


def test_resource_exit_code(tmp_path):
    path = tmp_path / "big.mps"
    random_mps(12, 24, np.random.default_rng(0)).save(path)
    assert _run(tmp_path, "mps-se", str(path), "--samples", "100") == 3


def test_usage_errors(tmp_path):
    assert main([]) == 2
    assert main(["nope"]) == 2
    assert _run(tmp_path, "fig1", "--n-grid", "3:1:0.5") == 2


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("1, 2.5") == [1.0, 2.5]
