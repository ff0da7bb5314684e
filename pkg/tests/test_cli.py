import json

import numpy as np
import pytest

from cliffgrad.cli import main

TOY_OBS = "qubits 1\n1.0 X0\n2.0 Z0\n"
TOY_ANSATZ = json.dumps(
    {
        "version": 1,
        "n_qubits": 1,
        "elements": [{"type": "rotation", "axis": "Y", "wire": 0, "param": 0}],
        "metadata": {},
    }
)


@pytest.fixture
def toy(tmp_path):
    ham = tmp_path / "ham.txt"
    ham.write_text(TOY_OBS)
    ans = tmp_path / "ansatz.json"
    ans.write_text(TOY_ANSATZ)
    return ham, ans


def test_missing_input_file_is_exit_2(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(
        [
            "expand",
            "--hamiltonian", str(tmp_path / "nope.txt"),
            "--ansatz", str(tmp_path / "nope.json"),
            "--reference", "0",
            "--out", str(out),
        ]
    )
    assert rc == 2
    assert "not found" in capsys.readouterr().err


def test_bad_generation_flags_are_exit_2(tmp_path):
    assert main(["gen-ansatz", "--qubits", "4", "--depth", "0",
                 "--out", str(tmp_path / "a.json")]) == 2
    assert main(["gen-ansatz", "--qubits", "1", "--depth", "2",
                 "--out", str(tmp_path / "a.json")]) == 2


def test_malformed_hamiltonian_is_exit_2(tmp_path, toy, capsys):
    ham = tmp_path / "bad.txt"
    ham.write_text("qubits 1\noops Z0\n")
    rc = main(
        [
            "expand",
            "--hamiltonian", str(ham),
            "--ansatz", str(toy[1]),
            "--reference", "0",
        ]
    )
    assert rc == 2
    assert "line 2" in capsys.readouterr().err


def test_gen_ansatz_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["gen-ansatz", "--qubits", "4", "--depth", "2",
                     "--seed", "9", "--out", str(path)]) == 0
    assert a.read_text() == b.read_text()


def test_expand_toy_values(tmp_path, toy):
    ham, ans = toy
    out = tmp_path / "result.json"
    rc = main(
        [
            "expand",
            "--hamiltonian", str(ham),
            "--ansatz", str(ans),
            "--reference", "0",
            "--dropout-threshold", "0",
            "--out", str(out),
        ]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["e0"] == pytest.approx(2.0)
    assert doc["gradient"] == pytest.approx([-2.0])
    assert doc["hessian"]["rows"] == [[-8.0]]
    assert doc["theta_star"] == pytest.approx([-0.25])
    assert doc["perturbative_optimum"] == pytest.approx(2.25)
    assert doc["tool_version"] and len(doc["inputs"]["hamiltonian"]) == 64


def test_expand_all_dropped_warns(tmp_path, toy):
    ham, ans = toy
    out = tmp_path / "result.json"
    rc = main(
        [
            "expand",
            "--hamiltonian", str(ham),
            "--ansatz", str(ans),
            "--reference", "0",
            "--dropout-threshold", "1e9",
            "--out", str(out),
        ]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["warnings"]
    assert doc["theta_star"] == [0.0]
    assert doc["perturbative_optimum"] == doc["e0"]


def test_verify_zero_theta_gap_is_zero(tmp_path, toy):
    ham, ans = toy
    res = tmp_path / "result.json"
    # stationary case: Z-only observable gives zero gradient for a Y rotation
    zham = tmp_path / "zham.txt"
    zham.write_text("qubits 1\n1.0 Z0\n")
    assert main(["expand", "--hamiltonian", str(zham), "--ansatz", str(ans),
                 "--reference", "0", "--out", str(res)]) == 0
    out = tmp_path / "verify.json"
    rc = main(
        [
            "verify",
            "--hamiltonian", str(zham),
            "--ansatz", str(ans),
            "--reference", "0",
            "--result", str(res),
            "--exact-ground",
            "--out", str(out),
        ]
    )
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["theta_star_norm"] == 0.0
    assert doc["gap"] == pytest.approx(0.0, abs=1e-12)
    assert doc["circuit_value"] == pytest.approx(doc["e0"])
    assert doc["exact_ground_energy"] == pytest.approx(-1.0)


def test_verify_rejects_mismatched_result(tmp_path, toy):
    ham, ans = toy
    res = tmp_path / "result.json"
    res.write_text(json.dumps({
        "e0": 0.0,
        "gradient": [0.0, 0.0],
        "hessian": {"kept_indices": [0, 1], "rows": [[1.0, 0.0], [0.0, 1.0]]},
        "theta_star": [0.0, 0.0],
        "perturbative_optimum": 0.0,
        "dropout_threshold": 0.0,
        "rank": 2,
        "rtol": 1e-10,
        "stable_subspace": False,
        "warnings": [],
    }))
    rc = main(["verify", "--hamiltonian", str(ham), "--ansatz", str(ans),
               "--reference", "0", "--result", str(res)])
    assert rc == 2


def test_verify_cap_is_exit_5(tmp_path, toy, capsys):
    ham, ans = toy
    res = tmp_path / "result.json"
    assert main(["expand", "--hamiltonian", str(ham), "--ansatz", str(ans),
                 "--reference", "0", "--out", str(res)]) == 0
    rc = main(["verify", "--hamiltonian", str(ham), "--ansatz", str(ans),
               "--reference", "0", "--result", str(res), "--cap", "0"])
    assert rc == 5
    assert "cap" in capsys.readouterr().err


def test_reference_validation(tmp_path, toy):
    ham, ans = toy
    rc = main(["expand", "--hamiltonian", str(ham), "--ansatz", str(ans),
               "--reference", "01"])
    assert rc == 2


def test_optimize_warm_modes_require_result(toy):
    ham, ans = toy
    rc = main(["optimize", "--hamiltonian", str(ham), "--ansatz", str(ans),
               "--reference", "0", "--init", "pert"])
    assert rc == 2


def test_optimize_trace_document(tmp_path, toy):
    ham, ans = toy
    res = tmp_path / "result.json"
    trace = tmp_path / "trace.json"
    assert main(["expand", "--hamiltonian", str(ham), "--ansatz", str(ans),
                 "--reference", "0", "--out", str(res)]) == 0
    rc = main(
        [
            "optimize",
            "--hamiltonian", str(ham),
            "--ansatz", str(ans),
            "--reference", "0",
            "--result", str(res),
            "--init", "pert-hessian",
            "--trace-out", str(trace),
        ]
    )
    assert rc == 0
    doc = json.loads(trace.read_text())
    assert doc["converged"]
    assert doc["final_cost"] == pytest.approx(-np.sqrt(5.0), abs=1e-6)
    assert doc["init"] == "theta_star_with_hessian"


def test_select_ansatz_report(tmp_path):
    ham = tmp_path / "ham.txt"
    ham.write_text("qubits 4\n-1.0 Z0 Z1\n-1.0 Z2 Z3\n-0.7 X0\n-0.7 X1\n-0.7 X2\n-0.7 X3\n")
    out = tmp_path / "best.json"
    report = tmp_path / "report.json"
    rc = main(
        [
            "select-ansatz",
            "--qubits", "4",
            "--depth", "1",
            "--count", "3",
            "--seed", "7",
            "--hamiltonian", str(ham),
            "--reference", "0000",
            "--out", str(out),
            "--report-out", str(report),
        ]
    )
    assert rc == 0
    doc = json.loads(report.read_text())
    assert len(doc["candidates"]) == 3
    sums = [c["seed_sum_abs_gradient"] for c in doc["candidates"]]
    assert doc["winner_sum_abs_gradient"] == max(sums)
    assert sums[doc["winner_index"]] == max(sums)
    assert out.is_file()


def test_bench_csv_schema(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    rc = main(["bench", "--qubits", "3", "--depths", "1", "--terms", "4",
               "--seed", "1", "--out", str(out)])
    assert rc == 0
    header, row = out.read_text().strip().splitlines()
    assert header == "n,depth,K,K_kept,N_o,t_grad,t_hess,t_solve,expectations_evaluated"
    fields = row.split(",")
    assert fields[0] == "3" and fields[1] == "1"
    assert int(fields[2]) == 9  # (2*1+1)*3 Y rotations, real variant default
