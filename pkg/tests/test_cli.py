"""Tests for the command-line entry point."""

import json
import os

import numpy as np
import pytest

from entangle.config.constants import SCAN_SAMPLES
from entangle.config.settings import get_settings
from entangle.main import main


def _write_graph(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _complete_graph(tmp_path):
    edges = [{"u": u, "v": v, "w": 3} for u in range(4) for v in range(u + 1, 4)]
    loops = [{"v": 0, "w": 3}, {"v": 1, "w": 3}]
    return _write_graph(tmp_path, "k4.json", {"kind": "real", "dims": [2, 2], "edges": edges, "loops": loops})


def test_kyfan_on_bell(capsys):
    """The default criterion reports the Bell state as entangled."""
    assert main(["--state", "builtin:bell", "separability"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "kyfan: Entangled"
    assert "witness = 3" in out


def test_ppt_json_output(capsys):
    """JSON output carries the partition label and status."""
    argv = ["--state", "builtin:smolin", "--format", "json", "separability", "--criterion", "ppt", "--partition", "1,2|3,4"]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "Inconclusive"
    assert payload["partition"] == "1,2|3,4"


def test_kyfan_grouping(capsys):
    """An explicit grouping goes to the coarse-grained test."""
    assert main(["--state", "builtin:ghz:3", "--format", "json", "separability", "--partition", "1,2|3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["criterion"] == "kyfan-partition"
    assert payload["status"] == "Entangled"


def test_measure_normalized(capsys):
    """GHZ_3 has E_T = R_3 = 1."""
    assert main(["--state", "builtin:ghz:3", "--format", "json", "measure", "--normalize"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["E_T"] == pytest.approx(1.0)
    assert payload["E_T_over_R_N"] == pytest.approx(1.0)
    assert payload["eps_T"] == pytest.approx(1.0)


def test_measure_rejects_mixed_state(capsys):
    """Mixed states exit with the invalid-state code."""
    assert main(["--state", "builtin:smolin", "measure"]) == 3
    assert capsys.readouterr().out == ""


def test_parse_errors_exit_with_two(tmp_path):
    """Unknown builtins, missing states and unreadable files exit with code 2."""
    assert main(["--state", "builtin:cluster", "measure"]) == 2
    assert main(["measure"]) == 2
    assert main(["--state", str(tmp_path / "missing.json"), "factorize"]) == 2


def test_factorize_basis_state(capsys):
    """A basis state splits into single qubits."""
    assert main(["--state", "builtin:basis:010", "factorize"]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "(1)(2)(3)"


def test_factorize_state_file(tmp_path, capsys):
    """|0> x Bell read from a file gives groups (1)(2 3)."""
    psi = np.kron([1, 0], [1, 0, 0, 1]) / np.sqrt(2)
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"kind": "pure", "dims": [2, 2, 2], "amplitudes": [[float(a), 0.0] for a in psi]}))
    assert main(["--state", str(path), "--format", "json", "factorize"]) == 0
    assert json.loads(capsys.readouterr().out)["groups"] == [[1], [2, 3]]


def test_graph_to_density(tmp_path, capsys):
    """The loop-decorated K4 file gives the expected density matrix."""
    assert main(["--format", "json", "graph", "to-density", "--graph", _complete_graph(tmp_path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["dims"] == [2, 2]
    rho = np.array([[complex(*z) for z in row] for row in payload["matrix"]])
    expected = np.array([[4, -1, -1, -1], [-1, 4, -1, -1], [-1, -1, 3, -1], [-1, -1, -1, 3]]) / 14
    np.testing.assert_allclose(rho, expected, atol=1e-12)


def test_graph_purity_of_complex_edge(tmp_path, capsys):
    """A single loopless edge of weight -i is a pure state."""
    path = _write_graph(tmp_path, "y.json", {"kind": "complex", "dims": [2], "edges": [{"u": 0, "v": 1, "w": [0, -1]}]})
    assert main(["graph", "purity", "--graph", path]) == 0
    assert capsys.readouterr().out.strip() == "pure = true"


def test_graph_check_psd(tmp_path, capsys):
    """Negative loops are caught by the structural screen."""
    obj = {"kind": "real", "dims": [2], "edges": [{"u": 0, "v": 1, "w": 3}], "loops": [{"v": 0, "w": -1}, {"v": 1, "w": -1}]}
    assert main(["graph", "check-psd", "--graph", _write_graph(tmp_path, "neg.json", obj)]) == 0
    out = capsys.readouterr().out
    assert "screen = NotPSD" in out
    assert "laplacian = NotPSD" in out


def test_graph_density_of_non_psd_graph(tmp_path):
    """Graphs without a density matrix exit with code 3."""
    obj = {"kind": "real", "dims": [2], "edges": [{"u": 0, "v": 1, "w": 3}], "loops": [{"v": 0, "w": -1}, {"v": 1, "w": -1}]}
    assert main(["graph", "to-density", "--graph", _write_graph(tmp_path, "neg.json", obj)]) == 3


def test_graph_degree_criterion(tmp_path, capsys):
    """The degree criterion can run on a graph file directly."""
    obj = {"kind": "real", "dims": [2, 2], "edges": [{"u": 0, "v": 3, "w": -0.5}], "loops": [{"v": 0, "w": 1}, {"v": 3, "w": 1}]}
    path = _write_graph(tmp_path, "bell.json", obj)
    assert main(["--format", "json", "separability", "--graph", path, "--partition", "1|2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["degree_criterion"] is False


def test_reproduce_csv(capsys):
    """Experiment tables can be streamed as CSV."""
    assert main(["--format", "csv", "reproduce", "smolin"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "quantity,value"
    name, value = lines[1].split(",")
    assert name == "kyfan_norm"
    assert float(value) == pytest.approx(3.0)


def test_tolerance_override(monkeypatch, capsys):
    """--tolerance feeds the state, degree and PPT tolerances without touching the environment."""
    names = ("ENTANGLE_STATE_TOL", "ENTANGLE_DEGREE_TOL", "ENTANGLE_PPT_TOL")
    for name in names:
        monkeypatch.setenv(name, "1e-8")
    argv = ["--tolerance", "1e-6", "--state", "builtin:bell", "--format", "json", "separability", "--criterion", "ppt"]
    assert main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["status"] == "Entangled"
    assert payload["bound"] == pytest.approx(1e-6)
    assert all(os.environ[name] == "1e-8" for name in names)
    assert get_settings().ppt_tol == pytest.approx(1e-8)


@pytest.mark.parametrize(
    "which, rows",
    [("table4.7", 8), ("eq4.28", 2), ("eq4.29", 1), ("w-reduced", 1)],
)
def test_reproduce_threshold_tables(which, rows, capsys):
    """Each threshold rerun prints one CSV row per family and size."""
    assert main(["--format", "csv", "reproduce", which]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("family,N,")
    assert len(lines) == rows + 1


def test_reproduce_alias(capsys):
    """Descriptive names resolve to the same rerun."""
    assert main(["--format", "json", "reproduce", "mixed-dim-threshold"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert [row["family"] for row in payload] == ["mixed-dim"]


def test_reproduce_w_superposition(capsys):
    """The W superposition sweep starts at W~ and ends at W."""
    assert main(["--format", "json", "reproduce", "wsuperposition"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload) == SCAN_SAMPLES
    assert payload[-1]["x"] == pytest.approx(1.0)
    assert payload[-1]["value"] == pytest.approx(np.sqrt(1 + 8 / 3) - 1)


def test_bad_arguments_exit():
    """argparse rejects unknown choices."""
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "thresholds-9"])
    assert exc.value.code == 2
