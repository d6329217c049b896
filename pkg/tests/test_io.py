"""Tests for state and graph file parsing and output formatting."""

import json

import numpy as np
import pytest

from entangle.features.factor import full_factorize
from entangle.features.graphstate import graph_from_density
from entangle.features.states import basis_state, bell_state
from entangle.io.loaders import builtin_state, graph_from_dict, load_graph, load_state, state_from_dict, to_complex
from entangle.io.writers import fmt_num, format_factor_tree, graph_to_dict, md_table, state_to_dict
from entangle.models.errors import InvalidStateError, ParseError


def test_to_complex():
    """Numbers and [re, im] pairs are accepted; anything else is a parse error."""
    assert to_complex(2) == 2 + 0j
    assert to_complex([0.5, -1]) == 0.5 - 1j
    with pytest.raises(ParseError):
        to_complex("1+2j")
    with pytest.raises(ParseError):
        to_complex([1, 2, 3])


def test_pure_state_file(tmp_path):
    """A pure state file round-trips through the writer."""
    path = tmp_path / "bell.json"
    path.write_text(json.dumps(state_to_dict("pure", [2, 2], bell_state(0))))
    spec = load_state(path)
    assert spec.is_pure
    assert spec.dims == (2, 2)
    np.testing.assert_allclose(spec.data, bell_state(0))


def test_mixed_state_file(tmp_path):
    """Mixed states are validated as density matrices."""
    path = tmp_path / "mixed.json"
    path.write_text(json.dumps(state_to_dict("mixed", [2], np.eye(2) / 2)))
    assert load_state(path).kind == "mixed"
    path.write_text(json.dumps(state_to_dict("mixed", [2], np.eye(2))))
    with pytest.raises(InvalidStateError):
        load_state(path)


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "pure", "dims": [2], "amplitudes": [[1, 0]] * 3},
        {"kind": "pure", "dims": [], "amplitudes": [[1, 0]]},
        {"kind": "pure", "dims": [1], "amplitudes": [[1, 0]]},
        {"kind": "mixed", "dims": [2], "matrix": [[1, 0], [0]]},
        {"kind": "thermal", "dims": [2]},
    ],
)
def test_malformed_states(obj):
    """Shape and schema problems are parse errors."""
    with pytest.raises(ParseError):
        state_from_dict(obj)


def test_unreadable_files(tmp_path):
    """Missing files and invalid JSON are parse errors."""
    with pytest.raises(ParseError):
        load_state(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_state(bad)
    bad.write_text("[1, 2]")
    with pytest.raises(ParseError):
        load_graph(bad)


def test_builtin_states():
    """Builtin references cover the named families."""
    assert builtin_state("ghz:4").dims == (2,) * 4
    assert builtin_state("w").dims == (2, 2, 2)
    assert builtin_state("smolin").kind == "mixed"
    assert builtin_state("povm").dims == (2,) * 4
    np.testing.assert_allclose(builtin_state("basis:01").data, basis_state("01"))
    assert load_state("builtin:heisenberg:6:3").dims == (2,) * 6
    with pytest.raises(ParseError):
        builtin_state("cluster")
    with pytest.raises(ParseError):
        builtin_state("ghz:three")
    with pytest.raises(ParseError):
        builtin_state("basis:012")


def test_graph_file_round_trip():
    """Graphs written by the writer load back unchanged."""
    rho = np.array([[2, 1j, 0, 0], [-1j, 1, 0.5, 0], [0, 0.5, 1, 0], [0, 0, 0, 0]]) / 4
    g = graph_from_density(rho, (2, 2))
    loaded = graph_from_dict(json.loads(json.dumps(graph_to_dict(g))))
    assert loaded.kind == "complex"
    np.testing.assert_allclose(loaded.adjacency, g.adjacency)


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "signed", "dims": [2]},
        {"kind": "real", "dims": [2], "edges": [{"u": 0, "v": 0, "w": 1}]},
        {"kind": "real", "dims": [2], "edges": [{"u": 0, "v": 2, "w": 1}]},
        {"kind": "real", "dims": [2], "edges": [{"u": 0, "w": 1}]},
        {"kind": "real", "dims": [2], "edges": [{"u": 0, "v": 1, "w": [0, 1]}]},
        {"kind": "real", "dims": [2], "loops": [{"v": 0, "w": [1, 1]}]},
    ],
)
def test_malformed_graphs(obj):
    """Bad kinds, endpoints, missing fields and misplaced complex weights are parse errors."""
    with pytest.raises(ParseError):
        graph_from_dict(obj)


def test_number_formatting():
    """Numbers print compactly; missing values print as n/a."""
    assert fmt_num(None) == "n/a"
    assert fmt_num(True) == "true"
    assert fmt_num(3) == "3"
    assert fmt_num(0.25) == "0.25"
    assert fmt_num(1 - 2j) == "1-2j"


def test_markdown_table():
    """Tables render with a header separator."""
    assert md_table(["a", "b"], [["1", "2"]]) == "| a | b |\n| --- | --- |\n| 1 | 2 |"


def test_factor_tree_text():
    """Text output lists the groups on the first line."""
    tree = full_factorize(np.kron(basis_state("0"), bell_state(0)), [2, 2, 2])
    text = format_factor_tree(tree, "text")
    assert text.splitlines()[0] == "(1)(2 3)"
    payload = json.loads(format_factor_tree(tree, "json"))
    assert payload["groups"] == [[1], [2, 3]]
