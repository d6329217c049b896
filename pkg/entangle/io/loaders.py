from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from entangle.config.constants import BUILTIN_STATES, GRAPH_KINDS
from entangle.features.numcore import check_dims, validate_density, validate_pure
from entangle.features.states import (
    basis_state,
    bell_state,
    dur_state,
    ghz_state,
    heisenberg_state,
    povm_example_state,
    smolin_state,
    w_state,
)
from entangle.models.errors import DimensionError, GraphKindError, ParseError
from entangle.models.schema import StateSpec, WeightedGraph

logger = logging.getLogger(__name__)


def to_complex(value) -> complex:
    """[re, im] pair (or a bare real number) to a complex scalar."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
    ):
        return complex(float(value[0]), float(value[1]))
    raise ParseError(f"expected a number or an [re, im] pair, got {value!r}")


def complex_vector(items) -> np.ndarray:
    if not isinstance(items, list) or not items:
        raise ParseError("amplitudes must be a nonempty list of [re, im] pairs")
    return np.array([to_complex(x) for x in items], dtype=complex)


def complex_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError("matrix must be a nonempty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("matrix rows have unequal lengths")
    return np.array([[to_complex(x) for x in r] for r in rows], dtype=complex)


def _read_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top-level JSON value must be an object")
    return obj


def _dims(obj: dict) -> tuple[int, ...]:
    dims = obj.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise ParseError("'dims' must be a nonempty list of integers")
    try:
        return check_dims(dims)
    except DimensionError as exc:
        raise ParseError(str(exc)) from exc


def state_from_dict(obj: dict, name: str = "") -> StateSpec:
    kind = obj.get("kind")
    dims = _dims(obj)
    if kind == "pure":
        v = complex_vector(obj.get("amplitudes"))
        if v.size != int(np.prod(dims)):
            raise ParseError(f"{v.size} amplitudes do not match dims {list(dims)}")
        return StateSpec(kind="pure", dims=dims, data=validate_pure(v), name=name)
    if kind == "mixed":
        m = complex_matrix(obj.get("matrix"))
        side = int(np.prod(dims))
        if m.shape != (side, side):
            raise ParseError(f"matrix shape {m.shape} does not match dims {list(dims)}")
        return StateSpec(kind="mixed", dims=dims, data=validate_density(m), name=name)
    raise ParseError(f"state 'kind' must be 'pure' or 'mixed', got {kind!r}")


def _int_arg(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ParseError(f"builtin state: {what} must be an integer, got '{text}'") from exc


def builtin_state(ref: str) -> StateSpec:
    """``ghz[:N]``, ``w[:N]``, ``bell``, ``smolin``, ``dur``, ``povm``, ``heisenberg:N:s`` or ``basis:bits``."""
    name, *args = ref.split(":")
    if name not in BUILTIN_STATES:
        raise ParseError(f"unknown builtin state '{name}'; known: {', '.join(BUILTIN_STATES)}")
    defaults = BUILTIN_STATES[name]
    if name in ("ghz", "w"):
        n = _int_arg(args[0], "N") if args else defaults["n"]
        v = ghz_state(n) if name == "ghz" else w_state(n)
        return StateSpec("pure", (2,) * n, v, name=ref)
    if name == "bell":
        return StateSpec("pure", (2, 2), bell_state(0), name=ref)
    if name == "smolin":
        return StateSpec("mixed", (2, 2, 2, 2), smolin_state(), name=ref)
    if name == "dur":
        return StateSpec("mixed", (2, 2, 2, 2), dur_state(), name=ref)
    if name == "povm":
        return StateSpec("pure", (2, 2, 2, 2), povm_example_state(), name=ref)
    if name == "heisenberg":
        n = _int_arg(args[0], "N") if args else defaults["n"]
        s = _int_arg(args[1], "s") if len(args) > 1 else defaults["s"]
        return StateSpec("pure", (2,) * n, heisenberg_state(n, s), name=ref)
    bits = args[0] if args else defaults["bits"]
    if not bits or set(bits) - {"0", "1"}:
        raise ParseError(f"basis state needs a bit string, got '{bits}'")
    return StateSpec("pure", (2,) * len(bits), basis_state(bits), name=ref)


def load_state(ref: str | Path) -> StateSpec:
    text = str(ref)
    if text.startswith("builtin:"):
        return builtin_state(text[len("builtin:"):])
    path = Path(text)
    spec = state_from_dict(_read_json(path), name=path.name)
    logger.debug("loaded %s state %s with dims %s", spec.kind, path, spec.dims)
    return spec


def graph_from_dict(obj: dict) -> WeightedGraph:
    kind = obj.get("kind")
    if kind not in GRAPH_KINDS:
        raise ParseError(f"graph 'kind' must be 'real' or 'complex', got {kind!r}")
    dims = _dims(obj)
    n = int(np.prod(dims))
    adjacency = np.zeros((n, n), dtype=complex)
    for edge in obj.get("edges", []):
        try:
            u, v = int(edge["u"]), int(edge["v"])
            w = to_complex(edge["w"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad edge entry {edge!r}") from exc
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"edge endpoints must be distinct vertices in 0..{n - 1}, got {u}, {v}")
        adjacency[u, v] += w
        adjacency[v, u] += np.conj(w)
    for loop in obj.get("loops", []):
        try:
            v, w = int(loop["v"]), to_complex(loop["w"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad loop entry {loop!r}") from exc
        if not 0 <= v < n or abs(w.imag) > 0:
            raise ParseError(f"loop must sit on a vertex in 0..{n - 1} with a real weight, got {loop!r}")
        adjacency[v, v] += w.real
    try:
        return WeightedGraph(kind=kind, dims=dims, adjacency=adjacency)
    except (DimensionError, GraphKindError) as exc:
        raise ParseError(str(exc)) from exc


def load_graph(path: str | Path) -> WeightedGraph:
    return graph_from_dict(_read_json(Path(path)))
