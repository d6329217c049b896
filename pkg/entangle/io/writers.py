from __future__ import annotations

import json
from pathlib import Path
from typing import TextIO

import numpy as np
import pandas as pd

from entangle.models.schema import FactorTree, Verdict, WeightedGraph


def ensure_dirs(*dirs: Path) -> None:
    for d in dirs:
        d.mkdir(parents=True, exist_ok=True)


def save_table(df: pd.DataFrame, path: Path) -> None:
    df.to_csv(path, index=False, lineterminator="\n")


def emit_csv(df: pd.DataFrame, stream: TextIO) -> None:
    df.to_csv(stream, index=False, lineterminator="\n")


def md_table(headers: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(headers) + " |", "| " + " | ".join(["---"] * len(headers)) + " |"]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


def fmt_num(value: float | int | None, digits: int = 10) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "n/a"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{digits}g}"
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        if abs(z.imag) <= 1e-15:
            return f"{z.real:.{digits}g}"
        return f"{z.real:.{digits}g}{z.imag:+.{digits}g}j"
    return str(value)


def pairs(a: np.ndarray) -> list:
    """Complex array to nested [re, im] pairs."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [pairs(x) for x in arr]


def state_to_dict(kind: str, dims, data: np.ndarray) -> dict:
    key = "amplitudes" if kind == "pure" else "matrix"
    return {"kind": kind, "dims": [int(d) for d in dims], key: pairs(data)}


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "kind": g.kind,
        "dims": list(g.dims),
        "edges": [{"u": u, "v": v, "w": [w.real, w.imag]} for u, v, w in g.edges()],
        "loops": [{"v": v, "w": w} for v, w in g.loops()],
    }


def df_to_text(df: pd.DataFrame) -> str:
    headers = [str(c) for c in df.columns]
    rows = [[fmt_num(v) for v in row] for row in df.itertuples(index=False)]
    return md_table(headers, rows)


def format_verdict(v: Verdict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(v.to_dict(), indent=2, default=str)
    if fmt == "csv":
        return pd.DataFrame([v.to_dict()]).to_csv(index=False, lineterminator="\n").rstrip("\n")
    where = f" across {v.partition.label()}" if v.partition else ""
    lines = [
        f"{v.criterion}: {v.status}{where}",
        f"  witness = {fmt_num(v.witness)}",
        f"  bound   = {fmt_num(v.bound)}",
    ]
    lines += [f"  {key} = {fmt_num(val) if not isinstance(val, (list, dict)) else val}" for key, val in v.detail.items()]
    return "\n".join(lines)


def format_mapping(values: dict, fmt: str, title: str = "") -> str:
    if fmt == "json":
        return json.dumps(values, indent=2, default=str)
    if fmt == "csv":
        return pd.DataFrame([values]).to_csv(index=False, lineterminator="\n").rstrip("\n")
    lines = [title] if title else []
    lines += [f"{key} = {fmt_num(val)}" for key, val in values.items()]
    return "\n".join(lines)


def format_matrix(m: np.ndarray, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"matrix": pairs(m)})
    if fmt == "csv":
        arr = np.asarray(m, dtype=complex)
        return "\n".join(",".join(fmt_num(complex(x)) for x in row) for row in arr)
    return np.array2string(np.asarray(m), precision=6, suppress_small=True, max_line_width=160)


def _leaf_state(state: np.ndarray) -> str:
    return "[" + ", ".join(fmt_num(complex(np.round(x, 10)), 6) for x in state) + "]"


def format_factor_tree(tree: FactorTree, fmt: str) -> str:
    leaves = sorted(tree.leaves(), key=lambda leaf: min(leaf.subsystems))
    if fmt == "json":
        payload = {
            "groups": [list(leaf.subsystems) for leaf in leaves],
            "leaves": [
                {"subsystems": list(leaf.subsystems), "dims": list(leaf.dims), "amplitudes": pairs(leaf.state)}
                for leaf in leaves
            ],
        }
        return json.dumps(payload, indent=2)
    if fmt == "csv":
        rows = [{"group": " ".join(map(str, leaf.subsystems)), "dims": " ".join(map(str, leaf.dims))} for leaf in leaves]
        return pd.DataFrame(rows).to_csv(index=False, lineterminator="\n").rstrip("\n")
    groups = "".join("(" + " ".join(map(str, leaf.subsystems)) + ")" for leaf in leaves)
    lines = [groups]
    lines += [f"  ({' '.join(map(str, leaf.subsystems))}): {_leaf_state(leaf.state)}" for leaf in leaves]
    return "\n".join(lines)
