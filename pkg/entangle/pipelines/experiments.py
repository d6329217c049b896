from __future__ import annotations

import logging
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
import pandas as pd
from tqdm import tqdm

from entangle.config.constants import HEISENBERG_SCAN_N, MIXED_DIM_DIMS, SCAN_SAMPLES
from entangle.config.settings import get_settings
from entangle.features.bloch import full_tensor
from entangle.features.measures import e_t, ghz_family_et, heisenberg_et, wghz_superposition_et
from entangle.features.numcore import check_dims, hermitian_eigenvalues, partial_transpose
from entangle.features.separability import kyfan_bound
from entangle.features.states import (
    dur_state,
    ghz_state,
    mixed_dim_state,
    noisy_state,
    reduced_w_noisy,
    smolin_state,
    w_state,
    w_superposition,
    wghz_superposition,
)
from entangle.features.tensor import kyfan_norm
from entangle.models.errors import DimensionError, ThresholdError
from entangle.models.schema import ThresholdScan

logger = logging.getLogger(__name__)

Witness = Callable[[np.ndarray], tuple[float, float]]

__all__ = [
    "dur_report",
    "grover_trace",
    "heisenberg_scan",
    "kyfan_witness",
    "noisy_family",
    "noisy_state",
    "reduced_w_noisy",
    "scan_emit",
    "smolin_report",
    "threshold_bisect",
    "wghz_scan",
    "w_superposition_scan",
    "ghz_scan",
]


def kyfan_witness(dims: Sequence[int]) -> Witness:
    """(|T^(N)|_KF, product bound) for states on ``dims``; skips state validation inside sweeps."""
    dims = check_dims(dims)
    bound = kyfan_bound(dims)

    def witness(rho: np.ndarray) -> tuple[float, float]:
        return kyfan_norm(full_tensor(rho, dims)), bound

    return witness


def noisy_family(name: str, n: int) -> tuple[Callable[[float], np.ndarray], tuple[int, ...]]:
    """p -> noisy state for a named family: ghz, w, qutrit-ghz or mixed-dim (n ignored for the last)."""
    if name == "ghz":
        psi, dims = ghz_state(n), (2,) * n
    elif name == "w":
        psi, dims = w_state(n), (2,) * n
    elif name == "qutrit-ghz":
        psi, dims = ghz_state(n, d=3), (3,) * n
    elif name == "mixed-dim":
        psi, dims = mixed_dim_state(), MIXED_DIM_DIMS
    else:
        raise DimensionError(f"unknown noisy family '{name}'")
    return (lambda p: noisy_state(psi, p)), dims


def threshold_bisect(
    family: Callable[[float], np.ndarray],
    witness: Witness,
    name: str = "family",
) -> ThresholdScan:
    """Smallest p on [0, 1] where the witness exceeds its bound.

    A pre-scan checks that witness - bound is nondecreasing in p; a single
    sign change is then bracketed and bisected.
    """
    settings = get_settings()
    grid = np.linspace(0.0, 1.0, settings.prescan_points)
    curve: list[tuple[float, float]] = []
    margins = []
    bound = 0.0
    for p in grid:
        value, bound = witness(family(float(p)))
        curve.append((float(p), float(value)))
        margins.append(value - bound)
    margins = np.asarray(margins)
    drops = np.diff(margins)
    if np.any(drops < -1e-9):
        worst = int(np.argmin(drops))
        raise ThresholdError(
            f"{name}: witness is not monotone in p (drops by {-drops[worst]:.3e} after p={grid[worst]:.3f})"
        )
    if margins[-1] <= 0:
        logger.info("%s: witness never exceeds the bound on [0, 1]", name)
        return ThresholdScan(name, None, 0, bound, outcome="never", curve=curve)
    if margins[0] > 0:
        logger.info("%s: witness exceeds the bound already at p=0", name)
        return ThresholdScan(name, 0.0, 0, bound, outcome="always", curve=curve)

    first_above = int(np.argmax(margins > 0))
    lo, hi = float(grid[first_above - 1]), float(grid[first_above])
    iterations = 0
    while hi - lo > settings.bisect_interval and iterations < settings.bisect_max_iter:
        mid = 0.5 * (lo + hi)
        value, _ = witness(family(mid))
        if value > bound:
            hi = mid
        else:
            lo = mid
        iterations += 1
    p_star = 0.5 * (lo + hi)
    logger.debug("%s: p*=%.8f after %d bisections", name, p_star, iterations)
    return ThresholdScan(name, p_star, iterations, bound, outcome="crossing", curve=curve)


def _ppt_min_eigenvalues(rho: np.ndarray, dims: tuple[int, ...], cuts: Iterable[tuple[int, ...]]) -> dict[str, float]:
    out = {}
    for cut in cuts:
        rest = tuple(k for k in range(1, len(dims) + 1) if k not in cut)
        label = ",".join(map(str, cut)) + "|" + ",".join(map(str, rest))
        out[label] = float(hermitian_eigenvalues(partial_transpose(rho, dims, cut))[0])
    return out


def _two_two_cuts() -> list[tuple[int, ...]]:
    # each 2|2 split once, keyed by the side holding qubit 1
    return [c for c in combinations(range(1, 5), 2) if 1 in c]


def smolin_report() -> pd.DataFrame:
    rho = smolin_state()
    dims = (2, 2, 2, 2)
    value, bound = kyfan_witness(dims)(rho)
    rows = [{"quantity": "kyfan_norm", "value": value}, {"quantity": "bound", "value": bound}]
    for label, eig in _ppt_min_eigenvalues(rho, dims, _two_two_cuts()).items():
        rows.append({"quantity": f"ppt_min_eig[{label}]", "value": eig})
    return pd.DataFrame(rows)


def dur_report() -> pd.DataFrame:
    rho = dur_state()
    dims = (2, 2, 2, 2)
    value, bound = kyfan_witness(dims)(rho)
    rows = [{"quantity": "kyfan_norm", "value": value}, {"quantity": "bound", "value": bound}]
    cuts = [(k,) for k in range(1, 5)] + _two_two_cuts()
    for label, eig in _ppt_min_eigenvalues(rho, dims, cuts).items():
        rows.append({"quantity": f"ppt_min_eig[{label}]", "value": eig})
    return pd.DataFrame(rows)


def _hadamard_all(state: np.ndarray, n: int) -> np.ndarray:
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    work = state.reshape((2,) * n)
    for axis in range(n):
        work = np.moveaxis(np.tensordot(h, work, axes=([1], [axis])), 0, axis)
    return work.reshape(-1)


def grover_trace(n: int, target: str | None = None) -> pd.DataFrame:
    """E_T and target probability after each Grover iteration, k = 0 .. ceil(pi/4 sqrt(2^N)) + 2."""
    if not 1 <= n <= 16:
        raise DimensionError(f"Grover trace supports 1..16 qubits, got {n}")
    target = "1" * n if target is None else target
    if len(target) != n or set(target) - {"0", "1"}:
        raise DimensionError(f"target must be a {n}-bit string, got '{target}'")
    index = int(target, 2)
    size = 2**n
    state = np.full(size, 1.0 / np.sqrt(size), dtype=complex)
    last = int(np.ceil(np.pi / 4.0 * np.sqrt(size))) + 2
    rows = []
    progress = tqdm(range(last + 1), desc=f"grover n={n}", disable=not get_settings().show_progress)
    for k in progress:
        if k > 0:
            state[index] *= -1.0
            state = _hadamard_all(state, n)
            state[0] *= -1.0
            state = _hadamard_all(state, n)
        state = state / np.linalg.norm(state)
        rows.append(
            {
                "iteration": k,
                "e_t": e_t(state).e_t,
                "target_probability": float(abs(state[index]) ** 2),
            }
        )
    return pd.DataFrame(rows)


def _sweep(xs: Iterable[float], fn: Callable[[float], float], label: str) -> pd.DataFrame:
    xs = list(xs)
    progress = tqdm(xs, desc=label, disable=not get_settings().show_progress)
    return pd.DataFrame({"x": xs, "value": [fn(x) for x in progress]})


def wghz_scan(samples: int = SCAN_SAMPLES, direct: bool = False) -> pd.DataFrame:
    """E_T of sqrt(s)|GHZ_3> + sqrt(1 - s)|W_3> over s."""
    fn = (lambda s: e_t(wghz_superposition(s)).e_t) if direct else wghz_superposition_et
    return _sweep(np.linspace(0.0, 1.0, samples), fn, "wghz")


def w_superposition_scan(samples: int = SCAN_SAMPLES, n: int = 3, phi: float = 0.0) -> pd.DataFrame:
    return _sweep(np.linspace(0.0, 1.0, samples), lambda s: e_t(w_superposition(s, phi, n)).e_t, "w-superposition")


def heisenberg_scan(n: int = HEISENBERG_SCAN_N) -> pd.DataFrame:
    return _sweep(range(n + 1), lambda s: heisenberg_et(n, int(s)), f"heisenberg n={n}")


def ghz_scan(n: int = 3, samples: int = SCAN_SAMPLES) -> pd.DataFrame:
    return _sweep(np.linspace(0.0, 1.0, samples), lambda p: ghz_family_et(p, n), f"ghz n={n}")


def scan_emit(scan: pd.DataFrame | Iterable[tuple[float, float]], target: str | Path | TextIO) -> None:
    """Write an (x, value) sweep as CSV with header ``x,value``, sorted by x, LF line endings."""
    if isinstance(scan, pd.DataFrame):
        df = scan.loc[:, ["x", "value"]]
    else:
        df = pd.DataFrame(list(scan), columns=["x", "value"])
    df = df.sort_values("x", kind="stable").reset_index(drop=True)
    df.to_csv(target, index=False, lineterminator="\n")
