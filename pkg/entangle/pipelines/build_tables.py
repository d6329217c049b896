from __future__ import annotations

import logging
from typing import Callable

import numpy as np
import pandas as pd
from tqdm import tqdm

from entangle.config.constants import (
    MIXED_DIM_THRESHOLD,
    QUTRIT_GHZ_THRESHOLDS,
    REDUCED_W_THRESHOLDS,
    REPRODUCE_ALIASES,
    REPRODUCE_TARGETS,
    TABLE_THRESHOLDS,
    THRESHOLD_TOLERANCE,
)
from entangle.io.writers import ensure_dirs, save_table
from entangle.models.errors import ParseError
from entangle.models.schema import Context, ThresholdScan
from entangle.pipelines.experiments import (
    dur_report,
    ghz_scan,
    grover_trace,
    heisenberg_scan,
    kyfan_witness,
    noisy_family,
    reduced_w_noisy,
    smolin_report,
    threshold_bisect,
    w_superposition_scan,
    wghz_scan,
)

logger = logging.getLogger(__name__)

# (family, N, published, p -> state, dims)
Case = tuple[str, int, "float | None", Callable[[float], np.ndarray], tuple[int, ...]]


def _scan_row(scan: ThresholdScan, family: str, n: int, published: float | None) -> dict:
    delta = None if published is None or scan.p_star is None else scan.p_star - published
    return {
        "family": family,
        "N": n,
        "p_star": scan.p_star,
        "published": published,
        "delta": delta,
        "outcome": scan.outcome,
        "iterations": scan.iterations,
    }


def _family_case(family: str, n: int, published: float | None) -> Case:
    state_of, dims = noisy_family(family, n)
    return family, n, published, state_of, dims


def _thresholds(ctx: Context, cases: list[Case]) -> pd.DataFrame:
    rows = []
    progress = tqdm(cases, desc="thresholds", disable=not ctx.settings.show_progress)
    for family, n, published, state_of, dims in progress:
        scan = threshold_bisect(state_of, kyfan_witness(dims), name=f"{family} N={n}")
        if published is not None and scan.p_star is not None and abs(scan.p_star - published) > THRESHOLD_TOLERANCE:
            logger.warning("%s N=%d: p*=%.5f differs from published %.5f", family, n, scan.p_star, published)
        rows.append(_scan_row(scan, family, n, published))
    return pd.DataFrame(rows)


def table_noisy_thresholds(ctx: Context) -> pd.DataFrame:
    cases = [_family_case(family, n, value) for (family, n), value in TABLE_THRESHOLDS.items()]
    return _thresholds(ctx, cases)


def table_qutrit_thresholds(ctx: Context) -> pd.DataFrame:
    return _thresholds(ctx, [_family_case("qutrit-ghz", n, value) for n, value in QUTRIT_GHZ_THRESHOLDS.items()])


def table_mixed_dim_threshold(ctx: Context) -> pd.DataFrame:
    return _thresholds(ctx, [_family_case("mixed-dim", 3, MIXED_DIM_THRESHOLD)])


def table_reduced_w_threshold(ctx: Context, n_total: int = 6, n_traced: int = 2) -> pd.DataFrame:
    """Threshold of the noisy W_N state after ``n_traced`` qubits are traced out."""
    published = REDUCED_W_THRESHOLDS.get((n_total, n_traced))
    dims = (2,) * (n_total - n_traced)
    case = ("w-reduced", n_total, published, lambda p: reduced_w_noisy(n_total, n_traced, p), dims)
    df = _thresholds(ctx, [case])
    df.insert(2, "traced", n_traced)
    return df


def reproduce(ctx: Context, which: str, n: int | None = None, save: bool = False) -> pd.DataFrame:
    """Run one named experiment; the result is stored on the context under its name."""
    which = REPRODUCE_ALIASES.get(which, which)
    builders = {
        "table4.7": lambda: table_noisy_thresholds(ctx),
        "eq4.28": lambda: table_qutrit_thresholds(ctx),
        "eq4.29": lambda: table_mixed_dim_threshold(ctx),
        "smolin": smolin_report,
        "dur": dur_report,
        "grover": lambda: grover_trace(n or 6),
        "heisenberg": lambda: heisenberg_scan(n) if n else heisenberg_scan(),
        "wghz": wghz_scan,
        "ghzscan": lambda: ghz_scan(n or 3),
        "wsuperposition": lambda: w_superposition_scan(n=n or 3),
        "w-reduced": lambda: table_reduced_w_threshold(ctx, n_total=n or 6),
    }
    if which not in REPRODUCE_TARGETS:
        raise ParseError(f"unknown experiment '{which}'; choose from {', '.join(REPRODUCE_TARGETS)}")
    df = builders[which]()
    ctx.add_result(which, df)
    if save:
        ensure_dirs(ctx.settings.table_dir)
        path = ctx.settings.table_dir / f"{which.replace('.', '_')}.csv"
        save_table(df, path)
        logger.info("saved %s", path)
    return df
