from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator
import os


def _load_env(path: Path) -> None:
    if not path.exists():
        return
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = line.split("=", 1)
        key = key.strip().lstrip("\ufeff")
        value = value.strip().strip("\"").strip("'")
        if key and key not in os.environ:
            os.environ[key] = value


@dataclass(frozen=True)
class Settings:
    base_dir: Path
    output_dir: Path
    table_dir: Path
    log_level: str
    show_progress: bool
    # numerical tolerances
    hermitian_tol: float
    psd_tol: float
    state_tol: float
    edge_threshold: float
    supersymmetry_tol: float
    product_tol: float
    degree_tol: float
    amplitude_zero: float
    ppt_tol: float
    # completely orthogonal deflation
    deflation_max_terms: int
    deflation_tol: float
    # threshold bisection
    bisect_max_iter: int
    bisect_interval: float
    prescan_points: int


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in {"1", "true", "yes", "on"}


_overrides: ContextVar[dict | None] = ContextVar("entangle_settings_overrides", default=None)


@contextmanager
def override_settings(**changes) -> Iterator[None]:
    """Field overrides seen by every get_settings() call inside the block; the environment is untouched."""
    token = _overrides.set({**(_overrides.get() or {}), **changes})
    try:
        yield
    finally:
        _overrides.reset(token)


def get_settings() -> Settings:
    base_dir = Path(__file__).resolve().parents[1]
    _load_env(base_dir / ".env")
    output_dir = Path(os.getenv("ENTANGLE_OUTPUT_DIR", str(base_dir / "output")))
    table_dir = output_dir / "tables"

    settings = Settings(
        base_dir=base_dir,
        output_dir=output_dir,
        table_dir=table_dir,
        log_level=os.getenv("ENTANGLE_LOG_LEVEL", "WARNING"),
        show_progress=_flag("ENTANGLE_PROGRESS", "false"),
        hermitian_tol=float(os.getenv("ENTANGLE_HERMITIAN_TOL", "1e-10")),
        psd_tol=float(os.getenv("ENTANGLE_PSD_TOL", "1e-9")),
        state_tol=float(os.getenv("ENTANGLE_STATE_TOL", "1e-8")),
        edge_threshold=float(os.getenv("ENTANGLE_EDGE_THRESHOLD", "1e-12")),
        supersymmetry_tol=float(os.getenv("ENTANGLE_SUPERSYMMETRY_TOL", "1e-10")),
        product_tol=float(os.getenv("ENTANGLE_PRODUCT_TOL", "1e-8")),
        degree_tol=float(os.getenv("ENTANGLE_DEGREE_TOL", "1e-10")),
        amplitude_zero=float(os.getenv("ENTANGLE_AMPLITUDE_ZERO", "1e-12")),
        ppt_tol=float(os.getenv("ENTANGLE_PPT_TOL", "1e-10")),
        deflation_max_terms=int(os.getenv("ENTANGLE_DEFLATION_MAX_TERMS", "50")),
        deflation_tol=float(os.getenv("ENTANGLE_DEFLATION_TOL", "1e-8")),
        bisect_max_iter=int(os.getenv("ENTANGLE_BISECT_MAX_ITER", "60")),
        bisect_interval=float(os.getenv("ENTANGLE_BISECT_INTERVAL", "1e-6")),
        prescan_points=int(os.getenv("ENTANGLE_PRESCAN_POINTS", "21")),
    )
    changes = _overrides.get()
    return replace(settings, **changes) if changes else settings
