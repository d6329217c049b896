from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Dict

import numpy as np
import pandas as pd

from entangle.config.constants import GRAPH_KINDS
from entangle.config.settings import Settings
from entangle.models.errors import DimensionError, GraphKindError


@dataclass(frozen=True)
class GeneratorBasis:
    """Orthogonal SU(d) generators, stacked as an array of shape (d*d - 1, d, d).

    Structure constants are computed on first access because they cost
    O(d^6) and partition tests build bases for merged factors that never
    need them.
    """

    d: int
    generators: np.ndarray

    def __len__(self) -> int:
        return self.generators.shape[0]

    @cached_property
    def _structure(self) -> tuple[np.ndarray, np.ndarray]:
        from entangle.features.numcore import structure_constants

        return structure_constants(self)

    @property
    def f_tensor(self) -> np.ndarray:
        return self._structure[0]

    @property
    def g_tensor(self) -> np.ndarray:
        return self._structure[1]


@dataclass(frozen=True)
class PartitionSpec:
    s: tuple[int, ...]
    t: tuple[int, ...]

    @classmethod
    def from_subset(cls, s, n_parts: int) -> "PartitionSpec":
        chosen = tuple(sorted({int(k) for k in s}))
        if not chosen or len(chosen) >= n_parts:
            raise DimensionError(f"partition side must be a nonempty proper subset of 1..{n_parts}")
        if chosen[0] < 1 or chosen[-1] > n_parts:
            raise DimensionError(f"subsystem index out of range 1..{n_parts}: {chosen}")
        rest = tuple(k for k in range(1, n_parts + 1) if k not in chosen)
        return cls(s=chosen, t=rest)

    @property
    def n_parts(self) -> int:
        return len(self.s) + len(self.t)

    def label(self) -> str:
        return ",".join(map(str, self.s)) + "|" + ",".join(map(str, self.t))

    @staticmethod
    def enumerate(n_parts: int, min_size: int = 1) -> list["PartitionSpec"]:
        """All cuts ordered by ascending |s|, then lexicographically."""
        out = []
        for size in range(max(1, min_size), n_parts):
            for s in combinations(range(1, n_parts + 1), size):
                out.append(PartitionSpec.from_subset(s, n_parts))
        return out


@dataclass(frozen=True)
class WeightedGraph:
    """Weighted graph on prod(dims) vertices labeled row-major by basis tuples.

    ``adjacency`` holds M(G, a): off-diagonal entries are edge weights with
    a(u, v) = conj(a(v, u)), the diagonal holds the (real) loop weights.
    """

    kind: str
    dims: tuple[int, ...]
    adjacency: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in GRAPH_KINDS:
            raise GraphKindError(f"unknown graph kind '{self.kind}'")
        m = np.asarray(self.adjacency, dtype=complex)
        n = int(np.prod(self.dims)) if self.dims else 0
        if m.shape != (n, n):
            raise DimensionError(f"adjacency shape {m.shape} does not match dims {self.dims}")
        if self.kind == "real":
            if m.size and np.abs(m.imag).max() > 1e-12 * max(1.0, np.abs(m).max()):
                raise GraphKindError("real-weighted graph with complex weights")
            m = m.real.astype(complex)
        m = 0.5 * (m + m.conj().T)
        m[np.diag_indices(n)] = m.diagonal().real
        m.setflags(write=False)
        object.__setattr__(self, "adjacency", m)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def loop_weights(self) -> np.ndarray:
        return self.adjacency.diagonal().real.copy()

    def off_diagonal(self) -> np.ndarray:
        m = self.adjacency.copy()
        m[np.diag_indices(self.n)] = 0
        return m

    def edges(self, threshold: float = 1e-12) -> list[tuple[int, int, complex]]:
        iu, ju = np.triu_indices(self.n, k=1)
        w = self.adjacency[iu, ju]
        keep = np.abs(w) > threshold
        return [(int(i), int(j), complex(x)) for i, j, x in zip(iu[keep], ju[keep], w[keep])]

    def loops(self, threshold: float = 1e-12) -> list[tuple[int, float]]:
        diag = self.loop_weights
        return [(int(v), float(diag[v])) for v in np.flatnonzero(np.abs(diag) > threshold)]

    def degrees(self) -> np.ndarray:
        """d_v: signed weight sum for real graphs, modulus sum plus loop for complex ones."""
        off = self.off_diagonal()
        if self.kind == "real":
            return off.real.sum(axis=1) + self.loop_weights
        return np.abs(off).sum(axis=1) + self.loop_weights

    def degree_sum(self) -> float:
        return float(self.degrees().sum())

    def with_adjacency(self, adjacency: np.ndarray, dims: tuple[int, ...] | None = None) -> "WeightedGraph":
        return WeightedGraph(kind=self.kind, dims=self.dims if dims is None else dims, adjacency=adjacency)


@dataclass
class OrthogonalDecomposition:
    """Terms xi_j u_j(1) o ... o u_j(N) with orthonormal vectors in every mode."""

    coefficients: list[float]
    factors: list[list[np.ndarray]]
    residual: float
    converged: bool

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def coefficient_sum(self) -> float:
        return float(sum(self.coefficients))


@dataclass
class BlochRep:
    dims: tuple[int, ...]
    coherence: Dict[int, np.ndarray]
    tensors: Dict[tuple[int, ...], np.ndarray] = field(default_factory=dict)

    def full_tensor(self) -> np.ndarray:
        return self.tensors[tuple(range(1, len(self.dims) + 1))]


@dataclass
class Verdict:
    status: str
    witness: float
    bound: float
    criterion: str
    partition: PartitionSpec | None = None
    detail: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "status": self.status,
            "witness": float(self.witness),
            "bound": float(self.bound),
            "partition": self.partition.label() if self.partition else None,
            **{k: v for k, v in self.detail.items()},
        }


@dataclass(frozen=True)
class MeasureResult:
    e_t: float
    eps_t: float
    tensor_norm: float
    normalized_by_ghz: float | None = None

    def to_dict(self) -> dict:
        return {
            "E_T": self.e_t,
            "eps_T": self.eps_t,
            "tensor_norm": self.tensor_norm,
            "E_T_over_R_N": self.normalized_by_ghz,
        }


@dataclass
class ThresholdScan:
    family: str
    p_star: float | None
    iterations: int
    bound: float
    outcome: str = "crossing"
    curve: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class FactorTree:
    subsystems: tuple[int, ...]
    dims: tuple[int, ...]
    state: np.ndarray
    children: list["FactorTree"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def leaves(self) -> list["FactorTree"]:
        if self.is_leaf:
            return [self]
        out: list[FactorTree] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def groups(self) -> list[tuple[int, ...]]:
        return [leaf.subsystems for leaf in self.leaves()]


@dataclass
class StateSpec:
    kind: str
    dims: tuple[int, ...]
    data: np.ndarray
    name: str = ""

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"


@dataclass
class Context:
    settings: Settings
    results: Dict[str, pd.DataFrame] = field(default_factory=dict)

    def add_result(self, name: str, df: pd.DataFrame) -> None:
        self.results[name] = df

    def get(self, name: str) -> pd.DataFrame:
        return self.results[name]
