from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np

from entangle.config.settings import get_settings
from entangle.features.bloch import full_bloch, full_tensor
from entangle.features.graphstate import degree_mismatch, graph_from_density, is_pure_graph
from entangle.features.numcore import (
    as_density,
    check_dims,
    check_subset,
    hermitian_eigenvalues,
    nuclear_norm,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    validate_density,
)
from entangle.features.tensor import entrywise_rank1_sum, kyfan_norm, orthogonal_deflation
from entangle.models.errors import DimensionError
from entangle.models.schema import PartitionSpec, Verdict

logger = logging.getLogger(__name__)

ENTANGLED = "Entangled"
SEPARABLE = "Separable"
INCONCLUSIVE = "Inconclusive"
_MARGIN = 1e-12


def kyfan_bound(dims: Sequence[int]) -> float:
    dims = check_dims(dims)
    return float(np.sqrt(np.prod([d * (d - 1) for d in dims]) / 2.0 ** len(dims)))


def _prepare(rho, dims) -> tuple[np.ndarray, tuple[int, ...]]:
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    validate_density(m)
    return m, dims


def _kyfan_verdict(m: np.ndarray, dims: tuple[int, ...], criterion: str, **detail) -> Verdict:
    if len(dims) < 2:
        raise DimensionError("the Ky Fan criterion needs at least two subsystems")
    witness = kyfan_norm(full_tensor(m, dims))
    bound = kyfan_bound(dims)
    status = ENTANGLED if witness > bound + _MARGIN else INCONCLUSIVE
    logger.debug("%s: |T|_KF=%.12g bound=%.12g -> %s", criterion, witness, bound, status)
    return Verdict(status=status, witness=witness, bound=bound, criterion=criterion, detail=dict(detail))


def kyfan_test(rho, dims: Sequence[int]) -> Verdict:
    """Entangled when the Ky Fan norm of the full correlation tensor exceeds the product-state bound."""
    m, dims = _prepare(rho, dims)
    return _kyfan_verdict(m, dims, "kyfan")


def kyfan_test_subsystem(rho, dims: Sequence[int], subset: Iterable[int]) -> Verdict:
    m, dims = _prepare(rho, dims)
    chosen = check_subset(subset, len(dims))
    if len(chosen) < 2:
        raise DimensionError("subsystem test needs at least two subsystems")
    reduced = partial_trace(m, dims, chosen)
    sub_dims = tuple(dims[k - 1] for k in chosen)
    return _kyfan_verdict(reduced, sub_dims, "kyfan-subsystem", subsystems=list(chosen))


def coarse_grain(rho, dims: Sequence[int], groups: Sequence[Sequence[int]]) -> tuple[np.ndarray, tuple[int, ...]]:
    """Merge subsystems into blocks; returns the reordered matrix and the block dimensions."""
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    flat = [int(k) for g in groups for k in g]
    if sorted(flat) != list(range(1, len(dims) + 1)) or any(len(g) == 0 for g in groups):
        raise DimensionError(f"groups {groups} do not partition subsystems 1..{len(dims)}")
    if len(groups) < 2:
        raise DimensionError("grouping must have at least two blocks")
    reordered = permute_subsystems(m, dims, flat)
    block_dims = tuple(int(np.prod([dims[k - 1] for k in g])) for g in groups)
    return reordered, block_dims


def kyfan_test_partition(rho, dims: Sequence[int], groups: Sequence[Sequence[int]]) -> Verdict:
    m, dims = _prepare(rho, dims)
    merged, block_dims = coarse_grain(m, dims, groups)
    label = "|".join(",".join(str(k) for k in g) for g in groups)
    return _kyfan_verdict(merged, block_dims, "kyfan-partition", groups=label, block_dims=list(block_dims))


def _higher_order_term(t: np.ndarray) -> tuple[float, bool]:
    """Coefficient sum of a rank-1 expansion with unit vectors, and whether it is completely orthogonal."""
    if t.ndim == 2:
        return nuclear_norm(t), True
    deflation = orthogonal_deflation(t)
    if deflation.converged:
        return deflation.coefficient_sum(), True
    return entrywise_rank1_sum(t), False


def sufficiency_test(rho, dims: Sequence[int]) -> Verdict:
    """Separable when the weighted norm sum over the whole Bloch expansion is at most one.

    Order-2 tensors enter through their trace norm, higher orders through a
    completely orthogonal decomposition when deflation finds one. Otherwise
    the standard-basis rank-1 expansion is used, which is also a valid
    unit-vector decomposition but gives a weaker (larger) sum.
    """
    m, dims = _prepare(rho, dims)
    if list(dims) != sorted(dims):
        raise DimensionError(f"sufficiency test expects nondecreasing dims, got {list(dims)}")
    b = full_bloch(m, dims, validate=False)
    total = 0.0
    for k, s in b.coherence.items():
        d = dims[k - 1]
        total += np.sqrt(2.0 * (d - 1) / d) * float(np.linalg.norm(s))
    non_orthogonal = []
    for subset, t in b.tensors.items():
        sub_dims = [dims[k - 1] for k in subset]
        weight = np.sqrt(2.0 ** len(sub_dims) * np.prod([d - 1 for d in sub_dims]) / np.prod(sub_dims))
        value, orthogonal = _higher_order_term(t)
        if not orthogonal:
            non_orthogonal.append(list(subset))
        total += weight * value
    status = SEPARABLE if total <= 1.0 + _MARGIN else INCONCLUSIVE
    if non_orthogonal:
        logger.info("no completely orthogonal decomposition for %s; used standard-basis expansion", non_orthogonal)
    return Verdict(
        status=status,
        witness=float(total),
        bound=1.0,
        criterion="sufficient",
        detail={"non_orthogonal_subsets": non_orthogonal},
    )


def nqubit_iff_test(rho, dims: Sequence[int]) -> Verdict:
    """Exact test for qubit states whose only nonzero Bloch component is the full tensor."""
    m, dims = _prepare(rho, dims)
    if any(d != 2 for d in dims):
        raise DimensionError("this test applies to qubit systems only")
    b = full_bloch(m, dims, validate=False)
    full = b.full_tensor()
    witness = kyfan_norm(full)
    lower = [np.abs(s).max() for s in b.coherence.values()]
    lower += [np.abs(t).max() for key, t in b.tensors.items() if len(key) < len(dims)]
    if max(lower, default=0.0) > 1e-10:
        return Verdict(INCONCLUSIVE, witness, 1.0, "nqubit-iff", detail={"reason": "lower-order terms present"})
    deflation = orthogonal_deflation(full)
    if not deflation.converged:
        return Verdict(INCONCLUSIVE, witness, 1.0, "nqubit-iff", detail={"reason": "no completely orthogonal decomposition"})
    status = ENTANGLED if witness > 1.0 + _MARGIN else SEPARABLE
    return Verdict(status, witness, 1.0, "nqubit-iff", detail={"rank": deflation.rank})


def ppt_test(rho, dims: Sequence[int], cut: PartitionSpec | Iterable[int]) -> Verdict:
    m, dims = _prepare(rho, dims)
    partition = cut if isinstance(cut, PartitionSpec) else PartitionSpec.from_subset(cut, len(dims))
    if partition.n_parts != len(dims):
        raise DimensionError(f"cut {partition.label()} does not match {len(dims)} subsystems")
    min_eig = float(hermitian_eigenvalues(partial_transpose(m, dims, partition.s))[0])
    tol = get_settings().ppt_tol
    status = ENTANGLED if min_eig < -tol else INCONCLUSIVE
    return Verdict(status, -min_eig, tol, "ppt", partition=partition, detail={"min_eigenvalue": min_eig})


def degree_test(rho, dims: Sequence[int], cut: PartitionSpec | Iterable[int], kind: str | None = None) -> Verdict:
    """Degree criterion on the state's graph.

    Failure proves entanglement across the cut for pure states and for
    loopless real-weighted graphs; for other mixed states it is reported
    but left inconclusive.
    """
    m, dims = _prepare(rho, dims)
    partition = cut if isinstance(cut, PartitionSpec) else PartitionSpec.from_subset(cut, len(dims))
    g = graph_from_density(m, dims, kind=kind)
    mismatch = degree_mismatch(g, dims, partition)
    tol = get_settings().degree_tol
    holds = mismatch <= tol
    decisive = is_pure_graph(g) or (g.kind == "real" and not g.loops())
    status = ENTANGLED if (not holds and decisive) else INCONCLUSIVE
    return Verdict(
        status,
        mismatch,
        tol,
        "degree",
        partition=partition,
        detail={"degree_criterion": bool(holds), "graph_kind": g.kind, "decisive": bool(decisive)},
    )
