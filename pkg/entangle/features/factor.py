from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from scipy import linalg

from entangle.config.settings import get_settings
from entangle.features.bloch import bloch_vector, correlation_tensor
from entangle.features.graphstate import degree_criterion, graph_from_density, is_edge_closed
from entangle.features.numcore import (
    check_dims,
    density_from_vector,
    partial_trace,
    permute_vector,
    validate_pure,
)
from entangle.features.tensor import euclidean_norm, outer
from entangle.models.errors import DimensionError
from entangle.models.schema import FactorTree, PartitionSpec, WeightedGraph

logger = logging.getLogger(__name__)

_FIDELITY_TOL = 1e-9


def _cut(dims: tuple[int, ...], p: PartitionSpec | Sequence[int]) -> PartitionSpec:
    partition = p if isinstance(p, PartitionSpec) else PartitionSpec.from_subset(p, len(dims))
    if partition.n_parts != len(dims):
        raise DimensionError(f"cut {partition.label()} does not match {len(dims)} subsystems")
    return partition


def _pure_graph(v: np.ndarray, dims: tuple[int, ...]) -> WeightedGraph:
    # complex weights throughout, so the closure test compares weight moduli
    return graph_from_density(density_from_vector(v), dims, kind="complex")


def edge_closure_test(psi, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> bool:
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    partition = _cut(dims, p)
    return is_edge_closed(_pure_graph(v, dims), dims, partition)


def pure_degree_criterion(psi, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> bool:
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    return degree_criterion(_pure_graph(v, dims), dims, _cut(dims, p))


def bloch_factor_oracle(psi, dims: Sequence[int], p: PartitionSpec | Sequence[int]) -> bool:
    """Product test on the two-block coarse graining s|t via the Bloch representation."""
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    partition = _cut(dims, p)
    order = list(partition.s) + list(partition.t)
    block_dims = (
        int(np.prod([dims[k - 1] for k in partition.s])),
        int(np.prod([dims[k - 1] for k in partition.t])),
    )
    rho = density_from_vector(permute_vector(v, dims, order))
    t = correlation_tensor(rho, block_dims, [1, 2])
    expected = outer([bloch_vector(rho, block_dims, 1), bloch_vector(rho, block_dims, 2)])
    return euclidean_norm(t - expected) <= get_settings().product_tol


def _largest_prime_factor(n: int) -> int:
    largest, k = 1, 2
    while k * k <= n:
        while n % k == 0:
            largest, n = k, n // k
        k += 1
    return max(largest, n) if n > 1 else largest


def _min_cut_size(n_support: int, dims: tuple[int, ...]) -> int:
    p1 = _largest_prime_factor(n_support)
    running = 1
    for size, d in enumerate(sorted(dims, reverse=True), start=1):
        running *= d
        if running >= p1:
            return size
    return len(dims)


def _dominant_state(rho: np.ndarray) -> np.ndarray:
    _, vecs = linalg.eigh(rho)
    vec = vecs[:, -1]
    pivot = np.argmax(np.abs(vec))
    vec = vec * (abs(vec[pivot]) / vec[pivot])
    return vec / np.linalg.norm(vec)


def _split(v: np.ndarray, dims: tuple[int, ...], partition: PartitionSpec) -> tuple[np.ndarray, np.ndarray] | None:
    rho = density_from_vector(v)
    psi_s = _dominant_state(partial_trace(rho, dims, partition.s))
    psi_t = _dominant_state(partial_trace(rho, dims, partition.t))
    sub_dims = [dims[k - 1] for k in partition.s] + [dims[k - 1] for k in partition.t]
    order = list(partition.s) + list(partition.t)
    back = [order.index(k) + 1 for k in range(1, len(dims) + 1)]
    rebuilt = permute_vector(np.kron(psi_s, psi_t), sub_dims, back)
    fidelity = abs(np.vdot(rebuilt, v)) ** 2
    if fidelity < 1.0 - _FIDELITY_TOL:
        logger.debug("cut %s passed the graph test but factors reach fidelity %.3e only", partition.label(), fidelity)
        return None
    return psi_s, psi_t


def _common_symbol_cut(v: np.ndarray, dims: tuple[int, ...], support: np.ndarray) -> PartitionSpec | None:
    labels = np.array(np.unravel_index(support, dims)).T
    for k in range(len(dims)):
        if np.all(labels[:, k] == labels[0, k]):
            return PartitionSpec.from_subset([k + 1], len(dims))
    return None


def factor_once(psi, dims: Sequence[int]) -> tuple[PartitionSpec, np.ndarray, np.ndarray] | None:
    """First product cut in enumeration order with its two factor states, or None if fully entangled.

    Cuts are tried by ascending |s| then lexicographically, starting at the
    smallest size whose largest dimensions can host the largest prime factor
    of the number of nonzero amplitudes. A prime support size uses the
    common-symbol shortcut instead.
    """
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    if len(dims) < 2:
        raise DimensionError("factorization needs at least two subsystems")
    zero = get_settings().amplitude_zero
    v = np.where(np.abs(v) <= zero, 0.0, v)
    v = v / np.linalg.norm(v)
    support = np.flatnonzero(v)
    n_support = support.size

    if n_support == 1 or _largest_prime_factor(n_support) == n_support:
        partition = _common_symbol_cut(v, dims, support)
        if partition is None:
            return None
        split = _split(v, dims, partition)
        return None if split is None else (partition, *split)

    graph = _pure_graph(v, dims)
    for partition in PartitionSpec.enumerate(len(dims), _min_cut_size(n_support, dims)):
        if not degree_criterion(graph, dims, partition):
            continue
        split = _split(v, dims, partition)
        if split is not None:
            return partition, split[0], split[1]
    return None


def full_factorize(psi, dims: Sequence[int], subsystems: Sequence[int] | None = None) -> FactorTree:
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    labels = tuple(subsystems) if subsystems is not None else tuple(range(1, len(dims) + 1))
    node = FactorTree(subsystems=labels, dims=dims, state=v)
    if len(dims) < 2:
        return node
    found = factor_once(v, dims)
    if found is None:
        return node
    partition, psi_s, psi_t = found
    logger.debug("factor %s splits at %s", labels, partition.label())
    for side, state in ((partition.s, psi_s), (partition.t, psi_t)):
        node.children.append(
            full_factorize(state, tuple(dims[k - 1] for k in side), tuple(labels[k - 1] for k in side))
        )
    return node


def reassemble(tree: FactorTree) -> np.ndarray:
    """Tensor product of the leaves, reordered to the original subsystem order."""
    leaves = tree.leaves()
    order = [k for leaf in leaves for k in leaf.subsystems]
    sub_dims = [d for leaf in leaves for d in leaf.dims]
    state = np.ones(1, dtype=complex)
    for leaf in leaves:
        state = np.kron(state, leaf.state)
    ranked = sorted(order)
    positions = [ranked.index(k) + 1 for k in order]
    back = [positions.index(k) + 1 for k in range(1, len(order) + 1)]
    return permute_vector(state, sub_dims, back)
