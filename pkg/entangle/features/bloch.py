from __future__ import annotations

import logging
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from entangle.config.settings import get_settings
from entangle.features.numcore import (
    as_density,
    check_dims,
    check_subset,
    kron_all,
    partial_trace,
    permute_subsystems,
    su_generators,
    validate_density,
    validate_pure,
)
from entangle.features.tensor import euclidean_norm, outer
from entangle.models.errors import DimensionError, InvalidStateError
from entangle.models.schema import BlochRep

logger = logging.getLogger(__name__)

MAX_FULL_BLOCH_PARTS = 12


def _prefactor(dims: Sequence[int]) -> float:
    return float(np.prod(dims)) / 2.0 ** len(dims)


def bloch_vector(rho, dims: Sequence[int], k: int) -> np.ndarray:
    """Coherence vector s_a = (d_k / 2) Tr(rho_k l_a) of subsystem ``k`` (1-based)."""
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    if not 1 <= int(k) <= len(dims):
        raise DimensionError(f"subsystem {k} out of range 1..{len(dims)}")
    reduced = partial_trace(m, dims, [k]) if len(dims) > 1 else m
    lam = su_generators(dims[k - 1]).generators
    return 0.5 * dims[k - 1] * np.einsum("aij,ji->a", lam, reduced).real


def correlation_tensor(rho, dims: Sequence[int], subset: Iterable[int]) -> np.ndarray:
    """Correlation tensor of the subsystems in ``subset``.

    Entries are (prod d_k / 2^M) Tr(rho_S l_a1 x ... x l_aM); for qubits the
    prefactor is one and the entries are plain Pauli expectation values.
    """
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    chosen = check_subset(subset, len(dims))
    if len(chosen) < 2:
        raise DimensionError("correlation tensors need at least two subsystems")
    sub_dims = [dims[k - 1] for k in chosen]
    reduced = m if len(chosen) == len(dims) else partial_trace(m, dims, chosen)
    order = len(sub_dims)
    work = reduced.reshape(sub_dims + sub_dims)
    for k, d in enumerate(sub_dims):
        lam = su_generators(d).generators
        remaining = order - k
        # row axis of factor k sits at position k, its column axis `remaining` further on
        work = np.tensordot(work, lam, axes=([k, k + remaining], [2, 1]))
        work = np.moveaxis(work, -1, k)
    return _prefactor(sub_dims) * work.real


def full_tensor(rho, dims: Sequence[int]) -> np.ndarray:
    return correlation_tensor(rho, dims, range(1, len(dims) + 1))


def full_bloch(rho, dims: Sequence[int], validate: bool = True) -> BlochRep:
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    if validate:
        validate_density(m)
    n = len(dims)
    if n > MAX_FULL_BLOCH_PARTS:
        raise DimensionError(f"full Bloch expansion limited to {MAX_FULL_BLOCH_PARTS} parts; request subsets instead")
    coherence = {k: bloch_vector(m, dims, k) for k in range(1, n + 1)}
    tensors = {}
    for size in range(2, n + 1):
        for subset in combinations(range(1, n + 1), size):
            tensors[subset] = correlation_tensor(m, dims, subset)
    return BlochRep(dims=dims, coherence=coherence, tensors=tensors)


def embed_operator(op: np.ndarray, dims: Sequence[int], subset: Sequence[int]) -> np.ndarray:
    """Lift an operator on the ordered ``subset`` to the full space (identity elsewhere)."""
    dims = tuple(dims)
    chosen = list(subset)
    rest = [k for k in range(1, len(dims) + 1) if k not in chosen]
    d_rest = int(np.prod([dims[k - 1] for k in rest])) if rest else 1
    full = np.kron(op, np.eye(d_rest))
    current = chosen + rest
    current_dims = [dims[k - 1] for k in current]
    order = [current.index(k) + 1 for k in range(1, len(dims) + 1)]
    return permute_subsystems(full, current_dims, order)


def _tensor_operator(t: np.ndarray, sub_dims: Sequence[int]) -> np.ndarray:
    work = np.asarray(t, dtype=complex)
    for d in sub_dims:
        work = np.tensordot(work, su_generators(d).generators, axes=([0], [0]))
    # axes are now (r1, c1, r2, c2, ...)
    m = len(sub_dims)
    rows = [2 * k for k in range(m)]
    cols = [2 * k + 1 for k in range(m)]
    side = int(np.prod(sub_dims))
    return work.transpose(rows + cols).reshape(side, side)


def reconstruct(b: BlochRep) -> np.ndarray:
    dims = check_dims(b.dims)
    total = int(np.prod(dims))
    rho = np.eye(total, dtype=complex)
    for k, s in b.coherence.items():
        d = dims[k - 1]
        lam = su_generators(d).generators
        s = np.asarray(s, dtype=float)
        if s.shape != (d * d - 1,):
            raise DimensionError(f"coherence vector {k} has shape {s.shape}, expected {(d * d - 1,)}")
        rho += embed_operator(np.tensordot(s, lam, axes=([0], [0])), dims, [k])
    for subset, t in b.tensors.items():
        sub_dims = [dims[k - 1] for k in subset]
        expected = tuple(d * d - 1 for d in sub_dims)
        if np.shape(t) != expected:
            raise DimensionError(f"tensor {subset} has shape {np.shape(t)}, expected {expected}")
        rho += embed_operator(_tensor_operator(t, sub_dims), dims, list(subset))
    return rho / total


def tensor_element_observable(dims: Sequence[int], subset: Sequence[int], alpha: Sequence[int]) -> np.ndarray:
    """Operator whose expectation, times the tensor prefactor, is element ``alpha`` (1-based generator indices)."""
    dims = check_dims(dims)
    chosen = check_subset(subset, len(dims), allow_empty=False)
    if len(alpha) != len(chosen):
        raise DimensionError("one generator index per subsystem is required")
    mats = [su_generators(dims[k - 1]).generators[a - 1] for k, a in zip(chosen, alpha)]
    return embed_operator(kron_all(mats), dims, list(chosen))


def is_product_pure(psi, dims: Sequence[int], tol: float | None = None) -> bool:
    v = validate_pure(psi)
    dims = check_dims(dims, v.size)
    tol = get_settings().product_tol if tol is None else tol
    rho = as_density(v)
    if len(dims) == 1:
        return True
    vectors = [bloch_vector(rho, dims, k) for k in range(1, len(dims) + 1)]
    return euclidean_norm(full_tensor(rho, dims) - outer(vectors)) <= tol


def purity_identity(rho, dims: Sequence[int]) -> float:
    """|2^N Tr(rho^2) - (1 + sum |s|^2 + sum |T_S|^2)| for an N-qubit state."""
    m = as_density(rho)
    dims = check_dims(dims, m.shape[0])
    if any(d != 2 for d in dims):
        raise DimensionError("purity identity is stated for qubit systems only")
    b = full_bloch(m, dims, validate=False)
    total = 1.0 + sum(float(np.dot(s, s)) for s in b.coherence.values())
    total += sum(euclidean_norm(t) ** 2 for t in b.tensors.values())
    purity = float(np.trace(m @ m).real)
    return abs(2 ** len(dims) * purity - total)


def require_qubits(dims: Sequence[int]) -> tuple[int, ...]:
    dims = check_dims(dims)
    if any(d != 2 for d in dims):
        raise InvalidStateError(f"operation needs an all-qubit system, got dims {list(dims)}")
    return dims
