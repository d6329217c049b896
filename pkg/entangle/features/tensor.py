from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from entangle.config.settings import get_settings
from entangle.features.numcore import nuclear_norm, singular_values
from entangle.models.errors import DimensionError
from entangle.models.schema import OrthogonalDecomposition

logger = logging.getLogger(__name__)


def as_tensor(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _check_mode(t: np.ndarray, n: int) -> int:
    if not 1 <= int(n) <= t.ndim:
        raise DimensionError(f"mode {n} out of range 1..{t.ndim}")
    return int(n) - 1


def _cyclic_axes(order: int, k: int) -> list[int]:
    # mode k first, then k+1 .. N, then 1 .. k-1 (0-based)
    return [k] + list(range(k + 1, order)) + list(range(k))


def unfold(t, n: int) -> np.ndarray:
    """Mode-n matricization with backward-cyclic column ordering.

    Element t[i_1..i_N] lands in row i_n; the column index runs over
    i_{n+1} .. i_N i_1 .. i_{n-1} with i_{n+1} slowest and i_{n-1} fastest.
    """
    a = as_tensor(t)
    k = _check_mode(a, n)
    return a.transpose(_cyclic_axes(a.ndim, k)).reshape(a.shape[k], -1)


def refold(m, dims: Sequence[int], n: int) -> np.ndarray:
    dims = tuple(int(d) for d in dims)
    k = int(n) - 1
    if not 0 <= k < len(dims):
        raise DimensionError(f"mode {n} out of range 1..{len(dims)}")
    mat = np.asarray(m, dtype=float)
    axes = _cyclic_axes(len(dims), k)
    permuted = tuple(dims[a] for a in axes)
    if mat.shape != (dims[k], int(np.prod(permuted[1:])) if len(permuted) > 1 else 1):
        raise DimensionError(f"matrix of shape {mat.shape} cannot refold to {dims} along mode {n}")
    return mat.reshape(permuted).transpose(np.argsort(axes))


def mode_product(t, a, n: int) -> np.ndarray:
    """T x_n A: contracts mode n of T with the columns of A."""
    y = as_tensor(t)
    k = _check_mode(y, n)
    mat = np.asarray(a, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != y.shape[k]:
        raise DimensionError(f"matrix with {mat.shape[-1]} columns cannot act on mode {n} of size {y.shape[k]}")
    out = np.tensordot(mat, y, axes=([1], [k]))
    return np.moveaxis(out, 0, k)


def outer(vectors: Sequence) -> np.ndarray:
    if len(vectors) == 0:
        raise DimensionError("outer product needs at least one vector")
    out = np.asarray(vectors[0], dtype=float).reshape(-1)
    for v in vectors[1:]:
        out = np.multiply.outer(out, np.asarray(v, dtype=float).reshape(-1))
    return out


def khatri_rao(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise DimensionError(f"Khatri-Rao product needs equal column counts, got {a.shape} and {b.shape}")
    return np.einsum("ik,jk->ijk", a, b).reshape(a.shape[0] * b.shape[0], a.shape[1])


def inner(x, y) -> float:
    return float(np.sum(as_tensor(x) * as_tensor(y)))


def euclidean_norm(t) -> float:
    return float(np.linalg.norm(as_tensor(t).reshape(-1)))


def kyfan_norm(t) -> float:
    """Largest trace norm over all mode-n unfoldings."""
    a = as_tensor(t)
    if a.ndim == 0:
        return abs(float(a))
    return max(nuclear_norm(unfold(a, n)) for n in range(1, a.ndim + 1))


def max_singular_value(t) -> float:
    a = as_tensor(t)
    return max(float(singular_values(unfold(a, n))[0]) for n in range(1, a.ndim + 1))


def is_supersymmetric(t, tol: float | None = None) -> bool:
    a = as_tensor(t)
    if len(set(a.shape)) > 1:
        raise DimensionError(f"supersymmetry needs equal mode sizes, got {a.shape}")
    tol = get_settings().supersymmetry_tol if tol is None else tol
    # transpositions (0 k) generate the full symmetric group
    for k in range(1, a.ndim):
        axes = list(range(a.ndim))
        axes[0], axes[k] = axes[k], axes[0]
        if np.abs(a - a.transpose(axes)).max(initial=0.0) > tol:
            return False
    return True


def _complement_projector(vectors: list[np.ndarray], size: int) -> np.ndarray:
    p = np.eye(size)
    for v in vectors:
        p -= np.outer(v, v)
    return p


def _contract_except(t: np.ndarray, vecs: list[np.ndarray], skip: int) -> np.ndarray:
    out = t
    # contract from the last mode down so remaining axis indices stay valid
    for k in reversed(range(t.ndim)):
        if k != skip:
            out = np.tensordot(out, vecs[k], axes=([k], [0]))
    return out


def orthogonal_deflation(
    t,
    max_terms: int | None = None,
    tol: float | None = None,
    max_sweeps: int = 200,
) -> OrthogonalDecomposition:
    """Greedy completely orthogonal rank-1 deflation.

    Each term is found by alternating power iteration started at the
    largest residual entry, with every mode vector kept orthogonal to the
    vectors already extracted in that mode. ``converged`` is False when the
    residual cannot be driven below ``tol``.
    """
    settings = get_settings()
    max_terms = settings.deflation_max_terms if max_terms is None else max_terms
    tol = settings.deflation_tol if tol is None else tol
    residual = as_tensor(t).copy()
    order = residual.ndim
    coefficients: list[float] = []
    factors: list[list[np.ndarray]] = [[] for _ in range(order)]

    for _ in range(max_terms):
        if euclidean_norm(residual) <= tol:
            break
        projectors = [_complement_projector(factors[k], residual.shape[k]) for k in range(order)]
        start = np.unravel_index(np.argmax(np.abs(residual)), residual.shape)
        vecs = []
        for k in range(order):
            v = projectors[k][:, start[k]]
            if np.linalg.norm(v) <= tol:
                u, _, _ = np.linalg.svd(projectors[k] @ unfold(residual, k + 1), full_matrices=False)
                v = u[:, 0]
            norm = np.linalg.norm(v)
            if norm <= tol:
                logger.debug("deflation: mode %d has no orthogonal room left", k + 1)
                return OrthogonalDecomposition(coefficients, factors, euclidean_norm(residual), False)
            vecs.append(v / norm)

        for _ in range(max_sweeps):
            previous = [v.copy() for v in vecs]
            for k in range(order):
                v = projectors[k] @ _contract_except(residual, vecs, k)
                norm = np.linalg.norm(v)
                if norm <= tol:
                    break
                vecs[k] = v / norm
            if max(np.abs(v - w).max() for v, w in zip(vecs, previous)) < 1e-13:
                break

        xi = inner(residual, outer(vecs))
        if abs(xi) <= tol:
            logger.debug("deflation stalled with residual %.3e", euclidean_norm(residual))
            return OrthogonalDecomposition(coefficients, factors, euclidean_norm(residual), False)
        if xi < 0:
            vecs[0] = -vecs[0]
            xi = -xi
        residual = residual - xi * outer(vecs)
        coefficients.append(float(xi))
        for k in range(order):
            factors[k].append(vecs[k])

    remaining = euclidean_norm(residual)
    return OrthogonalDecomposition(coefficients, factors, remaining, remaining <= tol)


def entrywise_rank1_sum(t) -> float:
    """Coefficient sum of the expansion of T over standard-basis rank-1 terms."""
    return float(np.abs(as_tensor(t)).sum())
