from __future__ import annotations

import logging
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import linalg
from scipy.stats import unitary_group

from entangle.config.settings import get_settings
from entangle.models.errors import DimensionError, InvalidStateError, NotHermitianError
from entangle.models.schema import GeneratorBasis

logger = logging.getLogger(__name__)

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got array of shape {m.shape}")
    return m


def check_dims(dims: Sequence[int], side: int | None = None) -> tuple[int, ...]:
    out = tuple(int(d) for d in dims)
    if not out or any(d < 2 for d in out):
        raise DimensionError(f"every subsystem dimension must be >= 2, got {list(dims)}")
    if side is not None and int(np.prod(out)) != side:
        raise DimensionError(f"dims {list(out)} do not match matrix side {side}")
    return out


def check_subset(subset: Iterable[int], n_parts: int, allow_empty: bool = True) -> tuple[int, ...]:
    """Validate a set of 1-based subsystem indices and return it sorted."""
    out = tuple(sorted({int(k) for k in subset}))
    if not out and not allow_empty:
        raise DimensionError("subsystem set must be nonempty")
    if out and (out[0] < 1 or out[-1] > n_parts):
        raise DimensionError(f"subsystem index out of range 1..{n_parts}: {list(out)}")
    return out


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def is_hermitian(a, tol: float | None = None) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    tol = get_settings().hermitian_tol if tol is None else tol
    scale = max(float(np.abs(m).max()) if m.size else 0.0, 1e-300)
    return bool(np.abs(m - m.conj().T).max() <= tol * scale) if m.size else True


def _square(rho, dims) -> tuple[np.ndarray, tuple[int, ...]]:
    m = as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got {m.shape}")
    return m, check_dims(dims, m.shape[0])


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced matrix on the 1-based subsystems in ``keep`` (kept in ascending order)."""
    m, dims = _square(rho, dims)
    n = len(dims)
    kept = [k - 1 for k in check_subset(keep, n, allow_empty=False)]
    traced = [k for k in range(n) if k not in kept]
    dk = int(np.prod([dims[k] for k in kept]))
    dt = int(np.prod([dims[k] for k in traced])) if traced else 1
    t = m.reshape(dims + dims)
    order = kept + traced + [n + k for k in kept] + [n + k for k in traced]
    t = t.transpose(order).reshape(dk, dt, dk, dt)
    return np.trace(t, axis1=1, axis2=3)


def partial_transpose(rho, dims: Sequence[int], subset: Iterable[int]) -> np.ndarray:
    m, dims = _square(rho, dims)
    n = len(dims)
    chosen = [k - 1 for k in check_subset(subset, n)]
    if not chosen:
        return m.copy()
    axes = list(range(2 * n))
    for k in chosen:
        axes[k], axes[n + k] = axes[n + k], axes[k]
    side = m.shape[0]
    return m.reshape(dims + dims).transpose(axes).reshape(side, side)


def permute_subsystems(rho, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors so that new factor i is old factor ``order[i]`` (1-based)."""
    m, dims = _square(rho, dims)
    n = len(dims)
    perm = [k - 1 for k in order]
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{list(order)} is not a permutation of 1..{n}")
    side = m.shape[0]
    return m.reshape(dims + dims).transpose(perm + [n + k for k in perm]).reshape(side, side)


def permute_vector(psi, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    dims = check_dims(dims, v.size)
    perm = [k - 1 for k in order]
    if sorted(perm) != list(range(len(dims))):
        raise DimensionError(f"{list(order)} is not a permutation of 1..{len(dims)}")
    return v.reshape(dims).transpose(perm).reshape(-1)


def hermitian_eigenvalues(a) -> np.ndarray:
    m = as_matrix(a)
    if not is_hermitian(m):
        raise NotHermitianError("eigenvalue routine requires a Hermitian matrix")
    return linalg.eigvalsh(0.5 * (m + m.conj().T))


def is_psd(a, tol: float | None = None) -> bool:
    m = as_matrix(a)
    tol = get_settings().psd_tol if tol is None else tol
    evals = hermitian_eigenvalues(m)
    scale = float(np.abs(m).max()) if m.size else 0.0
    return bool(evals[0] >= -tol * max(scale, 1e-300))


def singular_values(m) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.size == 0:
        return np.zeros(0)
    return linalg.svdvals(a)


def nuclear_norm(m) -> float:
    return float(singular_values(m).sum())


def density_from_vector(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def as_density(state, dims: Sequence[int] | None = None) -> np.ndarray:
    """Coerce a state vector or density matrix to a density matrix."""
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1 or (a.ndim == 2 and 1 in a.shape):
        rho = density_from_vector(a)
    else:
        rho = as_matrix(a)
    if dims is not None:
        check_dims(dims, rho.shape[0])
    return rho


def validate_density(rho, tol: float | None = None) -> np.ndarray:
    m = as_matrix(rho)
    tol = get_settings().state_tol if tol is None else tol
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"density matrix must be square, got {m.shape}")
    if not is_hermitian(m, tol):
        raise NotHermitianError("density matrix is not Hermitian")
    trace = np.trace(m).real
    if abs(trace - 1.0) > tol:
        raise InvalidStateError(f"density matrix trace is {trace:.12g}, expected 1")
    if linalg.eigvalsh(0.5 * (m + m.conj().T))[0] < -tol:
        raise InvalidStateError("density matrix is not positive semidefinite")
    return m


def validate_pure(psi, tol: float | None = None) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).reshape(-1)
    tol = get_settings().state_tol if tol is None else tol
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"state vector has squared norm {norm:.12g}, expected 1")
    return v


def _basis_matrix(d: int, j: int, k: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[j, k] = 1.0
    return m


@lru_cache(maxsize=None)
def _generator_stack(d: int) -> np.ndarray:
    if d == 2:
        stack = np.stack([PAULI_X, PAULI_Y, PAULI_Z])
    else:
        w_block = []
        for l in range(1, d):
            diag = np.zeros(d)
            diag[:l] = 1.0
            diag[l] = -float(l)
            w_block.append(np.sqrt(2.0 / (l * (l + 1))) * np.diag(diag).astype(complex))
        pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
        u_block = [_basis_matrix(d, j, k) + _basis_matrix(d, k, j) for j, k in pairs]
        v_block = [-1j * (_basis_matrix(d, j, k) - _basis_matrix(d, k, j)) for j, k in pairs]
        stack = np.stack(w_block + u_block + v_block)
    stack.setflags(write=False)
    return stack


def su_generators(d: int) -> GeneratorBasis:
    """Hilbert-Schmidt orthogonal generators of SU(d) with Tr(l_i l_j) = 2 delta_ij.

    For d = 2 these are the Pauli matrices in (x, y, z) order. For d >= 3 the
    diagonal w_l block comes first, then the symmetric u_jk, then the
    antisymmetric v_jk, each with j < k in lexicographic order.
    """
    if int(d) < 2:
        raise DimensionError(f"SU(d) generators need d >= 2, got {d}")
    return GeneratorBasis(d=int(d), generators=_generator_stack(int(d)))


def structure_constants(basis: GeneratorBasis) -> tuple[np.ndarray, np.ndarray]:
    """Return (f, g) with f_ijk = -(i/4) Tr([l_i, l_j] l_k) and g_ijk = (1/4) Tr({l_i, l_j} l_k)."""
    lam = basis.generators
    triple = np.einsum("iab,jbc,kca->ijk", lam, lam, lam, optimize=True)
    swapped = triple.transpose(1, 0, 2)
    f = (-0.25j * (triple - swapped)).real
    g = (0.25 * (triple + swapped)).real
    return f, g


def orthogonality_residual(basis: GeneratorBasis) -> float:
    lam = basis.generators
    gram = np.einsum("iab,jba->ij", lam, lam)
    return float(np.abs(gram - 2.0 * np.eye(len(basis))).max())


def algebra_residual(basis: GeneratorBasis) -> float:
    """Max entrywise residual of l_i l_j = (2/d) delta_ij I + (i f_ijk + g_ijk) l_k."""
    lam = basis.generators
    d = basis.d
    products = np.einsum("iab,jbc->ijac", lam, lam)
    expansion = np.einsum("ijk,kac->ijac", 1j * basis.f_tensor + basis.g_tensor, lam)
    ident = (2.0 / d) * np.einsum("ij,ac->ijac", np.eye(len(basis)), np.eye(d))
    return float(np.abs(products - ident - expansion).max())


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_local_unitary(dims: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    return kron_all(random_unitary(d, rng) for d in dims)
