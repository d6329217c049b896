from __future__ import annotations

import logging
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from entangle.features.bloch import bloch_vector, embed_operator, full_tensor, require_qubits
from entangle.features.numcore import as_density, check_dims, partial_trace, validate_pure
from entangle.features.states import check_probability, heisenberg_state
from entangle.features.tensor import euclidean_norm
from entangle.models.errors import DimensionError, InvalidStateError
from entangle.models.schema import MeasureResult

logger = logging.getLogger(__name__)

# beyond this many qubits the full tensor (3^N entries from a 4^N matrix) is
# replaced by the reduced-purity expansion of its squared norm
FULL_TENSOR_MAX_QUBITS = 8

__all__ = [
    "decomposition_upper_bound",
    "e_t",
    "eps_t",
    "ghz_family_et",
    "heisenberg_elementwise_norm_sq",
    "heisenberg_et",
    "heisenberg_norm_sq",
    "heisenberg_state",
    "povm_outcomes",
    "r_n",
    "schmidt_form_bound",
    "tensor_norm",
    "traced_tensor_norm",
    "two_qubit_norm_sq",
    "w_state_et",
    "wghz_superposition_et",
]


def _qubit_dims(size: int, dims: Sequence[int] | None) -> tuple[int, ...]:
    if dims is None:
        n = int(round(np.log2(size)))
        if 2**n != size or n < 1:
            raise InvalidStateError(f"state of size {size} is not an N-qubit state")
        dims = [2] * n
    return require_qubits(check_dims(dims, size))


def _reduced_purity(v: np.ndarray, dims: tuple[int, ...], subset: tuple[int, ...]) -> float:
    if not subset:
        return 1.0
    rest = [k for k in range(1, len(dims) + 1) if k not in subset]
    axes = [k - 1 for k in subset] + [k - 1 for k in rest]
    a = v.reshape(dims).transpose(axes).reshape(int(np.prod([dims[k - 1] for k in subset])), -1)
    # Tr(rho_S^2) = |A A^dag|_F^2 = |A^dag A|_F^2, so contract over the larger side
    gram = a @ a.conj().T if a.shape[0] <= a.shape[1] else a.conj().T @ a
    return float(np.sum(np.abs(gram) ** 2))


def _norm_sq_by_purities(v: np.ndarray, dims: tuple[int, ...]) -> float:
    """Sum of squared N-fold Pauli expectations via inclusion-exclusion over reduced purities."""
    n = len(dims)
    total = 0.0
    for size in range(n + 1):
        sign = (-1) ** (n - size)
        for subset in combinations(range(1, n + 1), size):
            total += sign * 2**size * _reduced_purity(v, dims, subset)
    return total


def _state_tensor_norm(rho: np.ndarray, dims: tuple[int, ...]) -> float:
    if len(dims) == 1:
        return float(np.linalg.norm(bloch_vector(rho, dims, 1)))
    return euclidean_norm(full_tensor(rho, dims))


def tensor_norm(psi, dims: Sequence[int] | None = None) -> float:
    """Euclidean norm of the full correlation tensor of an N-qubit pure state."""
    v = validate_pure(psi)
    dims = _qubit_dims(v.size, dims)
    if len(dims) <= FULL_TENSOR_MAX_QUBITS:
        return _state_tensor_norm(as_density(v), dims)
    return float(np.sqrt(max(_norm_sq_by_purities(v, dims), 0.0)))


def r_n(n: int) -> float:
    """E_T of the N-qubit GHZ state."""
    if n < 2:
        raise DimensionError("GHZ normalization needs N >= 2")
    even = sum(comb(n, 2 * k) for k in range(1, n // 2 + 1))
    return float(np.sqrt(1.0 + 0.25 * (1 + (-1) ** n) ** 2 + even) - 1.0)


def e_t(psi, dims: Sequence[int] | None = None, normalize: bool = False) -> MeasureResult:
    v = validate_pure(psi)
    dims = _qubit_dims(v.size, dims)
    norm = tensor_norm(v, dims)
    value = norm - 1.0
    if value < -1e-9:
        logger.warning("tensor norm %.12g below one for a pure state", norm)
    ratio = value / r_n(len(dims)) if normalize and len(dims) >= 2 else None
    return MeasureResult(e_t=value, eps_t=float(np.log2(norm)), tensor_norm=norm, normalized_by_ghz=ratio)


def eps_t(psi, dims: Sequence[int] | None = None) -> float:
    return float(np.log2(tensor_norm(psi, dims)))


def ghz_family_et(p: float, n: int) -> float:
    """Closed form for sqrt(p)|0...0> + sqrt(1 - p)|1...1>."""
    p = check_probability(p)
    if n < 2:
        raise DimensionError("GHZ family needs N >= 2")
    mix = 4.0 * p * (1.0 - p)
    even = sum(comb(n, 2 * k) for k in range(1, n // 2 + 1))
    norm_sq = mix + (p + (-1) ** n * (1.0 - p)) ** 2 + mix * even
    return float(np.sqrt(norm_sq) - 1.0)


def w_state_et(n: int) -> float:
    if n < 3:
        raise DimensionError("closed form for the W state holds for N >= 3")
    return float(np.sqrt(1.0 + 4.0 * (n - 1) / n) - 1.0)


def wghz_superposition_et(s: float) -> float:
    """Three-qubit sqrt(s)|GHZ> + sqrt(1 - s) e^{i phi}|W>; independent of phi."""
    s = check_probability(s, "s")
    return float(np.sqrt(4.0 * s**2 + 6.0 * s * (1.0 - s) + (11.0 / 3.0) * (1.0 - s) ** 2) - 1.0)


def _check_excitations(n: int, s: int) -> None:
    if n < 1 or not 0 <= s <= n:
        raise DimensionError(f"excitation number must lie in 0..{n}, got {s}")


def heisenberg_norm_sq(n: int, s: int) -> float:
    """Squared tensor norm of the weight-s symmetric state, exact for every N.

    Across a k|N-k cut the state has Schmidt weights C(k,j) C(N-k,s-j) / C(N,s),
    so every reduced purity is a binomial sum and the purity expansion of
    the norm collapses to a double sum.
    """
    _check_excitations(n, s)
    total = comb(n, s)
    norm_sq = 0
    for k in range(n + 1):
        purity = sum((comb(k, j) * comb(n - k, s - j)) ** 2 for j in range(max(0, s - n + k), min(k, s) + 1))
        norm_sq += (-1) ** (n - k) * 2**k * comb(n, k) * purity
    return norm_sq / total**2


def heisenberg_elementwise_norm_sq(n: int, s: int) -> float:
    """Element-by-element sum over flipped positions for even N.

    Matches the exact value when s is far from N/2 and undercounts near it,
    e.g. (N, s) = (10, 5) gives 356.65 against the exact 363.
    """
    if n % 2:
        raise DimensionError("the element-wise sum is defined for even N only")
    _check_excitations(n, s)

    def c(a: int, b: int) -> int:
        return comb(a, b) if 0 <= b <= a else 0

    total = 0
    for x in range(0, n + 1, 2):
        for y in range(0, n - x + 1, 2):
            flipped = x + y
            if flipped < 2 or flipped > 2 * s:
                continue
            half = flipped // 2
            element = (2 * c(x, x // 2) * c(y, y // 2) - c(flipped, half)) * c(n - flipped, s - half)
            total += element**2 * comb(n, x) * comb(n - x, y)
    return 1.0 + total / comb(n, s) ** 2


def heisenberg_et(n: int, s: int, method: str = "auto") -> float:
    """E_T of the Heisenberg eigenstate.

    ``method``: "auto" and "closed" use the exact binomial form, "direct" builds
    the state, "elementwise" uses the even-N element sum.
    """
    if method in ("auto", "closed"):
        return float(np.sqrt(heisenberg_norm_sq(n, s)) - 1.0)
    if method == "elementwise":
        return float(np.sqrt(heisenberg_elementwise_norm_sq(n, s)) - 1.0)
    if method == "direct":
        return e_t(heisenberg_state(n, s)).e_t
    raise ValueError(f"unknown method '{method}'")


def two_qubit_norm_sq(psi) -> float:
    """1 + 8|a1 a4 - a2 a3|^2 for a1|00> + a2|01> + a3|10> + a4|11>."""
    a = validate_pure(psi)
    if a.size != 4:
        raise DimensionError("two-qubit identity needs a 4-component state")
    return float(1.0 + 8.0 * abs(a[0] * a[3] - a[1] * a[2]) ** 2)


def schmidt_form_bound(lambdas) -> float:
    """Lower bound on the squared tensor norm of a three-qubit state in Schmidt form."""
    l0, l1, l2, l3, l4 = (float(x) for x in lambdas)
    return (
        1.0
        + 12.0 * l0**2 * l4**2
        + 8.0 * l0**2 * l2**2
        + 8.0 * l0**2 * l3**2
        + 8.0 * (l1 * l4 - l2 * l3) ** 2
    )


def traced_tensor_norm(psi, k: int, dims: Sequence[int] | None = None) -> float:
    """Norm of the (N-1)-fold tensor of the state with qubit ``k`` traced out."""
    v = validate_pure(psi)
    dims = _qubit_dims(v.size, dims)
    if not 1 <= k <= len(dims) or len(dims) < 2:
        raise DimensionError(f"cannot trace qubit {k} out of {len(dims)}")
    keep = [j for j in range(1, len(dims) + 1) if j != k]
    reduced = partial_trace(as_density(v), dims, keep)
    return _state_tensor_norm(reduced, tuple(dims[j - 1] for j in keep))


def povm_outcomes(
    psi,
    k: int,
    alpha: float,
    beta: float,
    u1: np.ndarray | None = None,
    u2: np.ndarray | None = None,
    v: np.ndarray | None = None,
    dims: Sequence[int] | None = None,
) -> list[tuple[float, np.ndarray]]:
    """Two-outcome measurement A1 = U1 diag(a, b) V, A2 = U2 diag(sqrt(1-a^2), sqrt(1-b^2)) V on qubit ``k``.

    Returns (probability, normalized post-measurement state) per outcome;
    outcomes with zero probability are dropped.
    """
    state = validate_pure(psi)
    dims = _qubit_dims(state.size, dims)
    for name, value in (("alpha", alpha), ("beta", beta)):
        check_probability(value, name)
    eye = np.eye(2, dtype=complex)
    u1 = eye if u1 is None else np.asarray(u1, dtype=complex)
    u2 = eye if u2 is None else np.asarray(u2, dtype=complex)
    v = eye if v is None else np.asarray(v, dtype=complex)
    kraus = [
        u1 @ np.diag([alpha, beta]) @ v,
        u2 @ np.diag([np.sqrt(1.0 - alpha**2), np.sqrt(1.0 - beta**2)]) @ v,
    ]
    out = []
    for a in kraus:
        phi = embed_operator(a, dims, [k]) @ state
        prob = float(np.vdot(phi, phi).real)
        if prob > 1e-14:
            out.append((prob, phi / np.sqrt(prob)))
    return out


def decomposition_upper_bound(weights: Sequence[float], states: Sequence) -> float:
    """sum_i p_i E_T(psi_i) for an explicit pure-state decomposition; bounds the convex roof from above."""
    w = np.asarray(weights, dtype=float)
    if len(w) != len(states) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidStateError("decomposition weights must be nonnegative and sum to one")
    return float(sum(p * e_t(s).e_t for p, s in zip(w, states)))
