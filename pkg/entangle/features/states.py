"""Named pure states and mixtures used by the criteria, measures and experiments."""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from entangle.config.constants import MIXED_DIM_DIMS, MIXED_DIM_SUPPORT
from entangle.features.numcore import PAULI_X, PAULI_Y, PAULI_Z, check_dims, density_from_vector, kron_all
from entangle.models.errors import DimensionError


def check_probability(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DimensionError(f"{name} must lie in [0, 1], got {p}")
    return p


def basis_state(bits, dims=None) -> np.ndarray:
    """|b_1 ... b_N> with 0-based digits; ``bits`` may be a string such as ``"010"``."""
    digits = [int(b) for b in bits]
    dims = check_dims(dims if dims is not None else [2] * len(digits))
    if len(digits) != len(dims) or any(not 0 <= b < d for b, d in zip(digits, dims)):
        raise DimensionError(f"basis label {bits} does not fit dims {list(dims)}")
    v = np.zeros(int(np.prod(dims)), dtype=complex)
    v[np.ravel_multi_index(digits, dims)] = 1.0
    return v


def ghz_state(n: int, d: int = 2) -> np.ndarray:
    if n < 1 or d < 2:
        raise DimensionError(f"GHZ state needs n >= 1 and d >= 2, got n={n}, d={d}")
    v = np.zeros(d**n, dtype=complex)
    for k in range(d):
        v[np.ravel_multi_index([k] * n, [d] * n)] = 1.0
    return v / np.sqrt(d)


def ghz_family_state(p: float, n: int) -> np.ndarray:
    """sqrt(p)|0...0> + sqrt(1 - p)|1...1>."""
    p = check_probability(p)
    if n < 2:
        raise DimensionError("GHZ family needs at least two qubits")
    v = np.zeros(2**n, dtype=complex)
    v[0] = np.sqrt(p)
    v[-1] = np.sqrt(1.0 - p)
    return v


def _weight_superposition(n: int, ones: int) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    for positions in combinations(range(n), ones):
        bits = [0] * n
        for k in positions:
            bits[k] = 1
        v[np.ravel_multi_index(bits, [2] * n)] = 1.0
    return v / np.sqrt(comb(n, ones))


def w_state(n: int) -> np.ndarray:
    if n < 1:
        raise DimensionError("W state needs at least one qubit")
    return _weight_superposition(n, 1)


def w_tilde_state(n: int) -> np.ndarray:
    """Bit-flipped W state: a single 0 in every term."""
    if n < 1:
        raise DimensionError("W state needs at least one qubit")
    return _weight_superposition(n, n - 1)


def heisenberg_state(n: int, s: int) -> np.ndarray:
    """Uniform superposition of the weight-s bit strings of length n."""
    if not 0 <= s <= n:
        raise DimensionError(f"excitation number must lie in 0..{n}, got {s}")
    return _weight_superposition(n, s)


def bell_state(which: int = 0) -> np.ndarray:
    """Bell basis in the order phi+, phi-, psi+, psi-."""
    table = {
        0: [1, 0, 0, 1],
        1: [1, 0, 0, -1],
        2: [0, 1, 1, 0],
        3: [0, 1, -1, 0],
    }
    if which not in table:
        raise DimensionError(f"Bell state index must be 0..3, got {which}")
    return np.array(table[which], dtype=complex) / np.sqrt(2.0)


def wghz_superposition(s: float, phi: float = 0.0) -> np.ndarray:
    """sqrt(s)|GHZ_3> + sqrt(1 - s) e^{i phi} |W_3>."""
    s = check_probability(s, "s")
    return np.sqrt(s) * ghz_state(3) + np.sqrt(1.0 - s) * np.exp(1j * phi) * w_state(3)


def w_superposition(s: float, phi: float = 0.0, n: int = 3) -> np.ndarray:
    """sqrt(s)|W> + sqrt(1 - s) e^{i phi} |W~>, renormalized (the two overlap for n = 2)."""
    s = check_probability(s, "s")
    v = np.sqrt(s) * w_state(n) + np.sqrt(1.0 - s) * np.exp(1j * phi) * w_tilde_state(n)
    return v / np.linalg.norm(v)


def schmidt_form_state(lambdas, phi: float = 0.0) -> np.ndarray:
    """Three-qubit state l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>."""
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (5,) or np.any(lam < 0):
        raise DimensionError("five nonnegative Schmidt coefficients are required")
    v = np.zeros(8, dtype=complex)
    v[0b000] = lam[0]
    v[0b100] = lam[1] * np.exp(1j * phi)
    v[0b101] = lam[2]
    v[0b110] = lam[3]
    v[0b111] = lam[4]
    return v / np.linalg.norm(v)


def mixed_dim_state() -> np.ndarray:
    """(|112> + |123> + |214> + |234>) / 2 on C^2 x C^3 x C^4, labels 1-based."""
    v = np.zeros(int(np.prod(MIXED_DIM_DIMS)), dtype=complex)
    for label in MIXED_DIM_SUPPORT:
        v[np.ravel_multi_index([k - 1 for k in label], MIXED_DIM_DIMS)] = 1.0
    return v / 2.0


def noisy_state(psi, p: float, dims=None) -> np.ndarray:
    """(1 - p) I / D + p |psi><psi|."""
    p = check_probability(p)
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if dims is not None:
        check_dims(dims, v.size)
    return (1.0 - p) * np.eye(v.size, dtype=complex) / v.size + p * density_from_vector(v)


def reduced_w_noisy(n_total: int, n_traced: int, p: float) -> np.ndarray:
    """Noisy W_N with ``n_traced`` qubits traced out, written in closed form on the remaining qubits."""
    p = check_probability(p)
    if not 1 <= n_traced < n_total:
        raise DimensionError(f"traced qubit count must lie in 1..{n_total - 1}, got {n_traced}")
    m = n_total - n_traced
    zero = basis_state("0" * m)
    return (
        (1.0 - p) * np.eye(2**m, dtype=complex) / 2**m
        + (n_traced / n_total) * p * density_from_vector(zero)
        + ((n_total - n_traced) / n_total) * p * density_from_vector(w_state(m))
    )


def smolin_state() -> np.ndarray:
    """Equal mixture of the four Bell pairs on AB and CD."""
    rho = np.zeros((16, 16), dtype=complex)
    for k in range(4):
        bell = density_from_vector(bell_state(k))
        rho += np.kron(bell, bell)
    return rho / 4.0


def smolin_bloch_form() -> np.ndarray:
    """(I + sum_k sigma_k^{x4}) / 16."""
    rho = np.eye(16, dtype=complex)
    for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
        rho += kron_all([pauli] * 4)
    return rho / 16.0


def dur_state(n: int = 4) -> np.ndarray:
    """(|GHZ><GHZ| + 1/2 sum_i (P_i + P~_i)) / (n + 1); P_i projects on the string with a single 1 at party i."""
    if n < 2:
        raise DimensionError("the bound entangled family needs at least two parties")
    rho = density_from_vector(ghz_state(n))
    for i in range(n):
        bits = ["0"] * n
        bits[i] = "1"
        flipped = ["1" if b == "0" else "0" for b in bits]
        rho += 0.5 * (density_from_vector(basis_state(bits)) + density_from_vector(basis_state(flipped)))
    return rho / (n + 1)


def povm_example_state() -> np.ndarray:
    """Four-qubit state (|0000> + |0011> + |0101> + |0110> + |1010> + |1111>) / sqrt(6)."""
    v = sum(basis_state(bits) for bits in ("0000", "0011", "0101", "0110", "1010", "1111"))
    return v / np.sqrt(6.0)
