"""Tests for the numerical core: Kronecker products, reductions and SU(d) generators."""

import numpy as np
import pytest

from entangle.features.numcore import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    algebra_residual,
    density_from_vector,
    hermitian_eigenvalues,
    is_psd,
    kron,
    kron_all,
    nuclear_norm,
    orthogonality_residual,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    permute_vector,
    random_density_matrix,
    random_pure_state,
    su_generators,
    validate_density,
    validate_pure,
)
from entangle.models.errors import DimensionError, InvalidStateError, NotHermitianError

BELL = np.array([1, 0, 0, 1]) / np.sqrt(2)


def test_kron_small_example():
    """The Kronecker product places scaled copies of B in the blocks of A."""
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[0, 1], [1, 0]])
    expected = np.array([[0, 1, 0, 2], [1, 0, 2, 0], [0, 3, 0, 4], [3, 0, 4, 0]])
    np.testing.assert_allclose(kron(a, b), expected)


def test_kron_all_matches_nested_kron():
    """A chained product equals nested pairwise products."""
    mats = [PAULI_X, PAULI_Y, PAULI_Z]
    np.testing.assert_allclose(kron_all(mats), np.kron(np.kron(PAULI_X, PAULI_Y), PAULI_Z))


def test_partial_trace_of_product(rng):
    """Tracing out B from A x B leaves Tr(B) A."""
    a = random_density_matrix(3, rng)
    b = 2.5 * random_density_matrix(2, rng)
    reduced = partial_trace(np.kron(a, b), [3, 2], [1])
    np.testing.assert_allclose(reduced, np.trace(b) * a, atol=1e-12)
    np.testing.assert_allclose(partial_trace(np.kron(a, b), [3, 2], [2]), np.trace(a) * b, atol=1e-12)


def test_partial_trace_worked_reduction():
    """A fixed 4x4 state reduces to (1/8)[[6,-1],[-1,2]] on the first qubit."""
    rho = np.array([[9, -1, -1, 1], [-1, 3, -1, -1], [-1, -1, 3, -1], [1, -1, -1, 1]]) / 16
    expected = np.array([[6, -1], [-1, 2]]) / 8
    np.testing.assert_allclose(partial_trace(rho, [2, 2], [1]), expected, atol=1e-12)


def test_partial_trace_middle_subsystem(rng):
    """Keeping subsystems 1 and 3 of a three-part product drops the middle factor."""
    a, b, c = (random_density_matrix(d, rng) for d in (2, 3, 2))
    rho = kron_all([a, b, c])
    np.testing.assert_allclose(partial_trace(rho, [2, 3, 2], [1, 3]), np.kron(a, c), atol=1e-12)


def test_partial_trace_rejects_bad_dims():
    """Dimension vectors must multiply to the matrix side."""
    with pytest.raises(DimensionError):
        partial_trace(np.eye(4) / 4, [2, 3], [1])


def test_partial_transpose_bell_has_negative_eigenvalue():
    """The partial transpose of a Bell state has minimum eigenvalue -1/2."""
    rho = density_from_vector(BELL)
    evals = hermitian_eigenvalues(partial_transpose(rho, [2, 2], [2]))
    np.testing.assert_allclose(evals[0], -0.5, atol=1e-12)


def test_partial_transpose_empty_subset_is_identity(rng):
    """Transposing no subsystem returns the matrix unchanged."""
    rho = random_density_matrix(4, rng)
    np.testing.assert_allclose(partial_transpose(rho, [2, 2], []), rho)


def test_partial_transpose_all_is_full_transpose(rng):
    """Transposing every subsystem is the ordinary transpose."""
    rho = random_density_matrix(6, rng)
    np.testing.assert_allclose(partial_transpose(rho, [2, 3], [1, 2]), rho.T)


def test_permute_subsystems_swaps_factors(rng):
    """Swapping the two factors of A x B gives B x A."""
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    np.testing.assert_allclose(permute_subsystems(np.kron(a, b), [2, 3], [2, 1]), np.kron(b, a), atol=1e-12)


def test_permute_vector_rejects_non_permutation():
    """Orders must be permutations of 1..N."""
    with pytest.raises(DimensionError):
        permute_vector(np.ones(4) / 2, [2, 2], [1, 1])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_generators_are_orthogonal_and_traceless(d):
    """Generators are Hermitian, traceless and satisfy Tr(l_i l_j) = 2 delta_ij."""
    basis = su_generators(d)
    assert len(basis) == d * d - 1
    for lam in basis.generators:
        np.testing.assert_allclose(lam, lam.conj().T)
        np.testing.assert_allclose(np.trace(lam), 0, atol=1e-12)
    assert orthogonality_residual(basis) < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_generator_product_expansion(d):
    """Products of generators expand through the f and g structure constants."""
    assert algebra_residual(su_generators(d)) < 1e-10


def test_qubit_structure_constants():
    """For qubits f is the Levi-Civita symbol and g vanishes."""
    basis = su_generators(2)
    f, g = basis.f_tensor, basis.g_tensor
    np.testing.assert_allclose(f[0, 1, 2], 1.0, atol=1e-12)
    np.testing.assert_allclose(f[1, 0, 2], -1.0, atol=1e-12)
    np.testing.assert_allclose(f[2, 0, 1], 1.0, atol=1e-12)
    np.testing.assert_allclose(g, 0.0, atol=1e-12)


def test_structure_constant_symmetries():
    """f is totally antisymmetric and g totally symmetric."""
    basis = su_generators(3)
    f, g = basis.f_tensor, basis.g_tensor
    np.testing.assert_allclose(f, -f.transpose(1, 0, 2), atol=1e-12)
    np.testing.assert_allclose(f, -f.transpose(0, 2, 1), atol=1e-12)
    np.testing.assert_allclose(g, g.transpose(1, 0, 2), atol=1e-12)
    np.testing.assert_allclose(g, g.transpose(0, 2, 1), atol=1e-12)


def test_generators_reject_small_dimension():
    """d = 1 has no generators."""
    with pytest.raises(DimensionError):
        su_generators(1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pure_state_coherence_vector(rng, d):
    """A pure state's coherence vector has squared norm d(d-1)/2 and s*s = (d-2)s."""
    basis = su_generators(d)
    rho = density_from_vector(random_pure_state(d, rng))
    s = 0.5 * d * np.einsum("aij,ji->a", basis.generators, rho).real
    np.testing.assert_allclose(s @ s, d * (d - 1) / 2, atol=1e-10)
    star = np.einsum("i,j,ijk->k", s, s, basis.g_tensor)
    np.testing.assert_allclose(star, (d - 2) * s, atol=1e-10)


def test_nuclear_norm_of_diagonal():
    """The trace norm sums absolute singular values."""
    np.testing.assert_allclose(nuclear_norm(np.diag([3.0, -2.0, 0.5])), 5.5)


def test_is_psd_detects_negative_eigenvalue():
    """A Hermitian matrix with a negative eigenvalue is not PSD."""
    assert is_psd(np.eye(2))
    assert not is_psd(np.diag([1.0, -0.1]))


def test_hermitian_eigenvalues_rejects_non_hermitian():
    """Non-Hermitian input is refused."""
    with pytest.raises(NotHermitianError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


def test_validate_density_errors():
    """Each failing density-matrix condition raises its own error."""
    with pytest.raises(DimensionError):
        validate_density(np.ones((2, 3)))
    with pytest.raises(NotHermitianError):
        validate_density(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(InvalidStateError):
        validate_density(np.eye(2))
    with pytest.raises(InvalidStateError):
        validate_density(np.diag([1.2, -0.2]))


def test_validate_pure_requires_unit_norm():
    """State vectors must be normalized."""
    validate_pure(BELL)
    with pytest.raises(InvalidStateError):
        validate_pure(np.array([1.0, 1.0]))


def test_random_density_matrix_is_valid(rng):
    """Random density matrices pass validation, including low rank ones."""
    validate_density(random_density_matrix(5, rng))
    rho = random_density_matrix(4, rng, rank=1)
    np.testing.assert_allclose(np.trace(rho @ rho).real, 1.0, atol=1e-10)
