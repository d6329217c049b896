"""Tests for coherence vectors, correlation tensors and Bloch reconstruction."""

import numpy as np
import pytest

from entangle.features.bloch import (
    bloch_vector,
    correlation_tensor,
    full_bloch,
    full_tensor,
    is_product_pure,
    purity_identity,
    reconstruct,
    require_qubits,
    tensor_element_observable,
)
from entangle.features.numcore import (
    density_from_vector,
    kron_all,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
)
from entangle.features.states import bell_state, ghz_state, smolin_bloch_form, smolin_state, w_state
from entangle.features.tensor import euclidean_norm
from entangle.models.errors import DimensionError, InvalidStateError


def test_basis_state_points_up():
    """|0> has coherence vector (0, 0, 1)."""
    np.testing.assert_allclose(bloch_vector(np.array([1, 0]), [2], 1), [0, 0, 1], atol=1e-12)


def test_plus_state_points_along_x():
    """|+> has coherence vector (1, 0, 0)."""
    plus = np.array([1, 1]) / np.sqrt(2)
    np.testing.assert_allclose(bloch_vector(plus, [2], 1), [1, 0, 0], atol=1e-12)


def test_bell_state_tensor():
    """phi+ has no local Bloch vectors and T = diag(1, -1, 1)."""
    b = full_bloch(bell_state(0), [2, 2])
    np.testing.assert_allclose(b.coherence[1], 0, atol=1e-12)
    np.testing.assert_allclose(b.coherence[2], 0, atol=1e-12)
    np.testing.assert_allclose(b.full_tensor(), np.diag([1.0, -1.0, 1.0]), atol=1e-12)


def test_smolin_state_has_only_four_way_correlations():
    """The Smolin state carries only T_xxxx = T_yyyy = T_zzzz = 1."""
    rho = smolin_state()
    np.testing.assert_allclose(rho, smolin_bloch_form(), atol=1e-12)
    b = full_bloch(rho, [2] * 4)
    for s in b.coherence.values():
        np.testing.assert_allclose(s, 0, atol=1e-12)
    for subset, t in b.tensors.items():
        if len(subset) < 4:
            np.testing.assert_allclose(t, 0, atol=1e-12)
    expected = np.zeros((3, 3, 3, 3))
    for a in range(3):
        expected[a, a, a, a] = 1.0
    np.testing.assert_allclose(b.full_tensor(), expected, atol=1e-12)


def test_ghz_tensor_entries():
    """GHZ_3 has T_xxx = 1, T_xyy = T_yxy = T_yyx = -1 and nothing else."""
    t = full_tensor(density_from_vector(ghz_state(3)), [2, 2, 2])
    expected = np.zeros((3, 3, 3))
    expected[0, 0, 0] = 1.0
    expected[0, 1, 1] = expected[1, 0, 1] = expected[1, 1, 0] = -1.0
    np.testing.assert_allclose(t, expected, atol=1e-12)


def test_w_tensor_entries():
    """W_3 has T_zzz = -1 and 2/3 on every xxz and yyz permutation."""
    t = full_tensor(density_from_vector(w_state(3)), [2, 2, 2])
    np.testing.assert_allclose(t[2, 2, 2], -1.0, atol=1e-12)
    for a in (0, 1):
        np.testing.assert_allclose(t[a, a, 2], 2 / 3, atol=1e-12)
        np.testing.assert_allclose(t[a, 2, a], 2 / 3, atol=1e-12)
        np.testing.assert_allclose(t[2, a, a], 2 / 3, atol=1e-12)
    np.testing.assert_allclose(euclidean_norm(t) ** 2, 11 / 3, atol=1e-12)


def test_tensor_norm_local_unitary_invariance(rng):
    """Local unitaries rotate the tensor without changing its norm."""
    psi = random_pure_state(8, rng)
    u = random_local_unitary([2, 2, 2], rng)
    before = euclidean_norm(full_tensor(density_from_vector(psi), [2, 2, 2]))
    after = euclidean_norm(full_tensor(density_from_vector(u @ psi), [2, 2, 2]))
    np.testing.assert_allclose(before, after, atol=1e-10)


def test_tensor_of_product_is_outer_product(rng):
    """The full tensor of a product state is the outer product of the factor tensors."""
    a = random_pure_state(4, rng)
    b = random_pure_state(2, rng)
    t_a = full_tensor(density_from_vector(a), [2, 2])
    s_b = bloch_vector(b, [2], 1)
    t = full_tensor(density_from_vector(np.kron(a, b)), [2, 2, 2])
    np.testing.assert_allclose(t, np.multiply.outer(t_a, s_b), atol=1e-10)


def test_subset_tensor_of_mixed_dims(rng):
    """Correlation tensors of a qubit-qutrit state have shape (3, 8)."""
    rho = random_density_matrix(6, rng)
    assert correlation_tensor(rho, [2, 3], [1, 2]).shape == (3, 8)


def test_correlation_tensor_needs_two_subsystems(rng):
    """Single subsystems are described by coherence vectors, not tensors."""
    with pytest.raises(DimensionError):
        correlation_tensor(random_density_matrix(4, rng), [2, 2], [1])


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [2, 2, 2], [3, 3]])
def test_reconstruct_round_trip(rng, dims):
    """Expanding a state into Bloch form and summing the terms gives the state back."""
    rho = random_density_matrix(int(np.prod(dims)), rng)
    np.testing.assert_allclose(reconstruct(full_bloch(rho, dims)), rho, atol=1e-10)


def test_purity_identity(rng):
    """2^N Tr(rho^2) equals one plus the squared norms of all Bloch components."""
    assert purity_identity(random_density_matrix(8, rng), [2, 2, 2]) < 1e-10
    assert purity_identity(density_from_vector(random_pure_state(16, rng)), [2] * 4) < 1e-10


def test_purity_identity_requires_qubits(rng):
    """The identity is only stated for qubits."""
    with pytest.raises(DimensionError):
        purity_identity(random_density_matrix(6, rng), [2, 3])


def test_tensor_element_observable(rng):
    """Expectation values of generator products reproduce qubit tensor entries."""
    rho = random_density_matrix(8, rng)
    t = full_tensor(rho, [2, 2, 2])
    op = tensor_element_observable([2, 2, 2], [1, 2, 3], [1, 3, 2])
    np.testing.assert_allclose(np.trace(rho @ op).real, t[0, 2, 1], atol=1e-12)


def test_product_detection():
    """Products are recognized for any factor dimensions; GHZ and Bell are not products."""
    plus = np.array([1, 1]) / np.sqrt(2)
    assert is_product_pure(np.kron(plus, bell_state(0)), [2, 4])
    assert not is_product_pure(np.kron(plus, bell_state(0)), [2, 2, 2])
    assert not is_product_pure(ghz_state(3), [2, 2, 2])


def test_random_product_is_product(rng):
    """A random product of three local states passes the product test."""
    psi = kron_all([random_pure_state(d, rng).reshape(-1, 1) for d in (2, 3, 2)]).reshape(-1)
    assert is_product_pure(psi, [2, 3, 2])


def test_require_qubits():
    """Qutrit dimensions are refused by qubit-only operations."""
    assert require_qubits([2, 2]) == (2, 2)
    with pytest.raises(InvalidStateError):
        require_qubits([2, 3])
