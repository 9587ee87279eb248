import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qcomplex.core import (
    OperatorMatrix,
    QubitSubset,
    StateVector,
    apply,
    basis_state,
    build_tavis_cummings,
    cnot,
    cnot_indices,
    conjugate,
    cross_norm,
    evolution_operator,
    identity,
    inverse_permutation,
    pauli_x,
    permutation_operator,
    permute_state,
    product_state,
    qubit_permutation_indices,
    qubit_permutation_operator,
    state_cross_norm,
)
from qcomplex.errors import DimensionMismatchError, InvalidSubsetError, NotAPermutationError, QComplexError

DIM = 8
complex_values = st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False)


# ==========================================
# APPLY
# ==========================================
def test_apply_identity_returns_input():
    psi = StateVector.from_amplitudes([0.6, 0.0, 0.8j, 0.0])
    out = apply(identity(4), psi)
    np.testing.assert_array_equal(out.amps, psi.amps)


def test_apply_h4_on_zero_gives_first_column(h4):
    out = apply(h4, basis_state(0, 2))
    np.testing.assert_array_equal(out.amps, [0, 1, 0, 1])


def test_pauli_x_flips_bit():
    np.testing.assert_array_equal(apply(pauli_x(), basis_state(0, 1)).amps, [0, 1])


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        apply(identity(4), basis_state(0, 1))


@seed(7)
@settings(max_examples=50, deadline=None)
@given(
    matrix=arrays(np.complex128, (DIM, DIM), elements=complex_values),
    x=arrays(np.complex128, (DIM,), elements=complex_values),
    y=arrays(np.complex128, (DIM,), elements=complex_values),
    a=complex_values,
    b=complex_values,
)
def test_apply_is_linear(matrix, x, y, a, b):
    A = OperatorMatrix.from_entries(matrix)
    left = apply(A, StateVector.from_amplitudes(a * x + b * y)).amps
    right = a * apply(A, StateVector.from_amplitudes(x)).amps + b * apply(A, StateVector.from_amplitudes(y)).amps
    scale = max(1.0, float(np.max(np.abs(left))))
    assert np.max(np.abs(left - right)) <= 1e-9 * scale * DIM


# ==========================================
# CROSS-NORM
# ==========================================
@seed(11)
@given(z=complex_values, w=complex_values)
def test_cross_norm_submultiplicative_and_triangle(z, w):
    slack = 1e-9 * (1.0 + cross_norm(z) * cross_norm(w))
    assert cross_norm(z * w) <= cross_norm(z) * cross_norm(w) + slack
    assert cross_norm(z + w) <= cross_norm(z) + cross_norm(w) + slack


def test_state_cross_norm_sums_components():
    assert state_cross_norm(StateVector.from_amplitudes([0.6, -0.8j])) == pytest.approx(1.4)


# ==========================================
# PERMUTATIONS
# ==========================================
@seed(3)
@given(perm=st.integers(1, 16).flatmap(lambda d: st.permutations(list(range(d)))))
def test_permutation_operator_times_inverse_is_identity(perm):
    P = permutation_operator(perm)
    P_inv = permutation_operator(inverse_permutation(perm))
    np.testing.assert_array_equal((P @ P_inv).entries, np.eye(len(perm)))


def test_permute_state_matches_operator():
    psi = StateVector.from_amplitudes([0.5, 0.5j, -0.5, 0.5])
    perm = [2, 0, 3, 1]
    np.testing.assert_allclose(permute_state(psi, perm).amps, permutation_operator(perm).entries @ psi.amps)


def test_not_a_permutation():
    with pytest.raises(NotAPermutationError):
        permutation_operator([0, 0, 1])


def test_cnot_conjugates_hq_into_h4_exactly(h4, hq):
    assert cnot_indices(2, 0, 1).tolist() == [0, 1, 3, 2]
    np.testing.assert_array_equal(conjugate(hq, cnot_indices(2, 0, 1)).entries, h4.entries)
    product = cnot().entries @ hq.entries @ cnot().entries
    np.testing.assert_array_equal(product, h4.entries)


def test_qubit_swap_exchanges_01_and_10():
    assert qubit_permutation_indices((1, 0), 2).tolist() == [0, 2, 1, 3]
    assert qubit_permutation_operator((1, 0), 2).is_unitary()


def test_invalid_cnot_wiring():
    with pytest.raises(InvalidSubsetError):
        cnot_indices(2, 1, 1)


# ==========================================
# TYPES
# ==========================================
def test_state_rejects_nan():
    with pytest.raises(QComplexError):
        StateVector.from_amplitudes([np.nan, 1.0])


def test_state_infers_qubits_and_support():
    psi = StateVector.from_amplitudes([0, 1, 0, 0, 0, 0, 0, 0])
    assert psi.n_qubits == 3 and psi.qubit_structured
    assert psi.support().tolist() == [1]
    assert StateVector.from_amplitudes([1, 0, 0]).n_qubits == 0


def test_hermitian_flag_is_verified():
    with pytest.raises(QComplexError):
        OperatorMatrix(np.array([[0, 1], [0, 0]]), 1, hermitian=True)


def test_qubit_subset_complement():
    part = QubitSubset.from_qubits([0, 2], 3)
    assert part.qubits == (0, 2)
    assert part.complement().qubits == (1,)
    assert part.is_proper()


def test_product_state_is_kron():
    psi = product_state(basis_state(1, 1), basis_state(0, 1))
    np.testing.assert_array_equal(psi.amps, [0, 0, 1, 0])


# ==========================================
# EVOLUTION AND TAVIS-CUMMINGS
# ==========================================
def test_evolution_operator_is_unitary(hq):
    U = evolution_operator(hq, 0.7)
    assert U.is_unitary(1e-12)
    np.testing.assert_allclose(evolution_operator(hq, 0.0).entries, np.eye(4), atol=1e-12)


def test_tavis_cummings_single_atom_coupling():
    H = build_tavis_cummings(1, 1, 1.0, [0.3])
    # |n=0, m=1> is index 1, |n=1, m=0> is index 2
    assert H.entries[1, 2] == pytest.approx(0.3)
    assert H.n_qubits == 2


def test_tavis_cummings_free_hamiltonian_is_diagonal():
    H = build_tavis_cummings(2, 3, 0.5, [0.0, 0.0], hbar=2.0)
    entries = H.entries
    assert np.count_nonzero(entries - np.diag(np.diag(entries))) == 0
    for photons in range(4):
        for atoms in range(4):
            index = photons * 4 + atoms
            assert entries[index, index] == pytest.approx(2.0 * 0.5 * (photons + bin(atoms).count("1")))


def test_tavis_cummings_equal_couplings_commute_with_atom_swap():
    H = build_tavis_cummings(2, 1, 1.0, [0.4, 0.4])
    P = qubit_permutation_operator((0, 2, 1), 3).entries
    np.testing.assert_allclose(P @ H.entries, H.entries @ P, atol=1e-12)


@pytest.mark.parametrize("k,n_max", [(1, 1), (2, 3), (3, 2)])
def test_tavis_cummings_is_hermitian(k, n_max):
    H = build_tavis_cummings(k, n_max, 1.3, np.linspace(0.1, 0.5, k))
    assert H.is_hermitian(1e-12)
