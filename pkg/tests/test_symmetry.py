import math

import numpy as np
import pytest

from qcomplex.core import (
    OperatorMatrix,
    StateVector,
    apply,
    basis_state,
    build_tavis_cummings,
    evolution_operator,
    ghz_state,
    hadamard,
)
from qcomplex.errors import DisconnectedSeedError, FixtureError, NotConnectedError
from qcomplex.symmetry import (
    build_connected_state,
    column_cross_norms,
    commutant,
    is_connected,
    is_equilibrium,
    lemma_column_permutation_check,
)
from qcomplex.utils.fixtures import random_connected_fixture, random_symmetric_hamiltonian

LEMMA_TIMES = (0.3, 0.7, 1.5)


def test_column_cross_norms_of_h4(h4):
    np.testing.assert_array_equal(column_cross_norms(h4), [2, 2, 2, 2])


def test_every_state_is_equilibrium_for_h4(h4):
    psi = StateVector.from_amplitudes([0.5, -0.5, 0.5j, 0.5])
    assert is_equilibrium(psi, h4)


def test_single_support_state_is_equilibrium():
    A = OperatorMatrix.from_entries(np.diag([1.0, 5.0, 2.0, 0.5]))
    assert is_equilibrium(basis_state(2, 2), A)
    assert not is_equilibrium(StateVector.from_amplitudes([0.6, 0.8, 0, 0]), A)


def _ring(potential, hopping=1.0):
    size = len(potential)
    entries = np.diag(np.asarray(potential, dtype=float))
    for j in range(size):
        entries[j, (j + 1) % size] = entries[(j + 1) % size, j] = hopping
    return OperatorMatrix.from_entries(entries)


def test_ring_equilibrium_iff_equal_potential():
    psi = StateVector.from_amplitudes(np.full(5, 1 / math.sqrt(5)))
    assert psi.n_qubits == 0
    assert is_equilibrium(psi, _ring([0.4] * 5))
    assert not is_equilibrium(psi, _ring([0.4, 0.4, 0.9, 0.4, 0.4]))


def test_commutant_of_hq_is_swap_group(hq):
    group = commutant(hq)
    assert group.order == 2
    assert (1, 0) in group
    assert group.is_group()
    assert group.orbit(1) == (1, 2)
    assert group.mapping(1, 2) == (1, 0)


def test_commutant_of_symmetric_hamiltonian_contains_family():
    H = random_symmetric_hamiltonian(3, 5, "full")
    group = commutant(H)
    assert group.order == 6
    assert group.is_group()


def test_connected_state_passes_lemma(hq):
    psi = build_connected_state(hq, seed_basis_index=1)
    np.testing.assert_allclose(psi.amps, [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0])
    report = is_connected(psi, hq)
    assert report.connected and report.h_psi_nonzero
    assert lemma_column_permutation_check(psi, hq, hq).ok
    assert lemma_column_permutation_check(psi, evolution_operator(hq, 0.7), hq).ok


def test_ghz_is_not_connected_for_hq(hq):
    report = is_connected(ghz_state(2), hq)
    assert not report.connected
    assert report.missing_pair == (0, 3)
    with pytest.raises(NotConnectedError):
        lemma_column_permutation_check(ghz_state(2), hq, hq)


def test_singlet_pattern_builds_singlet(hq):
    psi = build_connected_state(hq, seed_basis_index=1, amplitude_pattern=[1, -1])
    np.testing.assert_allclose(psi.amps, [0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0])
    report = is_connected(psi, hq)
    assert not report.h_psi_nonzero
    assert not report.connected


def test_fixed_point_seed_gives_basis_state(hq):
    np.testing.assert_allclose(build_connected_state(hq, seed_basis_index=0).amps, [1, 0, 0, 0])


def test_annihilated_fixed_point_is_rejected():
    number = OperatorMatrix.from_entries(np.diag([0.0, 1.0, 1.0, 2.0]))
    with pytest.raises(DisconnectedSeedError):
        build_connected_state(number, seed_basis_index=0)


def test_pattern_must_match_orbit(hq):
    with pytest.raises(FixtureError):
        build_connected_state(hq, seed_basis_index=1, amplitude_pattern=[1])
    with pytest.raises(FixtureError):
        build_connected_state(hq, seed_basis_index=1, amplitude_pattern=[1, 0.5])


def test_lemma_on_generated_connected_fixtures():
    rng = np.random.default_rng(2024)
    families = ("full", "cyclic", "swap")
    for k in range(50):
        n = 2 + k % 3
        H, psi = random_connected_fixture(n, rng, families[k % 3])
        group = commutant(H, n)
        assert is_connected(psi, H, group=group).connected
        assert lemma_column_permutation_check(psi, H, H, group=group).ok
        assert is_equilibrium(psi, H)
        for t in LEMMA_TIMES:
            U = evolution_operator(H, t)
            report = lemma_column_permutation_check(psi, U, H, group=group)
            assert report.ok, (k, t, report.failing_pair)
            assert report.max_deviation <= 1e-9
            assert is_equilibrium(psi, U)


# ==========================================
# TAVIS-CUMMINGS
# ==========================================
def _atoms(amplitudes):
    """Photon-vacuum state over two atoms; keys are atom bit strings."""
    amps = np.zeros(8, dtype=np.complex128)
    for bits, value in amplitudes.items():
        amps[int(bits, 2)] = value
    return StateVector.from_amplitudes(amps / np.linalg.norm(amps))


def test_symmetric_atom_state_is_equilibrium_for_equal_couplings():
    H = build_tavis_cummings(2, 1, 1.0, [0.4, 0.4])
    psi = _atoms({"01": 1.0, "10": 1.0})
    assert is_equilibrium(psi, H)
    assert is_connected(psi, H).connected


def test_mixed_atom_state_is_not_connected():
    H = build_tavis_cummings(2, 1, 1.0, [0.4, 0.4])
    psi = _atoms({"10": 0.5, "01": 0.4, "00": 0.6, "11": 0.3})
    report = is_connected(psi, H)
    assert not report.connected
    assert report.missing_pair is not None


def test_three_atoms_with_equal_couplings_have_full_atom_symmetry():
    group = commutant(build_tavis_cummings(3, 1, 1.0, [0.2, 0.2, 0.2]))
    assert group.order == 6
    assert group.is_group()


def test_equilibrium_depends_on_basis():
    A = OperatorMatrix.from_entries(np.ones((2, 2)))
    psi = StateVector.from_amplitudes([0.6, 0.8])
    assert is_equilibrium(psi, A)
    rotated = OperatorMatrix.from_entries(hadamard().entries @ A.entries @ hadamard().entries)
    assert not is_equilibrium(apply(hadamard(), psi), rotated)
