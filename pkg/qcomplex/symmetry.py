"""
Equilibrium states, the qubit-permutation commutant G_H, connected states and
the column-permutation lemma.

A state is connected w.r.t. H when every pair of its support indices is related by a
qubit permutation commuting with H, and H|psi> != 0. For such states the support
columns of H (and of U_t = exp(-iHt)) are permutations of each other, which makes
the state equilibrium: all support columns share one cross-norm.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import config
from .core import OperatorMatrix, StateVector, apply, qubit_permutation_indices
from .errors import (
    DimensionMismatchError,
    DisconnectedSeedError,
    FixtureError,
    NotConnectedError,
    NotQubitStructuredError,
    SearchTooLargeError,
)

MAX_COMMUTANT_QUBITS = 8
AMPLITUDE_TYPES = (1, -1, 1j, -1j)


# ==========================================
# RESULT TYPES
# ==========================================
@dataclass(frozen=True)
class CommutantGroup:
    """Explicit list of qubit permutations eta with [H, P_eta] = 0."""

    members: tuple
    n: int
    _basis: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        basis = {eta: qubit_permutation_indices(eta, self.n) for eta in self.members}
        object.__setattr__(self, "_basis", basis)

    @property
    def order(self):
        return len(self.members)

    def basis_permutation(self, eta):
        return self._basis[tuple(eta)]

    def mapping(self, i, j):
        """First member (lexicographically) sending basis index i to j, or None."""
        for eta in self.members:
            if self._basis[eta][i] == j:
                return eta
        return None

    def orbit(self, j):
        return tuple(sorted({int(self._basis[eta][j]) for eta in self.members}))

    def is_group(self):
        """Closure under composition and inverses."""
        present = set(self.members)
        identity = tuple(range(self.n))
        if identity not in present:
            return False
        for a in self.members:
            inverse = tuple(int(x) for x in np.argsort(a))
            if inverse not in present:
                return False
            for b in self.members:
                # bit k goes to b[k], then to a[b[k]]
                if tuple(a[b[k]] for k in range(self.n)) not in present:
                    return False
        return True

    def __contains__(self, eta):
        return tuple(eta) in self._basis


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    support: tuple
    witness: dict
    h_psi_nonzero: bool
    group_order: int
    missing_pair: tuple = None

    def to_dict(self):
        return {
            "connected": self.connected,
            "support": list(self.support),
            "h_psi_nonzero": self.h_psi_nonzero,
            "group_order": self.group_order,
            "missing_pair": list(self.missing_pair) if self.missing_pair else None,
        }


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    witnesses: dict
    failing_pair: tuple = None
    max_deviation: float = 0.0


# ==========================================
# EQUILIBRIUM
# ==========================================
def column_cross_norms(A: OperatorMatrix) -> np.ndarray:
    """({A|0>}, ..., {A|dim-1>})."""
    entries = A.entries
    return np.sum(np.abs(entries.real), axis=0) + np.sum(np.abs(entries.imag), axis=0)


def is_equilibrium(psi: StateVector, A: OperatorMatrix, tol=None, support_eps=None) -> bool:
    """True when all support columns of A have the same cross-norm. Basis-dependent."""
    if psi.dim != A.dim:
        raise DimensionMismatchError("State and operator dimensions differ", state_dim=psi.dim, operator_dim=A.dim)
    tol = config.tolerance() if tol is None else tol
    support = psi.support(support_eps)
    if support.size <= 1:
        return True
    norms = column_cross_norms(A)[support]
    return float(np.ptp(norms)) <= tol


# ==========================================
# COMMUTANT
# ==========================================
def commutant(H: OperatorMatrix, n=None, tol=None) -> CommutantGroup:
    n = H.n_qubits if n is None else n
    if not n or H.dim != 2 ** n:
        raise NotQubitStructuredError(f"Commutant needs an n-qubit operator, got dim {H.dim}", dim=H.dim)
    if n > MAX_COMMUTANT_QUBITS:
        raise SearchTooLargeError(f"Commutant enumeration supports n <= {MAX_COMMUTANT_QUBITS}", n=n)
    tol = config.tolerance() if tol is None else tol
    entries = H.entries
    members = []
    for eta in itertools.permutations(range(n)):
        p = qubit_permutation_indices(eta, n)
        # [H, P] = 0  <=>  H[p(a), p(b)] == H[a, b]
        if np.max(np.abs(entries[np.ix_(p, p)] - entries)) <= tol:
            members.append(tuple(eta))
    logging.debug(f"Commutant of {n}-qubit operator has order {len(members)}")
    return CommutantGroup(tuple(members), n)


# ==========================================
# CONNECTIVITY
# ==========================================
def is_connected(psi: StateVector, H: OperatorMatrix, tol=None, group=None) -> ConnectivityReport:
    tol = config.tolerance() if tol is None else tol
    group = commutant(H, tol=tol) if group is None else group
    support = tuple(int(j) for j in psi.support())
    witness = {}
    missing = None
    for i in support:
        for j in support:
            eta = group.mapping(i, j)
            if eta is None:
                missing = (i, j)
                break
            witness[(i, j)] = eta
        if missing:
            break
    h_psi_nonzero = apply(H, psi).norm() > tol
    connected = missing is None and h_psi_nonzero and bool(support)
    return ConnectivityReport(connected, support, witness, h_psi_nonzero, group.order, missing)


def lemma_column_permutation_check(psi: StateVector, M: OperatorMatrix, H: OperatorMatrix, tol=None, group=None):
    """
    Check that support columns of M (H itself or U_t) are reorderings of each other.

    For each ordered support pair (j1, j2) the connecting tau gives the reordering:
    M[tau(a), j2] == M[a, j1]. Refuses states that are not connected w.r.t. H.
    """
    tol = config.tolerance() if tol is None else tol
    group = commutant(H, tol=tol) if group is None else group
    report = is_connected(psi, H, tol, group)
    if not report.connected:
        raise NotConnectedError(
            "Lemma check needs a state connected w.r.t. H",
            missing_pair=list(report.missing_pair) if report.missing_pair else None,
            h_psi_nonzero=report.h_psi_nonzero,
        )
    entries = M.entries
    witnesses = {}
    worst = 0.0
    for (j1, j2), eta in report.witness.items():
        p = group.basis_permutation(eta)
        deviation = float(np.max(np.abs(entries[p, j2] - entries[:, j1])))
        worst = max(worst, deviation)
        if deviation > tol:
            logging.warning(f"Columns {j1} and {j2} are not permutation-equivalent (deviation {deviation:.3e})")
            return LemmaReport(False, witnesses, (j1, j2), deviation)
        witnesses[(j1, j2)] = tuple(int(x) for x in p)
    return LemmaReport(True, witnesses, None, worst)


def build_connected_state(H: OperatorMatrix, n=None, seed_basis_index=0, amplitude_pattern=None, tol=None,
                          group=None) -> StateVector:
    """Equal-modulus state on the commutant orbit of the seed, phases taken from {+1, -1, +i, -i}."""
    n = H.n_qubits if n is None else n
    tol = config.tolerance() if tol is None else tol
    group = commutant(H, n, tol) if group is None else group
    orbit = group.orbit(seed_basis_index)
    pattern = [1] * len(orbit) if amplitude_pattern is None else list(amplitude_pattern)
    if len(pattern) != len(orbit):
        raise FixtureError(
            f"Pattern has {len(pattern)} phases but the orbit of {seed_basis_index} has {len(orbit)} states",
            orbit=list(orbit),
        )
    if any(complex(p) not in AMPLITUDE_TYPES for p in pattern):
        raise FixtureError("Pattern phases must be +1, -1, +i or -i", pattern=[str(p) for p in pattern])
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[list(orbit)] = np.array(pattern, dtype=np.complex128) / np.sqrt(len(orbit))
    psi = StateVector(amps, n)
    # a larger annihilated orbit (e.g. the singlet) is still returned; is_connected reports it
    if len(orbit) == 1 and apply(H, psi).norm() <= tol:
        raise DisconnectedSeedError(f"H annihilates the fixed basis state {seed_basis_index}", orbit=list(orbit))
    return psi


if __name__ == "__main__":
    from .core import evolution_operator, paper_hq

    H = paper_hq()
    psi = build_connected_state(H, seed_basis_index=1)
    print("orbit state:", psi.amps.real)
    print("connected:", is_connected(psi, H).connected)
    print("lemma on U_0.7:", lemma_column_permutation_check(psi, evolution_operator(H, 0.7), H).ok)
