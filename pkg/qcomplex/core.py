"""
Dense state/operator algebra for n-qubit registers.

Basis ordering is lexicographic over bit-strings with qubit 0 as the most
significant bit, so |q0 q1 ... q(n-1)> has index sum(q_k * 2^(n-1-k)). CNOT,
qubit permutations and the Tavis-Cummings builder all use this convention.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy import linalg

from . import config
from .errors import DimensionMismatchError, NotAPermutationError, InvalidSubsetError, QComplexError


def _qubits_for_dim(dim):
    """Return log2(dim) when dim is a power of two (dim >= 2), else 0."""
    if dim >= 2 and dim & (dim - 1) == 0:
        return dim.bit_length() - 1
    return 0


# ==========================================
# DOMAIN TYPES
# ==========================================
@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex amplitude vector. ``n_qubits == 0`` marks a general N-dimensional space."""

    amps: np.ndarray
    n_qubits: int = 0

    def __post_init__(self):
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size == 0:
            raise DimensionMismatchError("State vector must have positive dimension")
        if not np.all(np.isfinite(amps)):
            raise QComplexError("State vector contains NaN or Inf amplitudes")
        if self.n_qubits and amps.size != 2 ** self.n_qubits:
            raise DimensionMismatchError(
                f"State of {self.n_qubits} qubits needs {2 ** self.n_qubits} amplitudes, got {amps.size}",
                n_qubits=self.n_qubits, dim=int(amps.size),
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, n_qubits=None):
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if n_qubits is None:
            n_qubits = _qubits_for_dim(amps.size)
        return cls(amps, n_qubits)

    @property
    def dim(self):
        return int(self.amps.size)

    @property
    def qubit_structured(self):
        return self.n_qubits > 0

    def norm(self):
        return float(np.linalg.norm(self.amps))

    def is_normalized(self, tol=None):
        tol = config.tolerance() if tol is None else tol
        return abs(float(np.vdot(self.amps, self.amps).real) - 1.0) <= tol

    def normalized(self):
        norm = self.norm()
        if norm == 0.0:
            raise QComplexError("Cannot normalize the zero vector")
        return StateVector(self.amps / norm, self.n_qubits)

    def support(self, eps=None):
        """Indices j with |lambda_j| above the support threshold (the set J)."""
        eps = config.support_eps() if eps is None else eps
        return np.flatnonzero(np.abs(self.amps) > eps)

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense complex dim x dim matrix; ``hermitian``/``unitary`` flags are verified on construction."""

    entries: np.ndarray
    n_qubits: int = 0
    hermitian: bool = False
    unitary: bool = False
    tol: float = field(default=None, repr=False)

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] == 0:
            raise DimensionMismatchError(f"Operator must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise QComplexError("Operator contains NaN or Inf entries")
        if self.n_qubits and entries.shape[0] != 2 ** self.n_qubits:
            raise DimensionMismatchError(
                f"Operator on {self.n_qubits} qubits needs dim {2 ** self.n_qubits}, got {entries.shape[0]}"
            )
        tol = config.tolerance() if self.tol is None else self.tol
        if self.hermitian and not _is_hermitian(entries, tol):
            raise QComplexError("Operator flagged hermitian is not hermitian", tol=tol)
        if self.unitary and not _is_unitary(entries, tol):
            raise QComplexError("Operator flagged unitary is not unitary", tol=tol)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "tol", tol)

    @classmethod
    def from_entries(cls, entries, n_qubits=None, **flags):
        entries = np.asarray(entries, dtype=np.complex128)
        if n_qubits is None:
            n_qubits = _qubits_for_dim(entries.shape[0])
        return cls(entries, n_qubits, **flags)

    @property
    def dim(self):
        return int(self.entries.shape[0])

    @property
    def qubit_structured(self):
        return self.n_qubits > 0

    def is_hermitian(self, tol=None):
        return _is_hermitian(self.entries, config.tolerance() if tol is None else tol)

    def is_unitary(self, tol=None):
        return _is_unitary(self.entries, config.tolerance() if tol is None else tol)

    def column(self, j):
        return self.entries[:, j]

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.dim != self.dim:
                raise DimensionMismatchError("Operator dimensions differ", left=self.dim, right=other.dim)
            return OperatorMatrix(self.entries @ other.entries, self.n_qubits)
        return apply(self, other)

    def __repr__(self):
        return f"OperatorMatrix(n_qubits={self.n_qubits}, dim={self.dim})"


def _is_hermitian(entries, tol):
    return float(np.max(np.abs(entries - entries.conj().T))) <= tol


def _is_unitary(entries, tol):
    gram = entries.conj().T @ entries
    return float(np.max(np.abs(gram - np.eye(entries.shape[0])))) <= tol


@dataclass(frozen=True)
class QubitSubset:
    """Bitset over qubit positions; bit k of ``mask`` set means qubit k is in the subset."""

    mask: int
    n: int

    def __post_init__(self):
        if self.n < 1 or self.mask < 0 or self.mask >= (1 << self.n):
            raise InvalidSubsetError(f"Mask {self.mask} does not fit {self.n} qubits", mask=self.mask, n=self.n)

    @classmethod
    def from_qubits(cls, qubits, n):
        mask = 0
        for q in qubits:
            if not 0 <= q < n:
                raise InvalidSubsetError(f"Qubit {q} outside 0..{n - 1}", qubit=q, n=n)
            mask |= 1 << q
        return cls(mask, n)

    @property
    def qubits(self):
        return tuple(k for k in range(self.n) if self.mask >> k & 1)

    def complement(self):
        return QubitSubset(((1 << self.n) - 1) ^ self.mask, self.n)

    def is_proper(self):
        return 0 < self.mask < (1 << self.n) - 1

    def __len__(self):
        return bin(self.mask).count("1")


# ==========================================
# ALGEBRA
# ==========================================
def apply(A: OperatorMatrix, psi: StateVector) -> StateVector:
    """Matrix-vector product A|psi>."""
    if A.dim != psi.dim:
        raise DimensionMismatchError(
            f"Operator of dim {A.dim} cannot act on state of dim {psi.dim}", operator_dim=A.dim, state_dim=psi.dim
        )
    return StateVector(A.entries @ psi.amps, psi.n_qubits)


def cross_norm(z) -> float:
    """{z} = |Re z| + |Im z|."""
    z = complex(z)
    return abs(z.real) + abs(z.imag)


def state_cross_norm(psi) -> float:
    amps = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    return float(np.sum(np.abs(amps.real)) + np.sum(np.abs(amps.imag)))


def validate_permutation(perm, dim=None):
    perm = np.asarray(perm, dtype=np.int64).reshape(-1)
    size = perm.size if dim is None else dim
    if perm.size != size or not np.array_equal(np.sort(perm), np.arange(size)):
        raise NotAPermutationError(f"Not a bijection on 0..{size - 1}", perm=perm.tolist())
    return perm


def inverse_permutation(perm):
    perm = validate_permutation(perm)
    inverse = np.empty_like(perm)
    inverse[perm] = np.arange(perm.size)
    return inverse


def permutation_operator(perm) -> OperatorMatrix:
    """0/1 matrix P with P|j> = |perm(j)>."""
    perm = validate_permutation(perm)
    dim = perm.size
    entries = np.zeros((dim, dim), dtype=np.complex128)
    entries[perm, np.arange(dim)] = 1.0
    return OperatorMatrix(entries, _qubits_for_dim(dim), unitary=True)


def permute_state(psi: StateVector, perm) -> StateVector:
    """P_perm |psi>, without building the matrix."""
    perm = validate_permutation(perm, psi.dim)
    out = np.empty(psi.dim, dtype=np.complex128)
    out[perm] = psi.amps
    return StateVector(out, psi.n_qubits)


def conjugate(H: OperatorMatrix, perm) -> OperatorMatrix:
    """P^-1 H P for the basis permutation P|j> = |perm(j)>."""
    perm = validate_permutation(perm, H.dim)
    return OperatorMatrix(H.entries[np.ix_(perm, perm)], H.n_qubits)


def qubit_permutation_indices(eta, n):
    """Basis permutation that moves bit k of every bit-string to position eta(k)."""
    eta = validate_permutation(eta, n)
    indices = np.arange(2 ** n, dtype=np.int64)
    out = np.zeros_like(indices)
    for k in range(n):
        bit = (indices >> (n - 1 - k)) & 1
        out |= bit << (n - 1 - int(eta[k]))
    return out


def qubit_permutation_operator(eta, n) -> OperatorMatrix:
    return permutation_operator(qubit_permutation_indices(eta, n))


# ==========================================
# GATES AND STANDARD STATES
# ==========================================
def identity(dim) -> OperatorMatrix:
    return OperatorMatrix(np.eye(dim, dtype=np.complex128), _qubits_for_dim(dim), hermitian=True, unitary=True)


def pauli_x() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, 1], [1, 0]]), 1, hermitian=True, unitary=True)


def pauli_z() -> OperatorMatrix:
    return OperatorMatrix(np.array([[1, 0], [0, -1]]), 1, hermitian=True, unitary=True)


def hadamard() -> OperatorMatrix:
    return OperatorMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2.0), 1, hermitian=True, unitary=True)


def kron(*ops) -> OperatorMatrix:
    entries = reduce(np.kron, [op.entries for op in ops])
    return OperatorMatrix(entries, sum(op.n_qubits for op in ops))


def embed(op: OperatorMatrix, qubit, n) -> OperatorMatrix:
    """Single-qubit ``op`` acting on ``qubit`` of an n-qubit register."""
    factors = [op if k == qubit else identity(2) for k in range(n)]
    return kron(*factors)


def cnot_indices(n, control, target):
    """Basis permutation of CNOT(control -> target); it is its own inverse."""
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise InvalidSubsetError(f"Bad CNOT wiring {control}->{target} on {n} qubits", control=control, target=target)
    indices = np.arange(2 ** n, dtype=np.int64)
    control_bit = (indices >> (n - 1 - control)) & 1
    return indices ^ (control_bit << (n - 1 - target))


def cnot(n=2, control=0, target=1) -> OperatorMatrix:
    return permutation_operator(cnot_indices(n, control, target))


def basis_state(index, n) -> StateVector:
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, n)


def ghz_state(n) -> StateVector:
    amps = np.zeros(2 ** n, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(amps, n)


def product_state(*factors) -> StateVector:
    amps = reduce(np.kron, [f.amps for f in factors])
    return StateVector(amps, sum(f.n_qubits for f in factors))


def paper_h4() -> OperatorMatrix:
    """The 4x4 Hamiltonian that CNOT conjugates into sigma_x (x) I + I (x) sigma_x."""
    rows = [[0, 1, 0, 1], [1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 1, 0]]
    return OperatorMatrix(np.array(rows), 2, hermitian=True)


def paper_hq() -> OperatorMatrix:
    """sigma_x (x) I + I (x) sigma_x, the fully reduced form of ``paper_h4``."""
    rows = [[0, 1, 1, 0], [1, 0, 0, 1], [1, 0, 0, 1], [0, 1, 1, 0]]
    return OperatorMatrix(np.array(rows), 2, hermitian=True)


def evolution_operator(H: OperatorMatrix, t, hbar=1.0) -> OperatorMatrix:
    """U_t = exp(-i H t / hbar) via dense hermitian eigendecomposition."""
    if not H.is_hermitian(H.tol):
        raise QComplexError("Evolution operator needs a hermitian generator")
    eigvals, eigvecs = linalg.eigh(H.entries)
    phases = np.exp(-1j * eigvals * t / hbar)
    entries = (eigvecs * phases) @ eigvecs.conj().T
    return OperatorMatrix(entries, H.n_qubits, unitary=True)


# ==========================================
# EXAMPLE SYSTEMS
# ==========================================
def build_tavis_cummings(k, n_max, omega, g, hbar=1.0) -> OperatorMatrix:
    """
    Tavis-Cummings Hamiltonian in the RWA over |n>_ph (x) |m_1...m_k>_at, n <= n_max.

    hbar*omega*(a^+ a + sum sigma^+ sigma) + a^+ sigma_bar + a sigma_bar^+,
    sigma_bar = sum_j g_j sigma_j. Creation above ``n_max`` is dropped. Atom 1 is
    the most significant atom bit; the photon register precedes the atoms.
    """
    if k < 1 or n_max < 1:
        raise QComplexError(f"Tavis-Cummings needs k >= 1 and n_max >= 1, got k={k}, n_max={n_max}")
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    if g.size != k:
        raise DimensionMismatchError(f"Expected {k} couplings, got {g.size}", k=k, couplings=g.size)

    n_atoms_states = 2 ** k
    dim = (n_max + 1) * n_atoms_states
    entries = np.zeros((dim, dim), dtype=np.complex128)

    for photons in range(n_max + 1):
        for atoms in range(n_atoms_states):
            source = photons * n_atoms_states + atoms
            excited = bin(atoms).count("1")
            entries[source, source] = hbar * omega * (photons + excited)
            if photons == n_max:
                continue
            # a^+ sigma_j: atom j relaxes, one photon is created
            for j in range(k):
                bit = 1 << (k - 1 - j)
                if atoms & bit:
                    target = (photons + 1) * n_atoms_states + (atoms ^ bit)
                    amplitude = g[j] * np.sqrt(photons + 1)
                    entries[target, source] += amplitude
                    entries[source, target] += amplitude

    photon_qubits = _qubits_for_dim(n_max + 1)
    n_qubits = photon_qubits + k if photon_qubits else 0
    logging.debug(f"Built Tavis-Cummings H: k={k}, n_max={n_max}, dim={dim}, n_qubits={n_qubits}")
    return OperatorMatrix(entries, n_qubits, hermitian=True)


if __name__ == "__main__":
    H = paper_h4()
    print("H|00> =", apply(H, basis_state(0, 2)).amps.real)
    print("CNOT H_q CNOT == H:", np.array_equal(conjugate(paper_hq(), cnot_indices(2, 0, 1)).entries, H.entries))
    print("{3-4i} =", cross_norm(3 - 4j))
    print(build_tavis_cummings(1, 1, 1.0, [0.1]).entries.real)
