"""
Amplitude quantization of a single application of an operator A.

Both the state and A are approximated on an eps-grid (sign times a count of eps per
real/imaginary part). Every eps occurrence of lambda_j is refined into nu smaller
quanta of size eps/nu, nu being the common column weight of A over the support.
Descendant r of each occurrence is bound to the r-th eps occurrence of column j of A,
which fixes its landing basis state and final type. Quanta are stored column-wise in
numpy arrays; ids are their row numbers, assigned in (j, occurrence, descendant) order.

Amplitude types {+1, +i, -1, -i} are encoded as powers of i: code k means i**k, so
type products add codes mod 4 and opposite types differ by 2.
"""

import logging
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import config
from .core import OperatorMatrix, StateVector
from .errors import (
    DimensionMismatchError,
    NotEquilibriumError,
    QComplexError,
    TotalCancellationError,
    UnequalColumnWeightsError,
    UnknownQuantumError,
    ZeroColumnWeightError,
)
from .symmetry import is_equilibrium


class AmplitudeType(IntEnum):
    PLUS_ONE = 0
    PLUS_I = 1
    MINUS_ONE = 2
    MINUS_I = 3

    @property
    def value_complex(self):
        return 1j ** int(self)

    @property
    def label(self):
        return _TYPE_LABELS[int(self)]

    @classmethod
    def from_label(cls, label):
        return cls(_TYPE_LABELS.index(label))

    def __mul__(self, other):
        return AmplitudeType((int(self) + int(other)) % 4)

    def __neg__(self):
        return AmplitudeType((int(self) + 2) % 4)


_TYPE_LABELS = ("+1", "+i", "-1", "-i")
_UNITS = np.array([1, 1j, -1, -1j], dtype=np.complex128)


# ==========================================
# GRIDS
# ==========================================
def _round_half_away(x):
    """Round non-negative values half away from zero."""
    return np.floor(x + 0.5).astype(np.int64)


def _grid_components(values, epsilon):
    if epsilon <= 0:
        raise QComplexError(f"Grid size must be positive, got {epsilon}")
    re_counts = _round_half_away(np.abs(values.real) / epsilon)
    im_counts = _round_half_away(np.abs(values.imag) / epsilon)
    # zero counts carry sign +1 by convention
    re_signs = np.where((values.real < 0) & (re_counts > 0), -1, 1)
    im_signs = np.where((values.imag < 0) & (im_counts > 0), -1, 1)
    return re_signs, re_counts, im_signs, im_counts


@dataclass(frozen=True, eq=False)
class StateGrid:
    """lambda_j ~ sign_re * eps * M_j + i * sign_im * eps * N_j."""

    sign_re: np.ndarray
    M: np.ndarray
    sign_im: np.ndarray
    N: np.ndarray
    epsilon: float

    def reconstruct(self):
        return self.epsilon * (self.sign_re * self.M + 1j * self.sign_im * self.N)

    def occurrences(self):
        return self.M + self.N


@dataclass(frozen=True, eq=False)
class MatrixGrid:
    """<i|A|j> ~ sign_R * eps * R_ij + i * sign_I * eps * I_ij."""

    sign_R: np.ndarray
    R: np.ndarray
    sign_I: np.ndarray
    I: np.ndarray
    epsilon: float

    def reconstruct(self):
        return self.epsilon * (self.sign_R * self.R + 1j * self.sign_I * self.I)


def grid_approx_state(psi: StateVector, epsilon) -> StateGrid:
    return StateGrid(*_grid_components(psi.amps, epsilon), epsilon)


def grid_approx_matrix(A: OperatorMatrix, epsilon) -> MatrixGrid:
    return MatrixGrid(*_grid_components(A.entries, epsilon), epsilon)


def column_weight(grid: MatrixGrid, j) -> int:
    """nu_j = sum_i (R_ij + I_ij): the number of eps occurrences in column j."""
    return int(np.sum(grid.R[:, j]) + np.sum(grid.I[:, j]))


# ==========================================
# QUANTIZATION
# ==========================================
@dataclass(frozen=True)
class AmplitudeQuantum:
    size: float
    id: int
    b_in: int
    b_fin: int
    t_in: AmplitudeType
    t_fin: AmplitudeType

    def to_dict(self):
        return {
            "id": self.id,
            "b_in": self.b_in,
            "b_fin": self.b_fin,
            "t_in": self.t_in.label,
            "t_fin": self.t_fin.label,
        }


@dataclass(frozen=True)
class Trajectory:
    id: int
    b_in: int
    t_in: AmplitudeType
    b_fin: int
    t_fin: AmplitudeType

    def __str__(self):
        return f"#{self.id}: ({self.b_in}, {self.t_in.label}) -> ({self.b_fin}, {self.t_fin.label})"

    def to_dict(self):
        return {"id": self.id, "b_in": self.b_in, "t_in": self.t_in.label, "b_fin": self.b_fin, "t_fin": self.t_fin.label}


@dataclass(frozen=True, eq=False)
class Quantization:
    """A set of quanta of size eps/nu satisfying condition Q; row k of the arrays is quantum id k."""

    b_in: np.ndarray
    b_fin: np.ndarray
    t_in: np.ndarray
    t_fin: np.ndarray
    epsilon: float
    nu: int
    dim: int

    @property
    def quantum_size(self):
        return self.epsilon / self.nu

    @property
    def c_of_eps(self):
        return self.epsilon * self.nu

    @property
    def ids(self):
        return np.arange(len(self), dtype=np.int64)

    def __len__(self):
        return int(self.b_in.size)

    def __iter__(self):
        size = self.quantum_size
        for k in range(len(self)):
            yield AmplitudeQuantum(
                size, k, int(self.b_in[k]), int(self.b_fin[k]),
                AmplitudeType(int(self.t_in[k])), AmplitudeType(int(self.t_fin[k])),
            )

    def transition_counts(self):
        """n_ij: number of quanta with s_in = j and s_fin = i."""
        counts = np.zeros((self.dim, self.dim), dtype=np.int64)
        np.add.at(counts, (self.b_fin, self.b_in), 1)
        return counts

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "nu": self.nu,
            "c": self.c_of_eps,
            "dim": self.dim,
            "quanta": [q.to_dict() for q in self],
        }

    @classmethod
    def from_dict(cls, data):
        quanta = sorted(data["quanta"], key=lambda q: q["id"])
        if [q["id"] for q in quanta] != list(range(len(quanta))):
            raise QComplexError("Quanta ids must be 0..len-1")
        return cls(
            b_in=np.array([q["b_in"] for q in quanta], dtype=np.int64),
            b_fin=np.array([q["b_fin"] for q in quanta], dtype=np.int64),
            t_in=np.array([AmplitudeType.from_label(q["t_in"]) for q in quanta], dtype=np.int8),
            t_fin=np.array([AmplitudeType.from_label(q["t_fin"]) for q in quanta], dtype=np.int8),
            epsilon=float(data["epsilon"]),
            nu=int(data["nu"]),
            dim=int(data["dim"]),
        )


def _column_occurrences(grid: MatrixGrid, j):
    """Z_j as (landing rows, type codes) in (i ascending, re before im, occurrence rank) order."""
    rows = np.arange(grid.R.shape[0])
    re_types = np.where(grid.sign_R[:, j] > 0, AmplitudeType.PLUS_ONE, AmplitudeType.MINUS_ONE)
    im_types = np.where(grid.sign_I[:, j] > 0, AmplitudeType.PLUS_I, AmplitudeType.MINUS_I)
    per_row = np.stack([grid.R[:, j], grid.I[:, j]], axis=1).reshape(-1)
    landing = np.repeat(np.repeat(rows, 2), per_row)
    types = np.repeat(np.stack([re_types, im_types], axis=1).reshape(-1), per_row)
    return landing, types.astype(np.int8)


def quantize(psi: StateVector, A: OperatorMatrix, epsilon, tol=None) -> Quantization:
    """Constructive quantization of A|psi> at grid size ``epsilon``; c(eps) = eps * nu."""
    if psi.dim != A.dim:
        raise DimensionMismatchError("State and operator dimensions differ", state_dim=psi.dim, operator_dim=A.dim)
    tol = config.tolerance() if tol is None else tol
    if not is_equilibrium(psi, A, tol):
        raise NotEquilibriumError("State is not equilibrium with respect to the operator")

    state_grid = grid_approx_state(psi, epsilon)
    matrix_grid = grid_approx_matrix(A, epsilon)
    occurrences = state_grid.occurrences()
    columns = np.flatnonzero(occurrences)
    if columns.size == 0:
        raise QComplexError(f"No amplitude survives the grid at eps={epsilon}; use a finer grid", epsilon=epsilon)

    weights = {int(j): column_weight(matrix_grid, j) for j in columns}
    if len(set(weights.values())) > 1:
        raise UnequalColumnWeightsError(
            f"Column weights differ across support at eps={epsilon}; try a finer grid",
            epsilon=epsilon, weights={str(j): w for j, w in weights.items()},
        )
    nu = next(iter(weights.values()))
    if nu == 0:
        raise ZeroColumnWeightError(
            f"Operator rounds to zero on the support at eps={epsilon} (take c(eps) = 0)", epsilon=epsilon
        )

    b_in, b_fin, t_in, t_fin = [], [], [], []
    for j in columns:
        landing, z_types = _column_occurrences(matrix_grid, j)
        m_j, n_j = int(state_grid.M[j]), int(state_grid.N[j])
        re_type = AmplitudeType.PLUS_ONE if state_grid.sign_re[j] > 0 else AmplitudeType.MINUS_ONE
        im_type = AmplitudeType.PLUS_I if state_grid.sign_im[j] > 0 else AmplitudeType.MINUS_I
        # occurrence s: real part first, then imaginary; nu descendants each
        occurrence_types = np.repeat(np.array([re_type, im_type], dtype=np.int8), [m_j, n_j])
        groups = m_j + n_j
        descendant_types = np.repeat(occurrence_types, nu)
        b_in.append(np.full(groups * nu, j, dtype=np.int64))
        b_fin.append(np.tile(landing, groups))
        t_in.append(descendant_types)
        t_fin.append(((descendant_types + np.tile(z_types, groups)) % 4).astype(np.int8))

    theta = Quantization(
        b_in=np.concatenate(b_in),
        b_fin=np.concatenate(b_fin),
        t_in=np.concatenate(t_in),
        t_fin=np.concatenate(t_fin),
        epsilon=float(epsilon),
        nu=nu,
        dim=psi.dim,
    )
    logging.info(f"Quantized: eps={epsilon}, nu={nu}, quanta={len(theta)}, c={theta.c_of_eps}")
    return theta


def _accumulate(indices, types, dim, scale):
    amps = np.zeros(dim, dtype=np.complex128)
    np.add.at(amps, indices, _UNITS[types])
    return scale * amps


def theta_states(theta: Quantization, normalize=True):
    """
    (theta_in, theta_fin). theta_in uses the quantum size and keeps its norm;
    theta_fin is rescaled to unit norm unless ``normalize`` is False. Cancellation
    between opposite types happens only in these sums.
    """
    if len(theta) == 0:
        raise QComplexError("Empty quantization")
    size = theta.quantum_size
    theta_in = _accumulate(theta.b_in, theta.t_in, theta.dim, size)
    theta_fin = _accumulate(theta.b_fin, theta.t_fin, theta.dim, size)
    norm = np.linalg.norm(theta_fin)
    if norm <= config.support_eps():
        raise TotalCancellationError("All final amplitudes cancel", quanta=len(theta))
    if normalize:
        theta_fin = theta_fin / norm
    return StateVector.from_amplitudes(theta_in), StateVector.from_amplitudes(theta_fin)


def _quantum_columns(theta):
    """(b_in, b_fin, t_in, t_fin, ids, dim) for a Quantization or an iterable of AmplitudeQuantum."""
    if isinstance(theta, Quantization):
        return theta.b_in, theta.b_fin, theta.t_in, theta.t_fin, theta.ids, theta.dim
    quanta = sorted(theta, key=lambda q: q.id)
    dim = 1 + max([max(q.b_in, q.b_fin) for q in quanta], default=0)
    return (
        np.array([q.b_in for q in quanta], dtype=np.int64),
        np.array([q.b_fin for q in quanta], dtype=np.int64),
        np.array([int(q.t_in) for q in quanta], dtype=np.int64),
        np.array([int(q.t_fin) for q in quanta], dtype=np.int64),
        np.array([q.id for q in quanta], dtype=np.int64),
        dim,
    )


def _find_opposite(keys, types, ids):
    """First pair of ids sharing a key with opposite types, else None."""
    types = types.astype(np.int64)
    code = keys * 4 + types
    partner = keys * 4 + (types + 2) % 4
    hits = np.flatnonzero(np.isin(partner, code))
    if hits.size == 0:
        return None
    first = int(hits[0])
    other = int(np.flatnonzero(code == partner[first])[0])
    return int(ids[first]), int(ids[other])


def check_condition_q(theta):
    """
    (ok, violating pair of ids). Violations: same state transition and t_in with
    opposite t_fin, or same s_in with opposite t_in.
    """
    b_in, b_fin, t_in, t_fin, ids, dim = _quantum_columns(theta)
    if b_in.size == 0:
        return True, None
    b_in = b_in.astype(np.int64)
    found = _find_opposite(b_in, t_in, ids)
    if found is None:
        transition = (b_in * dim + b_fin) * 4 + t_in.astype(np.int64)
        found = _find_opposite(transition, t_fin, ids)
    if found is not None:
        logging.debug(f"Condition Q violated by quanta {found}")
        return False, found
    return True, None


def consistency_error(psi: StateVector, A: OperatorMatrix, epsilon, tol=None) -> float:
    """|| c(eps) * theta_fin - A theta_in ||_1 with theta_fin summed at the quantum size."""
    theta = quantize(psi, A, epsilon, tol)
    theta_in, theta_fin = theta_states(theta, normalize=False)
    residual = theta.c_of_eps * theta_fin.amps - A.entries @ theta_in.amps
    return float(np.sum(np.abs(residual)))


def convergence_constant(epsilons, errors) -> float:
    """Smallest K with error <= K * eps over a sweep; NaN entries (failed grids) are ignored."""
    ratios = np.asarray(errors, dtype=np.float64) / np.asarray(epsilons, dtype=np.float64)
    ratios = ratios[np.isfinite(ratios)]
    if ratios.size == 0:
        raise QComplexError("No finite consistency errors to fit")
    return float(ratios.max())


def trace_quantum(theta: Quantization, quantum_id) -> Trajectory:
    """The unique (b_in, t_in) -> (b_fin, t_fin) record of a quantum."""
    if not 0 <= quantum_id < len(theta):
        raise UnknownQuantumError(f"No quantum with id {quantum_id}", id=quantum_id, count=len(theta))
    k = int(quantum_id)
    return Trajectory(
        id=k,
        b_in=int(theta.b_in[k]),
        t_in=AmplitudeType(int(theta.t_in[k])),
        b_fin=int(theta.b_fin[k]),
        t_fin=AmplitudeType(int(theta.t_fin[k])),
    )


if __name__ == "__main__":
    from .core import basis_state, pauli_x

    theta = quantize(basis_state(0, 1), pauli_x(), 0.5)
    print(f"nu={theta.nu}, quanta={len(theta)}, c={theta.c_of_eps}")
    for k in range(len(theta)):
        print(trace_quantum(theta, k))
    print("condition Q:", check_condition_q(theta))
