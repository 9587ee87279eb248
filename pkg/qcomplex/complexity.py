"""
Reducibility, kernels, naive and quantum complexity.

A Hamiltonian is reducible over a bipartition X' | X'' when H = H1 (x) I + I (x) H2;
its finest split gives the interaction blocks and the kernel (largest block).
A state's naive complexity is the size of its largest irreducible tensor factor.
Quantum complexity minimizes either quantity over basis permutations, exhaustively
for dim <= 8 and over a CNOT-circuit library above that.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import config
from .core import (
    OperatorMatrix,
    QubitSubset,
    StateVector,
    conjugate,
    evolution_operator,
    permute_state,
    validate_permutation,
)
from .errors import InvalidSubsetError, NotQubitStructuredError, QComplexError, SearchTooLargeError

MAX_EXHAUSTIVE_DIM = 8
MAX_BLOCK_QUBITS = 12


class SearchStrategy(str, Enum):
    EXHAUSTIVE = "exhaustive"
    HEURISTIC = "heuristic_library"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if value == "heuristic":
            return cls.HEURISTIC
        return cls(value)


# ==========================================
# RESULT TYPES
# ==========================================
@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Disjoint qubit blocks covering the register, with one factor per block."""

    blocks: tuple
    factors: tuple
    n_qubits: int
    kind: str  # "hamiltonian" or "state"

    @property
    def kernel(self):
        return max(self.blocks, key=len)

    @property
    def nu(self):
        return len(self.kernel)

    def reassemble(self):
        """Rebuild the dense operator (sum of embedded factors) or state (tensor product)."""
        order = [q for block in self.blocks for q in block]
        n = self.n_qubits
        if self.kind == "state":
            amps = np.array([1.0 + 0j])
            for factor in self.factors:
                amps = np.kron(amps, factor)
            return _restore_state_order(amps, n, order)

        dim = 2 ** n
        total = np.zeros((dim, dim), dtype=np.complex128)
        offset = 0
        for block, factor in zip(self.blocks, self.factors):
            left = np.eye(2 ** offset)
            right = np.eye(2 ** (n - offset - len(block)))
            total += np.kron(np.kron(left, factor), right)
            offset += len(block)
        return _restore_operator_order(total, n, order)


@dataclass(frozen=True)
class ComplexityReport:
    naive: int
    quantum: int
    witness: tuple
    search_strategy: SearchStrategy
    certified: bool
    candidates_evaluated: int = 0

    def to_dict(self):
        return {
            "naive": self.naive,
            "quantum": self.quantum,
            "certified": self.certified,
            "strategy": self.search_strategy.value,
            "witness": list(self.witness),
            "candidates_evaluated": self.candidates_evaluated,
        }


# ==========================================
# QUBIT REORDERING
# ==========================================
def _reorder_state(amps, n, order):
    """Amplitudes in the basis where qubit order[0] is the most significant bit."""
    return np.transpose(amps.reshape((2,) * n), order).reshape(-1)


def _restore_state_order(amps, n, order):
    return np.transpose(amps.reshape((2,) * n), np.argsort(order)).reshape(-1)


def _reorder_operator(entries, n, order):
    axes = list(order) + [n + q for q in order]
    return np.transpose(entries.reshape((2,) * (2 * n)), axes).reshape(2 ** n, 2 ** n)


def _restore_operator_order(entries, n, order):
    inverse = list(np.argsort(order))
    axes = inverse + [n + q for q in inverse]
    return np.transpose(entries.reshape((2,) * (2 * n)), axes).reshape(2 ** n, 2 ** n)


def _as_subset(part, n):
    subset = part if isinstance(part, QubitSubset) else QubitSubset.from_qubits(part, n)
    if subset.n != n or not subset.is_proper():
        raise InvalidSubsetError(
            f"Bipartition side must be a proper non-empty subset of {n} qubits", mask=subset.mask, n=n
        )
    return subset


def _require_qubits(obj):
    if not obj.qubit_structured:
        raise NotQubitStructuredError(f"{type(obj).__name__} of dim {obj.dim} is not qubit-structured", dim=obj.dim)


# ==========================================
# HAMILTONIANS
# ==========================================
def _trace_split(entries, n, side, tol):
    """Trace-based H1, H2 for the bipartition (side | rest), or None when the residual exceeds tol."""
    rest = [q for q in range(n) if q not in side]
    order = list(side) + rest
    d1, d2 = 2 ** len(side), 2 ** len(rest)
    m = _reorder_operator(entries, n, order)
    t = m.reshape(d1, d2, d1, d2)
    shift = np.trace(m) / (2.0 * d1 * d2)
    h1 = np.einsum("ajbj->ab", t) / d2 - shift * np.eye(d1)
    h2 = np.einsum("iaib->ab", t) / d1 - shift * np.eye(d2)
    residual = np.max(np.abs(m - np.kron(h1, np.eye(d2)) - np.kron(np.eye(d1), h2)))
    if residual > tol:
        return None
    return h1, h2


def is_reducible_h(H: OperatorMatrix, part, tol=None):
    """Factors (H1 on ``part``, H2 on the complement) when H = H1 (x) I + I (x) H2, else None."""
    _require_qubits(H)
    tol = config.tolerance() if tol is None else tol
    subset = _as_subset(part, H.n_qubits)
    split = _trace_split(H.entries, H.n_qubits, subset.qubits, tol)
    if split is None:
        return None
    h1, h2 = split
    return OperatorMatrix(h1, len(subset)), OperatorMatrix(h2, H.n_qubits - len(subset))


def _bipartitions(m):
    """Proper subsets of range(m), smallest side first."""
    for size in range(1, m // 2 + 1):
        yield from itertools.combinations(range(m), size)


def _split_operator(entries, qubits, tol):
    m = len(qubits)
    if m > 1:
        for side in _bipartitions(m):
            split = _trace_split(entries, m, side, tol)
            if split is None:
                continue
            rest = [q for q in range(m) if q not in side]
            h1, h2 = split
            return (_split_operator(h1, [qubits[q] for q in side], tol)
                    + _split_operator(h2, [qubits[q] for q in rest], tol))
    return [(tuple(qubits), entries)]


def _decomposition(pieces, n, kind):
    pieces = sorted(pieces, key=lambda piece: piece[0][0])
    return BlockDecomposition(
        blocks=tuple(block for block, _ in pieces),
        factors=tuple(factor for _, factor in pieces),
        n_qubits=n,
        kind=kind,
    )


def finest_blocks_h(H: OperatorMatrix, tol=None) -> BlockDecomposition:
    _require_qubits(H)
    if H.n_qubits > MAX_BLOCK_QUBITS:
        raise SearchTooLargeError(f"Block search supports n <= {MAX_BLOCK_QUBITS}", n=H.n_qubits)
    tol = config.tolerance() if tol is None else tol
    pieces = _split_operator(H.entries, list(range(H.n_qubits)), tol)
    return _decomposition(pieces, H.n_qubits, "hamiltonian")


def naive_complexity_h(H: OperatorMatrix, tol=None) -> int:
    return finest_blocks_h(H, tol).nu


# ==========================================
# STATES
# ==========================================
def _rank_one_split(amps, n, side, tol):
    rest = [q for q in range(n) if q not in side]
    order = list(side) + rest
    matrix = _reorder_state(amps, n, order).reshape(2 ** len(side), 2 ** len(rest))
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    if s[0] == 0.0 or (s.size > 1 and s[1] > tol * s[0]):
        return None
    first = u[:, 0]
    k = int(np.argmax(np.abs(first)))
    phase = first[k] / abs(first[k])
    return first / phase, s[0] * vh[0] * phase


def factor_state(psi: StateVector, part, tol=None):
    """(psi1 on ``part``, psi2 on the complement) when psi is a product over the bipartition, else None."""
    _require_qubits(psi)
    tol = config.tolerance() if tol is None else tol
    subset = _as_subset(part, psi.n_qubits)
    split = _rank_one_split(psi.amps, psi.n_qubits, subset.qubits, tol)
    if split is None:
        return None
    first, second = split
    return StateVector(first, len(subset)), StateVector(second, psi.n_qubits - len(subset))


def _split_state(amps, qubits, tol):
    m = len(qubits)
    if m > 1:
        for side in _bipartitions(m):
            split = _rank_one_split(amps, m, side, tol)
            if split is None:
                continue
            rest = [q for q in range(m) if q not in side]
            first, second = split
            return (_split_state(first, [qubits[q] for q in side], tol)
                    + _split_state(second, [qubits[q] for q in rest], tol))
    return [(tuple(qubits), amps)]


def _state_nu(amps, n, tol):
    return max(len(block) for block, _ in _split_state(amps, list(range(n)), tol))


def naive_complexity_state(psi: StateVector, tol=None):
    """(nu, decomposition) where nu is the size of the largest irreducible tensor factor."""
    _require_qubits(psi)
    if psi.n_qubits > MAX_BLOCK_QUBITS:
        raise SearchTooLargeError(f"Factorization supports n <= {MAX_BLOCK_QUBITS}", n=psi.n_qubits)
    if not psi.is_normalized():
        raise QComplexError("Naive complexity needs a normalized state", norm=psi.norm())
    tol = config.tolerance() if tol is None else tol
    decomposition = _decomposition(_split_state(psi.amps, list(range(psi.n_qubits)), tol), psi.n_qubits, "state")
    return decomposition.nu, decomposition


# ==========================================
# PERMUTATION SEARCH
# ==========================================
def _evaluate_state(amps, n, perm, tol):
    permuted = np.empty_like(amps)
    permuted[np.asarray(perm)] = amps
    return _state_nu(permuted, n, tol)


def _evaluate_operator(entries, n, perm, tol):
    perm = np.asarray(perm)
    pieces = _split_operator(entries[np.ix_(perm, perm)], list(range(n)), tol)
    return max(len(block) for block, _ in pieces)


def _exhaustive_chunk(args):
    """Lexicographic scan of all permutations starting with ``first``; stops at nu == 1."""
    kind, payload, n, first, tol = args
    evaluate = _evaluate_state if kind == "state" else _evaluate_operator
    dim = 2 ** n
    others = [x for x in range(dim) if x != first]
    best, count = None, 0
    for tail in itertools.permutations(others):
        perm = (first,) + tail
        nu = evaluate(payload, n, perm, tol)
        count += 1
        if best is None or nu < best[0]:
            best = (nu, perm)
            if nu == 1:
                break
    return best[0], best[1], count


def _exhaustive_search(kind, payload, n, tol, workers):
    dim = 2 ** n
    if dim > MAX_EXHAUSTIVE_DIM:
        raise SearchTooLargeError(
            f"Exhaustive search needs dim <= {MAX_EXHAUSTIVE_DIM} (got {dim}); use the heuristic library",
            dim=dim,
        )
    jobs = [(kind, payload, n, first, tol) for first in range(dim)]
    logging.info(f"Exhaustive {kind} search over {dim}! permutations (workers={workers})")
    if workers > 1 and dim >= MAX_EXHAUSTIVE_DIM:
        with ProcessPoolExecutor(max_workers=min(workers, dim)) as pool:
            results = list(pool.map(_exhaustive_chunk, jobs))
    else:
        results = []
        for job in jobs:
            results.append(_exhaustive_chunk(job))
            if results[-1][0] == 1:
                break
    nu, perm, _ = min(results, key=lambda r: (r[0], r[1]))
    return nu, perm, sum(r[2] for r in results)


def cnot_ladder(n):
    """CNOT(0 -> k) for k = 1..n-1; un-tangles GHZ_n into a product state."""
    return [(0, k) for k in range(1, n)]


def _linear_map_permutation(columns, n):
    """Basis permutation j -> L j for the GF(2)-linear map with images ``columns`` of the unit bit-strings."""
    indices = np.arange(2 ** n, dtype=np.int64)
    perm = np.zeros_like(indices)
    for k, image in enumerate(columns):
        perm ^= ((indices >> (n - 1 - k)) & 1) * image
    return perm


def _apply_cnot_to_columns(columns, n, control, target):
    c_shift, t_shift = n - 1 - control, n - 1 - target
    return tuple(col ^ (((col >> c_shift) & 1) << t_shift) for col in columns)


def circuit_permutation(gates, n):
    """Basis permutation realized by the CNOT circuit ``gates`` (applied left to right)."""
    columns = tuple(1 << (n - 1 - k) for k in range(n))
    for control, target in gates:
        columns = _apply_cnot_to_columns(columns, n, control, target)
    return _linear_map_permutation(columns, n)


def _expand(frontier, gate_set, n, seen):
    level, added = [], set()
    for columns, gates in frontier:
        for control, target in gate_set:
            new_columns = _apply_cnot_to_columns(columns, n, control, target)
            if new_columns in seen or new_columns in added:
                continue
            added.add(new_columns)
            level.append((new_columns, gates + ((control, target),)))
    return level


def _library_levels(n, depth, shrink=None):
    """
    BFS levels of distinct CNOT circuits as lists of (columns, gates).

    ``shrink(frontier, level)`` may return a smaller frontier; the level is then rebuilt from it.
    """
    gate_set = [(c, t) for c in range(n) for t in range(n) if c != t]
    start = tuple(1 << (n - 1 - k) for k in range(n))
    seen = {start}
    frontier = [(start, ())]
    yield frontier
    for _ in range(depth):
        level = _expand(frontier, gate_set, n, seen)
        smaller = shrink(frontier, level) if shrink is not None else None
        if smaller is not None:
            level = _expand(smaller, gate_set, n, seen)
        if not level:
            return
        seen.update(columns for columns, _ in level)
        yield level
        frontier = level


def entangling_library(n, depth=None):
    """
    Distinct CNOT circuits up to ``depth`` gates, as (gates, basis permutation) pairs in BFS order.

    Circuits are deduplicated by the linear map they realize. Composition with qubit
    permutations is not enumerated: it leaves naive complexity unchanged.
    """
    depth = n if depth is None else depth
    for level in _library_levels(n, depth):
        for columns, gates in level:
            yield gates, _linear_map_permutation(columns, n)


def _heuristic_search(evaluate, n, depth, budget, beam):
    """
    Walk the entangling library level by level; returns (nu, perm, evaluated).

    Every circuit is evaluated while the budget allows. A level that would not fit in the
    remaining budget is rebuilt from the ``beam`` best-scoring circuits of the previous one.
    """
    scores = {}
    best = None
    evaluated = 0

    def shrink(frontier, level):
        remaining = budget - evaluated
        if len(level) <= remaining:
            return None
        logging.debug(f"Level of {len(level)} circuits exceeds remaining budget {remaining}; beam {beam}")
        return sorted(frontier, key=lambda item: (scores[item[0]], item[1]))[:beam]

    for index, level in enumerate(_library_levels(n, depth, shrink)):
        for columns, _ in level:
            if evaluated >= budget and best is not None:
                break
            perm = _linear_map_permutation(columns, n)
            nu = evaluate(perm)
            evaluated += 1
            scores[columns] = nu
            candidate = (nu, tuple(perm.tolist()))
            best = candidate if best is None else min(best, candidate)
            if nu == 1:
                break
        logging.debug(f"Heuristic level {index}: {len(level)} circuits, best nu={best[0]}")
        if best[0] == 1 or evaluated >= budget:
            break
    return best[0], best[1], evaluated


def _run_search(kind, payload, n, naive, strategy, tol, depth, workers):
    strategy = SearchStrategy.parse(strategy)
    if strategy is SearchStrategy.EXHAUSTIVE:
        workers = config.worker_count() if workers is None else workers
        quantum, witness, evaluated = _exhaustive_search(kind, payload, n, tol, workers)
        certified = True
    else:
        evaluate_fn = _evaluate_state if kind == "state" else _evaluate_operator
        quantum, witness, evaluated = _heuristic_search(
            lambda perm: evaluate_fn(payload, n, perm, tol),
            n,
            n if depth is None else depth,
            config.heuristic_budget(),
            config.beam_width(),
        )
        certified = False
    logging.info(f"{kind} complexity: naive={naive}, quantum={quantum}, strategy={strategy.value}, evaluated={evaluated}")
    return ComplexityReport(naive, quantum, tuple(int(x) for x in witness), strategy, certified, evaluated)


def quantum_complexity_state(psi: StateVector, strategy=SearchStrategy.EXHAUSTIVE, tol=None, depth=None, workers=None):
    """Minimal naive complexity of P_tau |psi> over basis permutations tau."""
    tol = config.tolerance() if tol is None else tol
    naive, _ = naive_complexity_state(psi, tol)
    return _run_search("state", psi.amps, psi.n_qubits, naive, strategy, tol, depth, workers)


def quantum_complexity_h(H: OperatorMatrix, strategy=SearchStrategy.EXHAUSTIVE, tol=None, depth=None, workers=None):
    """Minimal naive complexity of P_tau^-1 H P_tau; the witness is the canonical transformation."""
    tol = config.tolerance() if tol is None else tol
    naive = finest_blocks_h(H, tol).nu
    return _run_search("hamiltonian", H.entries, H.n_qubits, naive, strategy, tol, depth, workers)


def verify_witness(target, report: ComplexityReport, tol=None):
    """Re-evaluate naive complexity at the reported witness."""
    tol = config.tolerance() if tol is None else tol
    perm = validate_permutation(report.witness, target.dim)
    if isinstance(target, StateVector):
        return naive_complexity_state(permute_state(target, perm), tol)[0] == report.quantum
    return finest_blocks_h(conjugate(target, perm), tol).nu == report.quantum


def evolution_complexity(H: OperatorMatrix, times, basis_index=0, witness=None, tol=None, hbar=1.0):
    """Naive complexity of exp(-i H_q t)|basis_index> where H_q = P^-1 H P is the canonical representation."""
    tol = config.tolerance() if tol is None else tol
    h_q = H if witness is None else conjugate(H, witness)
    profile = []
    for t in times:
        state = StateVector(evolution_operator(h_q, t, hbar).entries[:, basis_index], H.n_qubits)
        profile.append(naive_complexity_state(state.normalized(), tol)[0])
    return profile


# ==========================================
# ACCURACY-COMPLEXITY BUDGET
# ==========================================
def accuracy_budget(C, Q):
    """Largest accuracy A with C * A <= Q."""
    if C < 1 or Q < 1:
        raise QComplexError(f"Budget needs C >= 1 and Q >= 1, got C={C}, Q={Q}", C=C, Q=Q)
    return Q // C


def epsilon_from_q(Q):
    """Minimum amplitude eps = 2^(-Q/2)."""
    if Q < 1:
        raise QComplexError(f"Q must be >= 1, got {Q}", Q=Q)
    return 2.0 ** (-Q / 2.0)


def max_coherent_states(epsilon):
    """|J| = 1/eps^2, rounded to the nearest whole count of basis states."""
    if epsilon <= 0:
        raise QComplexError(f"epsilon must be positive, got {epsilon}")
    return int(round(1.0 / epsilon ** 2))


if __name__ == "__main__":
    from .core import ghz_state, paper_h4

    logging.basicConfig(level=logging.INFO)
    print(quantum_complexity_h(paper_h4()).to_dict())
    print(quantum_complexity_state(ghz_state(4), SearchStrategy.HEURISTIC).to_dict())
    print("A(C=5, Q=40) =", accuracy_budget(5, 40))
