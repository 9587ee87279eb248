"""
Fixture generators: the worked example systems as JSON state/matrix files,
plus random commutant-rich Hamiltonians for the lemma and quantization sweeps.
"""

import itertools
import logging
import math

import numpy as np

from ..ampquant import AmplitudeType
from ..core import (
    OperatorMatrix,
    StateVector,
    basis_state,
    build_tavis_cummings,
    cnot,
    ghz_state,
    paper_h4,
    paper_hq,
    qubit_permutation_indices,
)
from ..errors import DisconnectedSeedError, FixtureError
from ..grover import build_gsa_state
from ..symmetry import build_connected_state, commutant, is_connected
from .json_io import read_matrix, write_matrix, write_state

SYMMETRY_FAMILIES = ("full", "cyclic", "swap")


# ==========================================
# RANDOM SYMMETRIC HAMILTONIANS
# ==========================================
def symmetry_family(n, family="full"):
    """Qubit-permutation group used to symmetrize: all of S_n, cyclic shifts, or one swap of qubits 0 and 1."""
    if family == "full":
        return [tuple(eta) for eta in itertools.permutations(range(n))]
    if family == "cyclic":
        return [tuple((k + s) % n for k in range(n)) for s in range(n)]
    if family == "swap":
        if n < 2:
            raise FixtureError("The swap family needs at least 2 qubits", n=n)
        return [tuple(range(n)), (1, 0) + tuple(range(2, n))]
    raise FixtureError(f"Unknown symmetry family '{family}'", known=list(SYMMETRY_FAMILIES))


def random_symmetric_hamiltonian(n, rng=None, family="full", scale=1.0) -> OperatorMatrix:
    """Group average (1/|G|) sum P H0 P^-1 of a random hermitian H0; commutes with every member of G."""
    rng = np.random.default_rng(rng)
    dim = 2 ** n
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h0 = scale * (raw + raw.conj().T) / 2.0
    group = symmetry_family(n, family)
    averaged = np.zeros_like(h0)
    for eta in group:
        p = qubit_permutation_indices(eta, n)
        averaged += h0[np.ix_(p, p)]
    averaged /= len(group)
    # exact hermiticity after the float sum
    averaged = (averaged + averaged.conj().T) / 2.0
    return OperatorMatrix(averaged, n, hermitian=True)


def random_connected_fixture(n, rng=None, family="full", max_attempts=32):
    """(H, psi) with psi connected w.r.t. H; orbit states H annihilates are skipped."""
    rng = np.random.default_rng(rng)
    H = random_symmetric_hamiltonian(n, rng, family)
    group = commutant(H, n)
    for _ in range(max_attempts):
        seed = int(rng.integers(2 ** n))
        orbit = group.orbit(seed)
        pattern = [AmplitudeType(int(code)).value_complex for code in rng.integers(4, size=len(orbit))]
        try:
            psi = build_connected_state(H, n, seed, pattern, group=group)
        except DisconnectedSeedError:
            continue
        if is_connected(psi, H, group=group).connected:
            return H, psi
    raise FixtureError(f"No connected seed found in {max_attempts} attempts", n=n)


# ==========================================
# NAMED FIXTURES
# ==========================================
def _parse_pattern(pattern):
    if pattern is None:
        return None
    labels = pattern.split(",") if isinstance(pattern, str) else list(pattern)
    try:
        return [AmplitudeType.from_label(label.strip()).value_complex for label in labels]
    except ValueError:
        raise FixtureError("Pattern labels must be +1, -1, +i or -i", pattern=labels)


def _couplings(g, k):
    if isinstance(g, str):
        try:
            g = [float(x) for x in g.split(",")]
        except ValueError:
            raise FixtureError(f"Couplings must be comma-separated numbers, got '{g}'", g=g)
    if isinstance(g, (int, float)):
        g = [float(g)] * k
    return list(g)


def build_fixture(kind, params=None):
    """Return the StateVector or OperatorMatrix named by ``kind``."""
    try:
        return _build_fixture(kind, dict(params or {}))
    except (TypeError, ValueError) as e:
        raise FixtureError(f"Bad parameters for fixture '{kind}': {e}", kind=kind)


def _build_fixture(kind, params):
    n = int(params.get("n", 2))
    if kind == "ghz":
        return ghz_state(n)
    if kind == "gsa_state":
        t = float(params.get("t", 3.0 * math.asin(2.0 ** (-n / 2.0))))
        return build_gsa_state(n, int(params.get("target", 0)), t)
    if kind == "basis":
        return basis_state(int(params.get("index", 0)), n)
    if kind == "paper_h4":
        return paper_h4()
    if kind == "paper_hq":
        return paper_hq()
    if kind == "cnot":
        return cnot(n, int(params.get("control", 0)), int(params.get("target", 1)))
    if kind == "tavis_cummings":
        k = int(params.get("k", 1))
        return build_tavis_cummings(
            k,
            int(params.get("n_max", 1)),
            float(params.get("omega", 1.0)),
            _couplings(params.get("g", 1.0), k),
            float(params.get("hbar", 1.0)),
        )
    if kind == "symmetric_hamiltonian":
        return random_symmetric_hamiltonian(n, int(params.get("seed", 0)), params.get("family", "full"))
    if kind == "connected":
        if not params.get("ham"):
            raise FixtureError("The connected fixture needs a Hamiltonian file (ham)")
        H = read_matrix(params["ham"])
        return build_connected_state(
            H, H.n_qubits, int(params.get("seed", 0)), _parse_pattern(params.get("pattern"))
        )
    raise FixtureError(f"Unknown fixture kind '{kind}'", known=list(FIXTURE_KINDS))


FIXTURE_KINDS = (
    "ghz", "gsa_state", "basis", "paper_h4", "paper_hq", "cnot",
    "tavis_cummings", "connected", "symmetric_hamiltonian",
)


def gen_fixture(kind, params=None, out=None):
    """Build the fixture and write it to ``out`` using the state or matrix schema. Returns (object, path)."""
    obj = build_fixture(kind, params)
    if out:
        if isinstance(obj, StateVector):
            write_state(out, obj)
        else:
            write_matrix(out, obj)
        logging.info(f"Wrote {kind} fixture to {out}")
    return obj, out
