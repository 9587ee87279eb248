"""
Canonical JSON for states, matrices and quantizations.

Keys are sorted and floats are written with 17 significant digits so that
write -> read -> write reproduces the same bytes.
"""

import json
import math
import os

import numpy as np

from ..ampquant import Quantization
from ..core import OperatorMatrix, StateVector
from ..errors import SchemaError


def _encode(value):
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value) + 0.0  # -0.0 -> 0.0
        if not math.isfinite(value):
            raise SchemaError(f"Cannot serialize non-finite float {value}")
        return "%.17g" % value
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = sorted((str(k), v) for k, v in value.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_encode(v)}" for k, v in items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    raise SchemaError(f"Cannot serialize {type(value).__name__}")


def dumps_canonical(obj) -> str:
    return _encode(obj)


def write_json(path, obj):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(obj) + "\n")
    return path


def read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path} is not valid JSON: {e}", path=str(path))


def _pair(z):
    return [float(z.real), float(z.imag)]


def _complex(pair, where):
    if not isinstance(pair, list) or len(pair) != 2:
        raise SchemaError(f"Expected [re, im] at {where}", value=repr(pair)[:80])
    return complex(float(pair[0]), float(pair[1]))


def _require(data, keys, kind):
    if not isinstance(data, dict):
        raise SchemaError(f"{kind} JSON must be an object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise SchemaError(f"{kind} JSON is missing {missing}", missing=missing)


# ==========================================
# STATES
# ==========================================
def state_to_dict(psi: StateVector):
    return {"n_qubits": psi.n_qubits, "dim": psi.dim, "amps": [_pair(z) for z in psi.amps]}


def state_from_dict(data) -> StateVector:
    _require(data, ("n_qubits", "dim", "amps"), "State")
    amps = [_complex(pair, f"amps[{k}]") for k, pair in enumerate(data["amps"])]
    if len(amps) != int(data["dim"]):
        raise SchemaError(f"State declares dim {data['dim']} but has {len(amps)} amplitudes")
    return StateVector(np.array(amps, dtype=np.complex128), int(data["n_qubits"]))


def write_state(path, psi: StateVector):
    return write_json(path, state_to_dict(psi))


def read_state(path) -> StateVector:
    return state_from_dict(read_json(path))


# ==========================================
# MATRICES
# ==========================================
def matrix_to_dict(A: OperatorMatrix):
    return {"dim": A.dim, "entries": [[_pair(z) for z in row] for row in A.entries]}


def matrix_from_dict(data) -> OperatorMatrix:
    _require(data, ("dim", "entries"), "Matrix")
    dim = int(data["dim"])
    rows = data["entries"]
    if len(rows) != dim or any(len(row) != dim for row in rows):
        raise SchemaError(f"Matrix entries are not {dim}x{dim}", dim=dim)
    entries = [[_complex(pair, f"entries[{i}][{j}]") for j, pair in enumerate(row)] for i, row in enumerate(rows)]
    return OperatorMatrix.from_entries(np.array(entries, dtype=np.complex128))


def write_matrix(path, A: OperatorMatrix):
    return write_json(path, matrix_to_dict(A))


def read_matrix(path) -> OperatorMatrix:
    return matrix_from_dict(read_json(path))


# ==========================================
# QUANTA
# ==========================================
def write_quanta(path, theta: Quantization):
    return write_json(path, theta.to_dict())


def read_quanta(path) -> Quantization:
    data = read_json(path)
    _require(data, ("epsilon", "nu", "dim", "quanta"), "Quanta")
    try:
        return Quantization.from_dict(data)
    except (KeyError, ValueError) as e:
        raise SchemaError(f"Malformed quanta record: {e}")
