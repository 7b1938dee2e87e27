"""Numeric (n+1) x N matrix placeholder representation of a circuit.

The last row carries each gate's representative number; the first n rows
mark the wires (1.0 for a single-qubit gate, 0.75/0.25 for the first and
second wire of a two-qubit gate).  Decoding is total: any matrix with
entries in [0, 1] maps to some valid circuit by nearest representative
number and largest wire rows, ties resolved toward the lower index.
"""

from __future__ import annotations

import numpy as np

from .gates import CATALOG, GATE_NAMES, Circuit, Gate

_REPS = np.array([CATALOG[n].representative for n in GATE_NAMES])
_NAMES_1Q = tuple(n for n in GATE_NAMES if CATALOG[n].arity == 1)
_REPS_1Q = np.array([CATALOG[n].representative for n in _NAMES_1Q])


def encode_matrix(circuit: Circuit) -> np.ndarray:
    n = circuit.n_qubits
    mat = np.zeros((n + 1, circuit.n_gates))
    for col, g in enumerate(circuit.gates):
        if len(g.wires) == 1:
            mat[g.wires[0], col] = 1.0
        else:
            mat[g.wires[0], col] = 0.75
            mat[g.wires[1], col] = 0.25
        mat[n, col] = g.gate_type.representative
    return mat


def decode_matrix(mat: np.ndarray, n_qubits: int) -> Circuit:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != n_qubits + 1:
        raise ValueError(f"expected shape ({n_qubits + 1}, N), got {mat.shape}")
    names, reps = (GATE_NAMES, _REPS) if n_qubits >= 2 else (_NAMES_1Q, _REPS_1Q)
    gates = []
    for col in range(mat.shape[1]):
        name = names[int(np.argmin(np.abs(reps - mat[n_qubits, col])))]
        rows = mat[:n_qubits, col]
        # Stable sort on negated values: equal entries keep the lower row first.
        order = np.argsort(-rows, kind="stable")
        wires = tuple(int(w) for w in order[: CATALOG[name].arity])
        gates.append(Gate(name, wires))
    return Circuit(n_qubits, tuple(gates))
