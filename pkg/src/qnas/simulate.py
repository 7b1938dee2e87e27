"""Exact statevector and unitary simulation of catalog circuits.

Basis convention: qubit 0 is the most significant bit of the basis-state
index, so |q0 q1 ... q_{n-1}> maps to index sum_q q_k << (n-1-k).
"""

from __future__ import annotations

import numpy as np

from . import backend
from .gates import CATALOG, Circuit, Gate

_SQ2 = 1.0 / np.sqrt(2.0)

_FIXED_1Q = {
    "H": np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_PAULI = {"X": _FIXED_1Q["X"], "Y": _FIXED_1Q["Y"], "Z": _FIXED_1Q["Z"]}


def _controlled(u2: np.ndarray) -> np.ndarray:
    full = np.eye(4, dtype=complex)
    full[2:, 2:] = u2
    return full


def _rotation_1q(axis: str, theta: float) -> np.ndarray:
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    if axis == "X":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "Y":
        return np.array([[c, -s], [s, c]])
    return np.array([[c - 1j * s, 0], [0, c + 1j * s]])


def _rotation_2q(axis: str, theta: float) -> np.ndarray:
    # exp(-i theta (P (x) P) / 2) for P in {X, Y, Z}
    p = _PAULI[axis]
    pp = np.kron(p, p)
    return np.cos(theta / 2.0) * np.eye(4) - 1j * np.sin(theta / 2.0) * pp


def gate_matrix(name: str, theta: float | None = None) -> np.ndarray:
    """Unitary of a catalog gate in its own 2- or 4-dimensional space."""
    gt = CATALOG[name]
    if gt.parametrized:
        if theta is None:
            raise ValueError(f"{name} requires a rotation angle")
        if name in ("RX", "RY", "RZ"):
            return _rotation_1q(name[-1], theta)
        if name in ("CRX", "CRY", "CRZ"):
            return _controlled(_rotation_1q(name[-1], theta))
        return _rotation_2q(name[1], theta)
    if theta is not None:
        raise ValueError(f"{name} is a fixed gate, no angle expected")
    if gt.arity == 1:
        return _FIXED_1Q[name]
    return _controlled(_PAULI[name[-1]])


def embed_operator(op: np.ndarray, wires: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Embed a 1- or 2-wire operator into the full 2^n space (identity elsewhere).

    Built by basis-state index mapping so non-adjacent wires work directly.
    """
    k = len(wires)
    if op.shape != (1 << k, 1 << k):
        raise ValueError("operator shape does not match wire count")
    if max(wires) >= n_qubits:
        raise ValueError("wire index out of range")
    dim = 1 << n_qubits
    positions = [n_qubits - 1 - w for w in wires]  # first wire most significant
    idx = np.arange(dim)
    sub = np.zeros(dim, dtype=np.int64)
    mask = 0
    for t, pos in enumerate(positions):
        sub |= ((idx >> pos) & 1) << (k - 1 - t)
        mask |= 1 << pos
    rest = idx & ~mask
    spread = np.zeros(1 << k, dtype=np.int64)
    for c in range(1 << k):
        for t, pos in enumerate(positions):
            spread[c] |= ((c >> (k - 1 - t)) & 1) << pos
    full = np.zeros((dim, dim), dtype=complex)
    cols = rest[:, None] | spread[None, :]
    full[idx[:, None], cols] = op[sub, :]
    return full


def gate_unitary(gate: Gate, theta: float | None, n_qubits: int) -> np.ndarray:
    """Full 2^n unitary with the gate embedded on its wires."""
    return embed_operator(gate_matrix(gate.name, theta), gate.wires, n_qubits)


def _consume_params(circuit: Circuit, params) -> list[float | None]:
    params = np.atleast_1d(np.asarray(params, dtype=float)) if params is not None else np.empty(0)
    if params.size != circuit.param_count:
        raise ValueError(f"expected {circuit.param_count} parameters, got {params.size}")
    out: list[float | None] = []
    it = iter(params)
    for g in circuit.gates:
        out.append(float(next(it)) if g.parametrized else None)
    return out


def _apply_gate_state(state: np.ndarray, u: np.ndarray, wires: tuple[int, ...], n_qubits: int):
    """Apply a small gate unitary in place to a 1-D statevector."""
    if len(wires) == 1:
        stride = 1 << (n_qubits - 1 - wires[0])
        backend.apply_1q(state, u[0, 0], u[0, 1], u[1, 0], u[1, 1], stride)
    else:
        mask_hi = 1 << (n_qubits - 1 - wires[0])
        mask_lo = 1 << (n_qubits - 1 - wires[1])
        backend.apply_2q(state, np.ascontiguousarray(u), mask_hi, mask_lo)


def _apply_gate_batch(batch: np.ndarray, u: np.ndarray, wires: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Apply a small gate unitary to columns of a (2^n, m) array."""
    k = len(wires)
    ncols = batch.shape[1]
    t = batch.reshape((2,) * n_qubits + (ncols,))
    ut = u.reshape((2,) * (2 * k))
    t = np.tensordot(ut, t, axes=(tuple(range(k, 2 * k)), tuple(wires)))
    t = np.moveaxis(t, tuple(range(k)), tuple(wires))
    return t.reshape(1 << n_qubits, ncols)


def apply_circuit(circuit: Circuit, params, state: np.ndarray) -> np.ndarray:
    """Apply the circuit gate by gate to a statevector (or state columns)."""
    dim = 1 << circuit.n_qubits
    if state.shape[0] != dim:
        raise ValueError(f"state dimension {state.shape[0]} != {dim}")
    thetas = _consume_params(circuit, params)
    out = np.array(state, dtype=complex, copy=True)
    if out.ndim == 1:
        for g, th in zip(circuit.gates, thetas):
            _apply_gate_state(out, gate_matrix(g.name, th), g.wires, circuit.n_qubits)
    else:
        for g, th in zip(circuit.gates, thetas):
            out = _apply_gate_batch(out, gate_matrix(g.name, th), g.wires, circuit.n_qubits)
    return out


def circuit_unitary(circuit: Circuit, params) -> np.ndarray:
    """Product of embedded gate unitaries, rightmost factor applied first."""
    dim = 1 << circuit.n_qubits
    return apply_circuit(circuit, params, np.eye(dim, dtype=complex))


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    d = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(d)) < tol)
