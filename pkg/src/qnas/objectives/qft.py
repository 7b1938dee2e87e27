"""Fourier-transform simulation objective: mean anchor fidelity."""

from __future__ import annotations

import numpy as np

from ..gates import Circuit
from ..mub import build_mub
from ..simulate import apply_circuit
from .training import TrainResult, train_circuit


def qft_unitary(n: int) -> np.ndarray:
    """U[t, s] = exp(2 pi i s t / d) / sqrt(d) on d = 2^n basis states."""
    if n < 1:
        raise ValueError("n must be positive")
    d = 1 << n
    st = np.outer(np.arange(d), np.arange(d))
    return np.exp(2j * np.pi * st / d) / np.sqrt(d)


def mean_anchor_fidelity(circuit: Circuit, params, target: np.ndarray,
                         anchors: np.ndarray) -> float:
    """(1/K) sum_k |<psi_k| target^dag U(theta) |psi_k>|^2."""
    outs = apply_circuit(circuit, params, anchors.T)     # columns per anchor
    refs = target @ anchors.T
    amps = np.sum(refs.conj() * outs, axis=0)
    return float(np.mean(np.abs(amps) ** 2))


def qft_objective(circuit: Circuit, rng: np.random.Generator | None = None,
                  restarts: int = 3) -> float:
    """Best trained mean fidelity against the same-size Fourier unitary."""
    rng = rng or np.random.default_rng(0)
    target = qft_unitary(circuit.n_qubits)
    anchors = build_mub(circuit.n_qubits).anchors

    def loss(theta):
        return -mean_anchor_fidelity(circuit, theta, target, anchors)

    result = train_circuit(loss, circuit.param_count, rng, restarts=restarts)
    return -result.value


def qft_objective_trained(circuit: Circuit, rng: np.random.Generator | None = None,
                          restarts: int = 3) -> TrainResult:
    rng = rng or np.random.default_rng(0)
    target = qft_unitary(circuit.n_qubits)
    anchors = build_mub(circuit.n_qubits).anchors

    def loss(theta):
        return -mean_anchor_fidelity(circuit, theta, target, anchors)

    return train_circuit(loss, circuit.param_count, rng, restarts=restarts)
