"""Weighted MaxCut objective: trained, cut-normalized Hamiltonian values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..gates import Circuit, Gate
from ..simulate import apply_circuit, zero_state
from .training import train_circuit


@dataclass(frozen=True)
class WeightedGraph:
    weights: np.ndarray  # symmetric, zero diagonal, entries in 0..9

    @property
    def n_nodes(self) -> int:
        return self.weights.shape[0]

    def edges(self):
        n = self.n_nodes
        for i in range(n):
            for j in range(i + 1, n):
                if self.weights[i, j] != 0:
                    yield i, j, float(self.weights[i, j])


def maxcut_instance(n: int = 9, seed: int = 0) -> WeightedGraph:
    """Random graph with integer weights uniform over {0..9}; zero weight
    means no edge.  Degenerate all-zero draws are redrawn."""
    rng = np.random.default_rng(seed)
    while True:
        w = np.zeros((n, n), dtype=int)
        iu = np.triu_indices(n, k=1)
        w[iu] = rng.integers(0, 10, size=len(iu[0]))
        w = w + w.T
        g = WeightedGraph(w)
        if brute_force_maxcut(g) > 0:
            return g


def cut_values(g: WeightedGraph) -> np.ndarray:
    """C(x) for every bitstring x (qubit 0 = most significant bit)."""
    n = g.n_nodes
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    vals = np.zeros(1 << n)
    for i, j, w in g.edges():
        vals += w * (bits[:, i] ^ bits[:, j])
    return vals


def brute_force_maxcut(g: WeightedGraph) -> float:
    """Max over all bipartitions via the vectorized table."""
    if g.n_nodes > 20:
        raise ValueError("brute force limited to 20 nodes")
    return float(cut_values(g).max())


def brute_force_maxcut_loop(g: WeightedGraph) -> float:
    """Independent per-bitstring enumeration (sanity duplicate)."""
    n = g.n_nodes
    edges = list(g.edges())
    best = 0.0
    for x in range(1 << n):
        c = 0.0
        for i, j, w in edges:
            if ((x >> (n - 1 - i)) ^ (x >> (n - 1 - j))) & 1:
                c += w
        best = max(best, c)
    return best


def hamiltonian_expectation(circuit: Circuit, params, diag: np.ndarray) -> float:
    """<0| U^dag H U |0> for the diagonal Hamiltonian given by `diag`."""
    state = apply_circuit(circuit, params, zero_state(circuit.n_qubits))
    return float(diag @ (np.abs(state) ** 2))


def maxcut_objective(circuit: Circuit, graphs: list[WeightedGraph],
                     rng: np.random.Generator | None = None,
                     restarts: int = 3) -> float:
    """Mean over graphs of the trained, optimum-normalized cut value."""
    rng = rng or np.random.default_rng(0)
    total = 0.0
    for g in graphs:
        if g.n_nodes != circuit.n_qubits:
            raise ValueError("graph size does not match the circuit")
        diag = cut_values(g)
        best = brute_force_maxcut(g)

        def loss(theta):
            return -hamiltonian_expectation(circuit, theta, diag) / best

        res = train_circuit(loss, circuit.param_count, rng, restarts=restarts)
        total += -res.value
    return total / len(graphs)


@dataclass(frozen=True)
class SharedParamCircuit:
    """Circuit whose gate angles are shared layer parameters times fixed
    multipliers (used by the trotterized baseline ansatz)."""

    circuit: Circuit
    param_index: tuple[int, ...]  # per parametrized gate, the layer-parameter id
    multiplier: tuple[float, ...]
    n_shared: int

    def expand(self, shared: np.ndarray) -> np.ndarray:
        return np.array([shared[i] * m for i, m in zip(self.param_index,
                                                       self.multiplier)])


def maxcut_ansatz(g: WeightedGraph, depth: int) -> SharedParamCircuit:
    """Trotterized ansatz: uniform superposition, then per layer one shared
    cost parameter scaling an RZZ per nonzero edge and one shared mixer
    parameter on an RX per qubit."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = g.n_nodes
    gates = [Gate("H", (q,)) for q in range(n)]
    pidx: list[int] = []
    mult: list[float] = []
    for layer in range(depth):
        for i, j, w in g.edges():
            gates.append(Gate("RZZ", (i, j)))
            pidx.append(2 * layer)
            mult.append(w)
        for q in range(n):
            gates.append(Gate("RX", (q,)))
            pidx.append(2 * layer + 1)
            mult.append(1.0)
    return SharedParamCircuit(Circuit(n, tuple(gates)), tuple(pidx), tuple(mult),
                              2 * depth)


def maxcut_ansatz_value(g: WeightedGraph, depth: int,
                        rng: np.random.Generator | None = None,
                        restarts: int = 3) -> float:
    """Trained normalized cut value of the depth-L ansatz on one graph."""
    rng = rng or np.random.default_rng(0)
    spc = maxcut_ansatz(g, depth)
    diag = cut_values(g)
    best = brute_force_maxcut(g)

    def loss(shared):
        return -hamiltonian_expectation(spc.circuit, spc.expand(shared), diag) / best

    res = train_circuit(loss, spc.n_shared, rng, restarts=restarts)
    return -res.value
