"""Evolutionary maximization of an acquisition function over circuit space.

Mutation changes one to four gates (distribution [0.4, 0.3, 0.2, 0.1]), each
change either replacing a random gate's type or redrawing its wires.  The
pool evolves for ceil(c_tau sqrt(t)) generations; every member spawns
ceil(c_off sqrt(tau)) offspring, survivors are the top half by acquisition
value plus a softmax-weighted sample of the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import CATALOG, GATE_NAMES, Circuit, Gate, random_circuit

_CHANGE_COUNTS = np.array([1, 2, 3, 4])
_CHANGE_PROBS = np.array([0.4, 0.3, 0.2, 0.1])
_SINGLE_NAMES = tuple(n for n in GATE_NAMES if CATALOG[n].arity == 1)


@dataclass(frozen=True)
class EvoConfig:
    c_tau: float = 5.0
    c_k: float = 4.0
    c_off: float = 4.0

    def generations(self, t: int) -> int:
        return max(1, math.ceil(self.c_tau * math.sqrt(max(1, t))))

    def pool_size(self, t: int) -> int:
        return max(2, math.ceil(self.c_k * math.sqrt(self.generations(t))))

    def offspring(self, t: int) -> int:
        return max(1, math.ceil(self.c_off * math.sqrt(self.generations(t))))


def _replace_type(gate: Gate, n_qubits: int, rng: np.random.Generator) -> Gate:
    names = GATE_NAMES if n_qubits >= 2 else _SINGLE_NAMES
    name = names[rng.integers(len(names))]
    new_arity = CATALOG[name].arity
    if new_arity == len(gate.wires):
        return Gate(name, gate.wires)
    if new_arity == 1:
        return Gate(name, (gate.wires[0],))
    others = [w for w in range(n_qubits) if w != gate.wires[0]]
    second = others[rng.integers(len(others))]
    return Gate(name, (gate.wires[0], second))


def _redraw_wires(gate: Gate, n_qubits: int, rng: np.random.Generator) -> Gate:
    wires = tuple(rng.choice(n_qubits, size=len(gate.wires), replace=False).tolist())
    return Gate(gate.name, wires)


def mutate(circuit: Circuit, rng: np.random.Generator,
           config: EvoConfig | None = None) -> Circuit:
    """Mutant with the same gate count and qubit count."""
    if circuit.n_gates == 0:
        raise ValueError("cannot mutate an empty circuit")
    n_changes = int(rng.choice(_CHANGE_COUNTS, p=_CHANGE_PROBS))
    gates = list(circuit.gates)
    for _ in range(n_changes):
        pos = int(rng.integers(len(gates)))
        if rng.random() < 0.5:
            gates[pos] = _replace_type(gates[pos], circuit.n_qubits, rng)
        else:
            gates[pos] = _redraw_wires(gates[pos], circuit.n_qubits, rng)
    return Circuit(circuit.n_qubits, tuple(gates))


def evolve(seed_pool: list[Circuit], acq, t: int, rng: np.random.Generator,
           config: EvoConfig | None = None) -> Circuit:
    """Return the best circuit seen while evolving the pool for tau(t)
    generations under acquisition function `acq` (maximized)."""
    if not seed_pool:
        raise ValueError("seed pool must not be empty")
    config = config or EvoConfig()
    tau = config.generations(t)
    k = config.pool_size(t)
    n_off = config.offspring(t)

    def acq_safe(c: Circuit) -> float:
        try:
            return float(acq(c))
        except Exception:
            return -np.inf

    pool = list(seed_pool)
    scores = [acq_safe(c) for c in pool]
    if len(pool) > k:
        order = np.argsort(scores)[::-1][:k]
        pool = [pool[i] for i in order]
        scores = [scores[i] for i in order]
    while len(pool) < k:
        parent = pool[rng.integers(len(pool))]
        child = mutate(parent, rng, config)
        pool.append(child)
        scores.append(acq_safe(child))

    best_idx = int(np.argmax(scores))
    best, best_val = pool[best_idx], scores[best_idx]
    for _ in range(tau):
        cands = list(pool)
        cand_scores = list(scores)
        for parent in pool:
            for _ in range(n_off):
                child = mutate(parent, rng, config)
                cands.append(child)
                cand_scores.append(acq_safe(child))
        order = np.argsort(cand_scores)[::-1]
        n_top = k // 2
        keep = list(order[:n_top])
        rest = order[n_top:]
        n_rest = k - n_top
        vals = np.array([cand_scores[i] for i in rest])
        finite = np.isfinite(vals)
        # Softmax over the remaining candidates, temperature set by the
        # score spread so selection pressure is scale-free.
        probs = np.zeros(len(rest))
        if finite.any():
            scale = np.std(vals[finite])
            z = np.where(finite, vals - vals[finite].max(), -np.inf)
            if scale > 1e-12:
                w = np.exp(z / scale)
            else:
                w = finite.astype(float)
            probs = w / w.sum()
            chosen = rng.choice(len(rest), size=min(n_rest, int(finite.sum())),
                                replace=False, p=probs)
            keep.extend(rest[i] for i in chosen)
        pool = [cands[i] for i in keep]
        scores = [cand_scores[i] for i in keep]
        gen_best = int(np.argmax(scores))
        if scores[gen_best] > best_val:
            best, best_val = pool[gen_best], scores[gen_best]
    return best
