"""Gate catalog and circuit data model.

The catalog holds the 7 fixed gates (H, X, Y, Z, CX, CY, CZ) and the 9
one-parameter rotation gates (RX, RY, RZ, CRX, CRY, CRZ, RXX, RYY, RZZ).
For two-qubit gates the first wire is the control (or the first rotation
axis qubit for RXX/RYY/RZZ, where the order is immaterial).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

FIXED_GATE_NAMES = ("H", "X", "Y", "Z", "CX", "CY", "CZ")
PARAM_GATE_NAMES = ("RX", "RY", "RZ", "CRX", "CRY", "CRZ", "RXX", "RYY", "RZZ")
GATE_NAMES = FIXED_GATE_NAMES + PARAM_GATE_NAMES

_SINGLE_QUBIT = {"H", "X", "Y", "Z", "RX", "RY", "RZ"}


@dataclass(frozen=True)
class GateType:
    """One catalog entry: name, qubit arity and parametrization."""

    name: str
    arity: int
    parametrized: bool
    param_dim: int
    representative: float  # value used by the numeric matrix encoding


def _build_catalog() -> dict[str, GateType]:
    catalog = {}
    n_fixed = len(FIXED_GATE_NAMES)
    n_param = len(PARAM_GATE_NAMES)
    # Fixed gates get evenly spaced interior values in (0, 0.1), parametrized
    # gates in (0.1, 1), following the catalog order.
    for i, name in enumerate(FIXED_GATE_NAMES, start=1):
        rep = 0.1 * i / (n_fixed + 1)
        arity = 1 if name in _SINGLE_QUBIT else 2
        catalog[name] = GateType(name, arity, False, 0, rep)
    for j, name in enumerate(PARAM_GATE_NAMES, start=1):
        rep = 0.1 + 0.9 * j / (n_param + 1)
        arity = 1 if name in _SINGLE_QUBIT else 2
        catalog[name] = GateType(name, arity, True, 1, rep)
    return catalog


CATALOG: dict[str, GateType] = _build_catalog()
CATALOG_ORDER: dict[str, int] = {name: i for i, name in enumerate(GATE_NAMES)}


@dataclass(frozen=True)
class Gate:
    """A catalog gate placed on specific wires (control first)."""

    name: str
    wires: tuple[int, ...]

    def __post_init__(self):
        if self.name not in CATALOG:
            raise ValueError(f"unknown gate type {self.name!r}")
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        gt = CATALOG[self.name]
        if len(self.wires) != gt.arity:
            raise ValueError(f"{self.name} takes {gt.arity} wire(s), got {self.wires}")
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"wires must be distinct, got {self.wires}")
        if any(w < 0 for w in self.wires):
            raise ValueError(f"negative wire index in {self.wires}")

    @property
    def gate_type(self) -> GateType:
        return CATALOG[self.name]

    @property
    def parametrized(self) -> bool:
        return CATALOG[self.name].parametrized


@dataclass(frozen=True)
class Circuit:
    """An ordered gate sequence on n_qubits."""

    n_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.wires) >= self.n_qubits:
                raise ValueError(f"gate {g} exceeds n_qubits={self.n_qubits}")

    @property
    def param_count(self) -> int:
        return sum(1 for g in self.gates if g.parametrized)

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "gates": [{"type": g.name, "wires": list(g.wires)} for g in self.gates],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        gates = tuple(Gate(g["type"], tuple(g["wires"])) for g in d["gates"])
        return cls(int(d["n_qubits"]), gates)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "Circuit":
        return cls.from_dict(json.loads(s))


def concat(c1: Circuit, c2: Circuit) -> Circuit:
    """Concatenate two circuits on the same register (c1 applied first)."""
    if c1.n_qubits != c2.n_qubits:
        raise ValueError("qubit counts differ")
    return Circuit(c1.n_qubits, c1.gates + c2.gates)


def random_gate(n_qubits: int, rng: np.random.Generator) -> Gate:
    """Draw a gate type uniformly from the catalog with uniform distinct wires."""
    names = GATE_NAMES if n_qubits >= 2 else tuple(n for n in GATE_NAMES if n in _SINGLE_QUBIT)
    name = names[rng.integers(len(names))]
    arity = CATALOG[name].arity
    wires = tuple(rng.choice(n_qubits, size=arity, replace=False).tolist())
    return Gate(name, wires)


def random_circuit(n_qubits: int, n_gates: int, rng: np.random.Generator) -> Circuit:
    """Sample a circuit with gates drawn uniformly from the catalog."""
    if n_gates < 1:
        raise ValueError("n_gates must be >= 1")
    return Circuit(n_qubits, tuple(random_gate(n_qubits, rng) for _ in range(n_gates)))
