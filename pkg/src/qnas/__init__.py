"""Quantum neural architecture search with circuit metrics and Bayesian optimization."""

from .gates import CATALOG, Circuit, Gate, GateType, random_circuit
from .simulate import apply_circuit, circuit_unitary, gate_unitary

__all__ = [
    "CATALOG",
    "Circuit",
    "Gate",
    "GateType",
    "random_circuit",
    "apply_circuit",
    "circuit_unitary",
    "gate_unitary",
]

__version__ = "0.1.0"
