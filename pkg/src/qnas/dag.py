"""Directed-acyclic-graph view of a circuit.

Nodes are one input and one output node per qubit plus one node per gate.
Every edge carries the qubit wire it transports, and each gate node keeps
its incoming edges ordered by the gate's wire order, which makes the
conversion back to a gate sequence exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gates import CATALOG, Circuit, Gate


@dataclass(frozen=True)
class DagEdge:
    src: str
    dst: str
    qubit: int


@dataclass
class CircuitDag:
    n_qubits: int
    gate_names: list[str]                    # per gate node, catalog type name
    gate_wires: list[tuple[int, ...]]        # per gate node, wire order
    edges: list[DagEdge] = field(default_factory=list)

    @property
    def n_gates(self) -> int:
        return len(self.gate_names)

    def node_ids(self) -> list[str]:
        ins = [f"in:q{q}" for q in range(self.n_qubits)]
        outs = [f"out:q{q}" for q in range(self.n_qubits)]
        return ins + [f"g{i}" for i in range(self.n_gates)] + outs

    def incoming(self, node: str) -> list[DagEdge]:
        found = [e for e in self.edges if e.dst == node]
        if node.startswith("g"):
            wires = self.gate_wires[int(node[1:])]
            found.sort(key=lambda e: wires.index(e.qubit))
        return found

    def outgoing(self, node: str) -> list[DagEdge]:
        return [e for e in self.edges if e.src == node]

    def to_dot(self) -> str:
        lines = ["digraph circuit {"]
        for q in range(self.n_qubits):
            lines.append(f'  "in:q{q}" [shape=circle, label="q{q}"];')
            lines.append(f'  "out:q{q}" [shape=circle, label="q{q}"];')
        for i, name in enumerate(self.gate_names):
            lines.append(f'  "g{i}" [shape=box, label="{name}"];')
        for e in self.edges:
            lines.append(f'  "{e.src}" -> "{e.dst}" [label="q{e.qubit}"];')
        lines.append("}")
        return "\n".join(lines)


def circuit_to_dag(circuit: Circuit) -> CircuitDag:
    dag = CircuitDag(circuit.n_qubits, [g.name for g in circuit.gates],
                     [g.wires for g in circuit.gates])
    frontier = {q: f"in:q{q}" for q in range(circuit.n_qubits)}
    for i, g in enumerate(circuit.gates):
        node = f"g{i}"
        for w in g.wires:
            dag.edges.append(DagEdge(frontier[w], node, w))
            frontier[w] = node
    for q in range(circuit.n_qubits):
        dag.edges.append(DagEdge(frontier[q], f"out:q{q}", q))
    return dag


def dag_to_circuit(dag: CircuitDag) -> Circuit:
    """Rebuild the gate sequence: a gate is emitted once all of its wire
    predecessors are emitted, ties broken by original gate index."""
    _validate(dag)
    preds: dict[int, set[int]] = {}
    for i in range(dag.n_gates):
        preds[i] = set()
        for e in dag.incoming(f"g{i}"):
            if e.src.startswith("g"):
                preds[i].add(int(e.src[1:]))
    emitted: list[int] = []
    done: set[int] = set()
    while len(done) < dag.n_gates:
        ready = [i for i in range(dag.n_gates) if i not in done and preds[i] <= done]
        if not ready:
            raise ValueError("malformed DAG: cycle among gate nodes")
        nxt = min(ready)
        emitted.append(nxt)
        done.add(nxt)
    gates = tuple(Gate(dag.gate_names[i], dag.gate_wires[i]) for i in emitted)
    return Circuit(dag.n_qubits, gates)


def _validate(dag: CircuitDag):
    for i, (name, wires) in enumerate(zip(dag.gate_names, dag.gate_wires)):
        if name not in CATALOG:
            raise ValueError(f"unknown gate type {name!r} at node g{i}")
        inc = dag.incoming(f"g{i}")
        if sorted(e.qubit for e in inc) != sorted(wires):
            raise ValueError(f"node g{i} incoming wires {[e.qubit for e in inc]} "
                             f"do not match gate wires {wires}")
    # Every qubit must trace a single path from its input to its output node.
    for q in range(dag.n_qubits):
        node = f"in:q{q}"
        seen = 0
        while node != f"out:q{q}":
            nxt = [e for e in dag.outgoing(node) if e.qubit == q]
            if len(nxt) != 1:
                raise ValueError(f"dangling wire q{q} at node {node}")
            node = nxt[0].dst
            seen += 1
            if seen > dag.n_gates + 1:
                raise ValueError(f"wire q{q} does not reach its output node")
