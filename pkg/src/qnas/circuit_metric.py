"""Optimal-transport distance between circuit architectures.

Gate masses (parameter count times unitary degrees of freedom, shared along
runs of identical consecutive gates, with fixed gates carrying an eta
fraction of the parametrized total) are matched between the two circuits'
DAGs under a ground cost combining the gate distance and a structural
dissimilarity from path-length profiles.  A null gate per circuit absorbs
unmatched mass at unit cost.  The distance is the optimum of the resulting
balanced transportation problem, solved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .dag import CircuitDag, circuit_to_dag
from .gates import Circuit
from .gate_metric import GateDistanceTable

ETA = 0.1          # fixed-gate fraction of the parametrized layer mass
NULL_COST = 1.0    # cost of matching any gate to the null gate
BIG_M = 1.0e6      # stands in for the infinite fixed/parametrized mismatch
_SIMPLEX_MAX_ITER = 200_000


@dataclass(frozen=True)
class MassAssignment:
    masses: np.ndarray
    total: float


def assign_masses(circuit: Circuit) -> MassAssignment:
    """Per-gate computation masses with run sharing.

    A run is a maximal chain of consecutive gates of identical type and
    identical wires with no intervening gate on those wires; its members
    split the base mass equally.
    """
    n_gates = circuit.n_gates
    masses = np.zeros(n_gates)
    run_id = np.arange(n_gates)
    run_sizes = np.ones(n_gates, dtype=int)
    last_on_wire: dict[int, int] = {}
    for i, g in enumerate(circuit.gates):
        preds = {last_on_wire.get(w) for w in g.wires}
        if len(preds) == 1:
            j = preds.pop()
            if j is not None and circuit.gates[j].name == g.name \
                    and circuit.gates[j].wires == g.wires:
                run_id[i] = run_id[j]
                run_sizes[run_id[i]] += 1
        for w in g.wires:
            last_on_wire[w] = i

    param_total = 0.0
    for i, g in enumerate(circuit.gates):
        if g.parametrized:
            dim = 2 ** len(g.wires)
            base = g.gate_type.param_dim * (dim * dim - 1)
            masses[i] = base / run_sizes[run_id[i]]
            param_total += masses[i]
    fixed_idx = [i for i, g in enumerate(circuit.gates) if not g.parametrized]
    if fixed_idx:
        each = ETA * param_total / len(fixed_idx)
        for i in fixed_idx:
            masses[i] = each
    return MassAssignment(masses, float(masses.sum()))


def path_profile(dag: CircuitDag) -> np.ndarray:
    """Per-gate path statistics delta[s, t, q] for s in (sp, lp, avg),
    t in (ip, op) and qubit q.

    Path length counts edges (equivalently, nodes hopped through including
    the endpoint gate).  A missing path gets the longest path length of the
    entire DAG.
    """
    n, m = dag.n_qubits, dag.n_gates
    nodes = [f"in:q{q}" for q in range(n)] + [f"g{i}" for i in range(m)] \
        + [f"out:q{q}" for q in range(n)]
    index = {v: i for i, v in enumerate(nodes)}
    size = len(nodes)
    adj_fwd: list[list[int]] = [[] for _ in range(size)]
    adj_rev: list[list[int]] = [[] for _ in range(size)]
    for e in dag.edges:
        adj_fwd[index[e.src]].append(index[e.dst])
        adj_rev[index[e.dst]].append(index[e.src])
    topo = list(range(size))  # inputs, gates in circuit order, outputs: already topological

    def stats_from(source: int, adj, order):
        sp = np.full(size, np.inf)
        lp = np.full(size, -np.inf)
        npaths = np.zeros(size)
        lensum = np.zeros(size)
        sp[source] = 0.0
        lp[source] = 0.0
        npaths[source] = 1.0
        for v in order:
            if npaths[v] == 0:
                continue
            for w in adj[v]:
                sp[w] = min(sp[w], sp[v] + 1)
                lp[w] = max(lp[w], lp[v] + 1)
                npaths[w] += npaths[v]
                lensum[w] += lensum[v] + npaths[v]
        avg = np.divide(lensum, npaths, out=np.zeros(size), where=npaths > 0)
        return sp, lp, avg, npaths

    # Global longest path over the whole DAG.
    global_lp = 0.0
    for q in range(n):
        lp = stats_from(index[f"in:q{q}"], adj_fwd, topo)[1]
        finite = lp[np.isfinite(lp)]
        if finite.size:
            global_lp = max(global_lp, float(finite.max()))

    out = np.full((m, 3, 2, n), global_lp)
    for q in range(n):
        for t, (src, adj, order) in enumerate((
                (index[f"in:q{q}"], adj_fwd, topo),
                (index[f"out:q{q}"], adj_rev, topo[::-1]))):
            sp, lp, avg, npaths = stats_from(src, adj, order)
            for i in range(m):
                v = index[f"g{i}"]
                if npaths[v] > 0:
                    out[i, 0, t, q] = sp[v]
                    out[i, 1, t, q] = lp[v]
                    out[i, 2, t, q] = avg[v]
    return out


def structural_cost(profile1: np.ndarray, profile2: np.ndarray) -> np.ndarray:
    """(1/6n) sum of absolute path-profile differences per gate pair."""
    if profile1.shape[3] != profile2.shape[3]:
        raise ValueError("circuits must share the qubit count")
    n = profile1.shape[3]
    diff = np.abs(profile1[:, None, :, :, :] - profile2[None, :, :, :, :])
    return diff.sum(axis=(2, 3, 4)) / (6.0 * n)


def gtm_cost(c1: Circuit, c2: Circuit, table: GateDistanceTable) -> np.ndarray:
    """Gate-type mismatch costs; inf marks forbidden fixed/parametrized matches."""
    out = np.empty((c1.n_gates, c2.n_gates))
    for i, g1 in enumerate(c1.gates):
        for j, g2 in enumerate(c2.gates):
            out[i, j] = table.gate_distance(g1, g2)
    return out


@dataclass
class TransportResult:
    distance: float
    normalized: float
    plan: np.ndarray
    cost: np.ndarray
    y1: np.ndarray
    y2: np.ndarray


def _solve_transport(cost: np.ndarray, y1: np.ndarray, y2: np.ndarray) -> np.ndarray:
    flow, status = backend.transport_simplex(cost, y1, y2, _SIMPLEX_MAX_ITER)
    if status != 0:  # pragma: no cover - safety net, not reached in practice
        from scipy.optimize import linprog
        m, n = cost.shape
        a_eq = np.zeros((m + n, m * n))
        for i in range(m):
            a_eq[i, i * n:(i + 1) * n] = 1.0
        for j in range(n):
            a_eq[m + j, j::n] = 1.0
        res = linprog(cost.ravel(), A_eq=a_eq, b_eq=np.concatenate([y1, y2]),
                      method="highs")
        if not res.success:
            raise RuntimeError("transport problem infeasible (internal error)")
        flow = res.x.reshape(m, n)
    return flow


def ot_transport(c1: Circuit, c2: Circuit, nu: float,
                 table: GateDistanceTable) -> TransportResult:
    """Solve the matching program between two circuits on the same register."""
    if c1.n_qubits != c2.n_qubits:
        raise ValueError("circuits must share the qubit count")
    ma1, ma2 = assign_masses(c1), assign_masses(c2)
    if ma1.total <= 0 or ma2.total <= 0:
        raise ValueError("total mass must be positive")
    n1, n2 = c1.n_gates, c2.n_gates
    mix = gtm_cost(c1, c2, table)
    if nu != 0.0:
        str_cost = structural_cost(path_profile(circuit_to_dag(c1)),
                                   path_profile(circuit_to_dag(c2)))
        mix = np.where(np.isinf(mix), BIG_M, mix + nu * str_cost)
    else:
        mix = np.where(np.isinf(mix), BIG_M, mix)
    cost = np.empty((n1 + 1, n2 + 1))
    cost[:n1, :n2] = mix
    cost[:n1, n2] = NULL_COST
    cost[n1, :n2] = NULL_COST
    cost[n1, n2] = 0.0
    y1 = np.concatenate([ma1.masses, [ma2.total]])
    y2 = np.concatenate([ma2.masses, [ma1.total]])
    flow = _solve_transport(cost, y1, y2)
    total = ma1.total + ma2.total
    if flow[:n1, :n2][mix >= BIG_M].sum() > 1e-9 * total:
        raise RuntimeError("optimal plan routed mass through a forbidden match")
    if np.abs(flow.sum(axis=1) - y1).max() > 1e-8 * total \
            or np.abs(flow.sum(axis=0) - y2).max() > 1e-8 * total:
        raise RuntimeError("transport plan violates mass conservation")
    value = float((flow * cost).sum())
    return TransportResult(value, value / total, flow, cost, y1, y2)


def ot_distance(c1: Circuit, c2: Circuit, nu: float = 0.1,
                normalized: bool = False,
                table: GateDistanceTable | None = None) -> float:
    if table is None:
        from .gate_metric import cached_table
        table = cached_table(c1.n_qubits)
    res = ot_transport(c1, c2, nu, table)
    return res.normalized if normalized else res.distance


def distance_matrices(circuits: list[Circuit], nus: list[float],
                      normalized_flags: list[bool],
                      table: GateDistanceTable) -> list[np.ndarray]:
    """One symmetric zero-diagonal matrix per (nu, normalized) pair."""
    k = len(circuits)
    raw = {nu: np.zeros((k, k)) for nu in set(nus)}
    norm = {nu: np.zeros((k, k)) for nu in set(nus)}
    for nu in set(nus):
        for i in range(k):
            for j in range(i + 1, k):
                res = ot_transport(circuits[i], circuits[j], nu, table)
                raw[nu][i, j] = raw[nu][j, i] = res.distance
                norm[nu][i, j] = norm[nu][j, i] = res.normalized
    return [norm[nu] if flag else raw[nu] for nu, flag in zip(nus, normalized_flags)]
