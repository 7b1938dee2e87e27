import math

import numpy as np
import pytest
import scipy.linalg

from qnas.gates import CATALOG, Gate
from qnas.gate_metric import (
    GateDistanceTable,
    ShapeConfig,
    core_distance,
    gate_distance,
    hermitian_generator,
    shape_distance,
    shape_integral_mc,
)

CLASS_A = ["RX", "RY", "RZ", "RXX", "RYY", "RZZ"]
CLASS_B = ["CRX", "CRY", "CRZ"]


def wires_for(name, second=False):
    if CATALOG[name].arity == 1:
        return (1,) if second else (0,)
    return (0, 1)


@pytest.fixture(scope="module")
def table2():
    return GateDistanceTable(2).build()


def test_generator_rz():
    gd = hermitian_generator(Gate("RZ", (0,)), 1)
    assert np.allclose(gd.h, np.diag([-0.5, 0.5]))
    assert abs(gd.t - 1.0) < 1e-12


def test_generator_crz():
    gd = hermitian_generator(Gate("CRZ", (0, 1)), 2)
    expect = np.zeros((4, 4))
    expect[2, 2] = -0.5
    expect[3, 3] = 0.5
    assert np.allclose(gd.h, expect)
    assert abs(np.abs(np.linalg.eigvalsh(gd.h)).sum() - 1.0) < 1e-10


def test_generator_fixed_gate_reconstructs_unitary():
    for name in ("H", "X", "CX", "CZ"):
        wires = (0,) if CATALOG[name].arity == 1 else (0, 1)
        g = Gate(name, wires)
        gd = hermitian_generator(g, 2)
        from qnas.simulate import gate_unitary
        u = gate_unitary(g, None, 2)
        rec = scipy.linalg.expm(1j * gd.h * gd.t)
        # compare up to global phase
        idx = np.unravel_index(np.abs(u).argmax(), u.shape)
        phase = rec[idx] / u[idx]
        assert abs(abs(phase) - 1) < 1e-8
        assert np.abs(rec - phase * u).max() < 1e-8


def test_generator_reconstructs_parametrized_family():
    for name, wires in (("RX", (0,)), ("CRY", (0, 1)), ("RZZ", (1, 0))):
        g = Gate(name, wires)
        gd = hermitian_generator(g, 2)
        from qnas.simulate import gate_unitary
        for theta in (0.3, -1.7):
            u = gate_unitary(g, theta, 2)
            rec = scipy.linalg.expm(1j * gd.h * gd.t * theta)
            assert np.abs(rec - u).max() < 1e-8


def test_core_distance_identical_gates_zero():
    assert core_distance(Gate("RZ", (0,)), Gate("RZ", (0,)), 1) == 0.0


def test_core_distance_rz_rx():
    d = core_distance(Gate("RZ", (0,)), Gate("RX", (0,)), 1)
    assert abs(d - np.sqrt(2) / 2) < 1e-9


def test_core_distance_crz_cry():
    d = core_distance(Gate("CRZ", (0, 1)), Gate("CRY", (0, 1)), 2)
    assert abs(d - np.sqrt(2) / 2) < 1e-9


def test_core_distance_depends_on_wire_placement():
    same = core_distance(Gate("RZ", (0,)), Gate("RX", (0,)), 2)
    disjoint = core_distance(Gate("RZ", (0,)), Gate("RX", (1,)), 2)
    assert abs(same - disjoint) > 1e-3


def test_core_distance_invariant_to_system_size():
    # The same relative placement yields the same value at any n.
    d2 = core_distance(Gate("CRZ", (0, 1)), Gate("CRY", (0, 1)), 2)
    d6 = core_distance(Gate("CRZ", (1, 4)), Gate("CRY", (1, 4)), 6)
    assert abs(d2 - d6) < 1e-10
    d1 = core_distance(Gate("RZ", (0,)), Gate("RX", (0,)), 1)
    d5 = core_distance(Gate("RZ", (3,)), Gate("RX", (3,)), 5)
    assert abs(d1 - d5) < 1e-10


def test_shape_rx_ry_zero():
    s = shape_distance(Gate("RX", (0,)), Gate("RY", (0,)), 1)
    assert s.distance < 1e-6


def test_shape_fixed_pair_zero_and_mixed_inf():
    assert shape_distance(Gate("H", (0,)), Gate("X", (0,)), 1).distance == 0.0
    assert math.isinf(shape_distance(Gate("H", (0,)), Gate("RZ", (0,)), 1).distance)
    assert math.isinf(gate_distance(Gate("H", (0,)), Gate("RZ", (0,)), 1))


def test_shape_objective_monotone_per_update():
    trace = []
    shape_distance(Gate("RZ", (0,)), Gate("CRX", (0, 1)), 2,
                   ShapeConfig(restarts=2), monotone_trace=trace)
    assert len(trace) >= 2
    for seg in trace:
        diffs = np.diff(np.asarray(seg))
        assert (diffs <= 1e-10).all()


def test_shape_solution_satisfies_invariants():
    s = shape_distance(Gate("RX", (0,)), Gate("CRZ", (0, 1)), 2)
    d = s.v.shape[0]
    assert np.abs(s.v.conj().T @ s.v - np.eye(d)).max() < 1e-8
    assert np.abs(np.linalg.norm(s.m, axis=0) - 1.0).max() < 1e-10


def test_shape_self_distance_all_parametrized():
    for name in CLASS_A + CLASS_B:
        g = Gate(name, wires_for(name))
        assert shape_distance(g, g, 2).distance < 1e-6, name


def test_shape_symmetric():
    cfg = ShapeConfig(max_iters=600, restarts=4)
    for g1, g2 in [(Gate("RX", (0,)), Gate("CRZ", (0, 1))),
                   (Gate("RYY", (0, 1)), Gate("CRX", (1, 0)))]:
        d12 = shape_distance(g1, g2, 2, cfg).distance
        d21 = shape_distance(g2, g1, 2, cfg).distance
        assert abs(d12 - d21) < 1e-3


def test_shape_restart_stability():
    vals = [shape_distance(Gate("RZ", (0,)), Gate("CRY", (0, 1)), 2,
                           ShapeConfig(max_iters=1500, tol=1e-10, restarts=5, seed=s)).distance
            for s in range(5)]
    assert max(vals) - min(vals) < 1e-3


def test_shape_wire_invariance():
    cfg = ShapeConfig(max_iters=1500, tol=1e-10, restarts=6)
    placements = [((0,), (0, 1)), ((0,), (1, 0)), ((1,), (0, 2)), ((2,), (0, 1))]
    vals = [shape_distance(Gate("RZ", w1), Gate("CRZ", w2), 3, cfg).distance
            for w1, w2 in placements]
    assert max(vals) - min(vals) < 1e-3
    intra = [shape_distance(Gate("RX", w1), Gate("RY", (w1[0],)), 3, cfg).distance
             for w1, _ in placements[:2]]
    assert max(intra) < 1e-3


def test_shape_triangle_inequality_sampled():
    cfg = ShapeConfig(max_iters=1500, tol=1e-10, restarts=5)
    gates = [Gate("RX", (0,)), Gate("RZ", (0,)), Gate("CRY", (0, 1)),
             Gate("CRZ", (0, 1)), Gate("RZZ", (0, 1))]
    d = {}
    for i, a in enumerate(gates):
        for j, b in enumerate(gates):
            if i <= j:
                d[i, j] = d[j, i] = shape_distance(a, b, 2, cfg).distance
    for i in range(len(gates)):
        for j in range(len(gates)):
            for k in range(len(gates)):
                assert d[i, k] <= d[i, j] + d[j, k] + 1e-3


def test_gate_distance_golden_values(table2):
    dc, ds, dg = table2.lookup(Gate("CRZ", (0, 1)), Gate("CRY", (0, 1)))
    assert abs(dg - 0.3535) < 1e-3
    assert abs(gate_distance(Gate("RZ", (0,)), Gate("RX", (0,)), 1) - 0.3536) < 1e-3
    assert gate_distance(Gate("H", (0,)), Gate("H", (0,)), 1) == 0.0


def test_table_symmetric_and_complete(table2):
    rng = np.random.default_rng(1)
    from qnas.gates import random_gate
    for _ in range(200):
        g1, g2 = random_gate(2, rng), random_gate(2, rng)
        assert table2.lookup(g1, g2) == table2.lookup(g2, g1)


def test_table_intra_and_inter_class(table2):
    inter = []
    for (n1, w1, n2, w2), (dc, ds, dg) in table2.entries.items():
        c1 = "A" if n1 in CLASS_A else ("B" if n1 in CLASS_B else "F")
        c2 = "A" if n2 in CLASS_A else ("B" if n2 in CLASS_B else "F")
        if {c1, c2} <= {"A", "B"}:
            if c1 == c2:
                assert ds < 1e-3
            else:
                inter.append(ds)
    assert inter and max(inter) - min(inter) < 1e-3


def test_table_mixed_pairs_infinite(table2):
    assert math.isinf(table2.lookup(Gate("H", (0,)), Gate("RX", (0,)))[2])
    assert math.isinf(table2.lookup(Gate("CX", (0, 1)), Gate("CRZ", (0, 1)))[1])


def test_table_covers_random_9_qubit_pairs():
    table = GateDistanceTable(9, per_class_shape=True,
                              config=ShapeConfig(max_iters=50, restarts=1)).build()
    rng = np.random.default_rng(3)
    from qnas.gates import random_gate
    for _ in range(500):
        table.lookup(random_gate(9, rng), random_gate(9, rng))


def test_theorem1_finite_sum_bounds_integral():
    # For a pair with near-zero finite-sum distance, the Haar-integral form
    # at the optimizer's V (with per-state optimal counterparts) stays small.
    rng = np.random.default_rng(0)
    g1, g2 = Gate("RX", (0,)), Gate("RY", (0,))
    s = shape_distance(g1, g2, 1)
    args = (g2, g1) if s.swapped else (g1, g2)
    mc = shape_integral_mc(*args, 1, s.v, n_samples=200, rng=rng)
    assert s.distance < 1e-6
    assert mc < s.distance + 1e-2
