import math

import numpy as np
import pytest
from scipy.optimize import linprog

from qnas.circuit_metric import (
    assign_masses,
    distance_matrices,
    gtm_cost,
    ot_distance,
    ot_transport,
    path_profile,
    structural_cost,
)
from qnas.dag import circuit_to_dag
from qnas.gates import Circuit, Gate, random_circuit
from qnas.gate_metric import GateDistanceTable, ShapeConfig

# 4-qubit circuits mirroring the worked three-circuit example: (b) adds an
# RX on q1 and duplicates the CRZ pair; (c) swaps the CRZ for a CRY.
CIRC_A = Circuit(4, (
    Gate("H", (0,)),
    Gate("RZ", (0,)),
    Gate("RY", (1,)),
    Gate("RX", (3,)),
    Gate("CRZ", (2, 3)),
    Gate("RXX", (0, 1)),
    Gate("CRY", (1, 2)),
    Gate("RZ", (2,)),
))
CIRC_B = Circuit(4, (
    Gate("H", (0,)),
    Gate("RZ", (0,)),
    Gate("RY", (1,)),
    Gate("RX", (1,)),
    Gate("RX", (3,)),
    Gate("CRZ", (2, 3)),
    Gate("CRZ", (2, 3)),
    Gate("RXX", (0, 1)),
    Gate("CRY", (1, 2)),
    Gate("RZ", (2,)),
))
CIRC_C = Circuit(4, (
    Gate("H", (0,)),
    Gate("RZ", (0,)),
    Gate("RY", (1,)),
    Gate("RX", (3,)),
    Gate("CRY", (2, 3)),
    Gate("RXX", (0, 1)),
    Gate("CRY", (1, 2)),
    Gate("RZ", (2,)),
))

EXAMPLE = Circuit(4, (
    Gate("RZ", (3,)),
    Gate("X", (1,)),
    Gate("CY", (0, 3)),
    Gate("CRX", (1, 2)),
    Gate("RXX", (0, 1)),
))


@pytest.fixture(scope="module")
def table4():
    return GateDistanceTable(4, per_class_shape=True).build()


def test_single_rotation_mass():
    ma = assign_masses(Circuit(1, (Gate("RX", (0,)),)))
    assert ma.masses.tolist() == [3.0]
    assert ma.total == 3.0


def test_consecutive_crz_share():
    ma = assign_masses(Circuit(4, (Gate("CRZ", (2, 3)), Gate("CRZ", (2, 3)))))
    assert ma.masses.tolist() == [7.5, 7.5]


def test_reversed_wires_do_not_share():
    ma = assign_masses(Circuit(4, (Gate("CRZ", (2, 3)), Gate("CRZ", (3, 2)))))
    assert ma.masses.tolist() == [15.0, 15.0]


def test_intervening_gate_breaks_run():
    ma = assign_masses(Circuit(2, (Gate("RX", (0,)), Gate("H", (0,)), Gate("RX", (0,)))))
    assert ma.masses[0] == 3.0 and ma.masses[2] == 3.0


def test_run_of_three_shares():
    ma = assign_masses(Circuit(1, (Gate("RZ", (0,)),) * 3))
    assert np.allclose(ma.masses, 1.0)


def test_fixed_gate_mass_fraction():
    ma = assign_masses(Circuit(2, (Gate("H", (0,)), Gate("RX", (1,)))))
    assert np.isclose(ma.masses[0], 0.3)
    assert np.isclose(ma.total, 3.3)


def test_fixed_only_circuit_gets_zero_mass():
    ma = assign_masses(Circuit(2, (Gate("H", (0,)), Gate("CX", (0, 1)))))
    assert ma.total == 0.0


def test_example_totals():
    assert np.isclose(assign_masses(CIRC_A).total, 62.7)
    assert np.isclose(assign_masses(CIRC_B).total, 66.0)
    assert np.isclose(assign_masses(CIRC_C).total, 62.7)


def test_path_profile_worked_example():
    prof = path_profile(circuit_to_dag(EXAMPLE))
    cy = 2  # gate index of CY
    assert np.allclose(prof[cy, :, 0, 3], 2.0)  # from q3 input: two hops
    assert np.allclose(prof[cy, :, 1, 2], 4.0)  # no path to q2 output: global lp
    # and the global longest path of this DAG is indeed 4
    assert prof.max() == 4.0


def test_path_profile_single_gate():
    prof = path_profile(circuit_to_dag(Circuit(2, (Gate("CX", (0, 1)),))))
    assert np.allclose(prof[0, :, 0, 0], 1.0)
    assert np.allclose(prof[0, :, 1, 1], 1.0)


def test_path_profile_ordering():
    rng = np.random.default_rng(0)
    for _ in range(10):
        prof = path_profile(circuit_to_dag(random_circuit(4, 8, rng)))
        assert (prof[:, 0] <= prof[:, 2] + 1e-12).all()  # sp <= avg
        assert (prof[:, 2] <= prof[:, 1] + 1e-12).all()  # avg <= lp


def test_structural_cost_identical_zero_diagonal():
    p = path_profile(circuit_to_dag(EXAMPLE))
    c = structural_cost(p, p)
    assert np.allclose(np.diag(c), 0.0)


def test_structural_cost_dimension_error():
    p1 = path_profile(circuit_to_dag(Circuit(2, (Gate("H", (0,)),))))
    p2 = path_profile(circuit_to_dag(Circuit(3, (Gate("H", (0,)),))))
    with pytest.raises(ValueError):
        structural_cost(p1, p2)


def test_gtm_cost_values(table4):
    c1 = Circuit(4, (Gate("CRZ", (2, 3)), Gate("H", (0,))))
    c2 = Circuit(4, (Gate("CRY", (2, 3)), Gate("RX", (0,))))
    m = gtm_cost(c1, c2, table4)
    assert abs(m[0, 0] - 0.3535) < 1e-3
    assert math.isinf(m[1, 1])
    same = gtm_cost(c1, c1, table4)
    assert abs(same[0, 0]) < 1e-6


def test_worked_distances(table4):
    d_ab = ot_distance(CIRC_A, CIRC_B, nu=0.0, table=table4)
    d_ac = ot_distance(CIRC_A, CIRC_C, nu=0.0, table=table4)
    d_bc = ot_distance(CIRC_B, CIRC_C, nu=0.0, table=table4)
    assert abs(d_ab - 3.300) < 1e-3
    assert abs(d_ac - 5.303) < 1e-3
    assert abs(d_bc - 8.603) < 1e-3
    assert abs(d_bc - (d_ab + d_ac)) < 1e-6
    n_ab = ot_distance(CIRC_A, CIRC_B, nu=0.0, normalized=True, table=table4)
    n_ac = ot_distance(CIRC_A, CIRC_C, nu=0.0, normalized=True, table=table4)
    n_bc = ot_distance(CIRC_B, CIRC_C, nu=0.0, normalized=True, table=table4)
    assert abs(n_ab - 0.026) < 0.003
    assert abs(n_ac - 0.042) < 0.003
    assert abs(n_bc - 0.066) < 0.003


def test_self_distance_zero(table4):
    assert ot_distance(CIRC_A, CIRC_A, nu=0.3, table=table4) < 1e-8


def test_zero_mass_rejected(table4):
    fixed_only = Circuit(2, (Gate("H", (0,)), Gate("CZ", (0, 1))))
    with pytest.raises(ValueError):
        ot_distance(fixed_only, CIRC_A, table=table4)


def test_qubit_count_mismatch(table4):
    with pytest.raises(ValueError):
        ot_distance(Circuit(2, (Gate("RX", (0,)),)), CIRC_A, table=table4)


def test_plan_mass_conservation(table4):
    res = ot_transport(CIRC_A, CIRC_B, 0.2, table4)
    total = res.y1.sum()
    assert np.abs(res.plan.sum(axis=1) - res.y1).max() < 1e-8 * total
    assert np.abs(res.plan.sum(axis=0) - res.y2).max() < 1e-8 * total
    assert abs((res.plan * res.cost).sum() - res.distance) < 1e-8


def test_against_linprog_oracle(table4):
    rng = np.random.default_rng(7)
    for _ in range(10):
        c1 = random_circuit(4, int(rng.integers(2, 7)), rng)
        c2 = random_circuit(4, int(rng.integers(2, 7)), rng)
        if assign_masses(c1).total == 0 or assign_masses(c2).total == 0:
            continue
        res = ot_transport(c1, c2, 0.4, table4)
        m, n = res.cost.shape
        a_eq = np.zeros((m + n, m * n))
        for i in range(m):
            a_eq[i, i * n:(i + 1) * n] = 1.0
        for j in range(n):
            a_eq[m + j, j::n] = 1.0
        ref = linprog(res.cost.ravel(), A_eq=a_eq,
                      b_eq=np.concatenate([res.y1, res.y2]), method="highs")
        assert ref.success
        assert abs(res.distance - ref.fun) < 1e-7 * max(1.0, abs(ref.fun))


def test_metric_properties_sampled(table4):
    rng = np.random.default_rng(11)
    for _ in range(10):
        cs = [random_circuit(4, 5, rng) for _ in range(3)]
        if any(assign_masses(c).total == 0 for c in cs):
            continue
        for nu in (0.1, 0.8):
            d01 = ot_distance(cs[0], cs[1], nu, table=table4)
            d10 = ot_distance(cs[1], cs[0], nu, table=table4)
            d02 = ot_distance(cs[0], cs[2], nu, table=table4)
            d12 = ot_distance(cs[1], cs[2], nu, table=table4)
            assert abs(d01 - d10) < 1e-8
            assert d02 <= d01 + d12 + 1e-8
            assert d01 >= 0


def test_perturbed_circuit_has_positive_distance(table4):
    rng = np.random.default_rng(23)
    for _ in range(5):
        c = random_circuit(4, 6, rng)
        if assign_masses(c).total == 0:
            continue
        from qnas.evolution import mutate  # local import: optional dependency order
        c2 = mutate(c, rng)
        if c2 == c or assign_masses(c2).total == 0:
            continue
        assert ot_distance(c, c2, 0.1, table=table4) > 1e-6


def test_deletion_changes_distance_boundedly(table4):
    rng = np.random.default_rng(5)
    base = Circuit(4, (Gate("RZ", (0,)), Gate("CRX", (1, 2)), Gate("RYY", (2, 3)),
                       Gate("RX", (1,))))
    other = random_circuit(4, 5, rng)
    ma = assign_masses(base)
    d_full = ot_distance(base, other, 0.0, table=table4)
    for drop in range(base.n_gates):
        reduced = Circuit(4, tuple(g for i, g in enumerate(base.gates) if i != drop))
        d_red = ot_distance(reduced, other, 0.0, table=table4)
        bound = ma.masses[drop] + abs(ma.total - assign_masses(reduced).total
                                      - ma.masses[drop]) + 1e-9
        assert abs(d_full - d_red) <= bound


def test_distance_matrices_shapes(table4):
    rng = np.random.default_rng(2)
    cs = [random_circuit(4, 4, rng) for _ in range(4)]
    cs = [c for c in cs if assign_masses(c).total > 0]
    mats = distance_matrices(cs, [0.1, 0.1, 0.4], [False, True, False], table4)
    assert len(mats) == 3
    for mat in mats:
        assert np.allclose(mat, mat.T)
        assert np.allclose(np.diag(mat), 0.0)
    single = distance_matrices(cs[:1], [0.1], [False], table4)
    assert single[0].shape == (1, 1) and single[0][0, 0] == 0.0
