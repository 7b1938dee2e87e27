import numpy as np
import pytest

from qnas.mub import (
    GaloisRing,
    MubSet,
    analytic_haar_fidelity,
    build_mub,
    gr_trace,
    haar_average_fidelity,
    teichmuller_set,
)


def haar_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_teichmuller_n1():
    t = teichmuller_set(1)
    assert t.shape == (2, 1)
    assert set(map(tuple, t)) == {(0,), (1,)}


def test_teichmuller_n2_xi_cubed_is_one():
    ring = GaloisRing(2)
    t = teichmuller_set(2)
    assert t.shape == (4, 2)
    xi = t[2]
    xi3 = ring.mul(ring.mul(xi, xi), xi)
    assert tuple(xi3) == (1, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_two_adic_decomposition_unique(n):
    ring = GaloisRing(n)
    t = ring.teichmuller()
    seen = set()
    for a in t:
        for b in t:
            elem = tuple((a + 2 * b) % 4)
            assert elem not in seen
            seen.add(elem)
    assert len(seen) == 4 ** n


def test_trace_of_zero_and_n1_identity():
    assert gr_trace([0, 0], 2) == 0
    for v in range(4):
        assert gr_trace([v], 1) == v


def test_trace_additive_n2_exhaustive():
    ring = GaloisRing(2)
    elems = [np.array([i, j]) for i in range(4) for j in range(4)]
    for x in elems:
        for y in elems:
            assert ring.trace((x + y) % 4) == (ring.trace(x) + ring.trace(y)) % 4


def test_invalid_degree_rejected():
    with pytest.raises(ValueError):
        GaloisRing(10)


def test_mub_n1_matches_pauli_eigenbases():
    m = build_mub(1)
    axes = {
        "Z": np.array([[1, 0], [0, 1]], dtype=complex),
        "X": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
        "Y": np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2),
    }
    assert m.n_anchors == 6
    for basis in m.bases:
        matched = False
        for cols in axes.values():
            fid = np.abs(basis @ cols.conj()) ** 2  # basis rows vs eigenvectors
            if np.allclose(np.sort(fid.max(axis=1)), 1.0, atol=1e-10):
                matched = True
        assert matched


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_mub_invariants(n):
    m = build_mub(n)
    d = m.dim
    assert m.bases.shape == (d + 1, d, d)
    assert m.n_anchors == d * (d + 1)
    for a in range(d + 1):
        gram = m.bases[a] @ m.bases[a].conj().T
        assert np.abs(gram - np.eye(d)).max() < 1e-10
        for b in range(a + 1, d + 1):
            fid = np.abs(m.bases[a] @ m.bases[b].conj().T) ** 2
            assert np.abs(fid - 1.0 / d).max() < 1e-10


def test_standard_basis_occupies_first_slots():
    for n in (1, 2, 3):
        m = build_mub(n)
        assert np.allclose(m.anchors[: m.dim], np.eye(m.dim))


def test_haar_fidelity_identity_and_pauli_z():
    m = build_mub(1)
    assert abs(haar_average_fidelity(np.eye(2, dtype=complex), m) - 1.0) < 1e-12
    z = np.diag([1.0, -1.0]).astype(complex)
    assert abs(haar_average_fidelity(z, m) - 1.0 / 3.0) < 1e-12


def test_haar_fidelity_matches_analytic_random():
    rng = np.random.default_rng(17)
    m = build_mub(2)
    for _ in range(20):
        u = haar_unitary(4, rng)
        assert abs(haar_average_fidelity(u, m) - analytic_haar_fidelity(u)) < 1e-10


def test_haar_fidelity_dim_mismatch():
    with pytest.raises(ValueError):
        haar_average_fidelity(np.eye(4), build_mub(1))
