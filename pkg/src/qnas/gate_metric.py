"""Distance between two quantum gates: core + shape components.

Core distance compares the unit-nuclear-norm Hermitian generators of the two
embedded gates (half the nuclear norm of their difference).  Shape distance
measures the minimal misalignment of the two parametrized orbits over the
MUB anchor states, minimized over a global unitary V, per-anchor counterpart
states M, and per-term phases alpha by coordinate descent with closed-form
updates (phases: complex-angle alignment; V: unitary Procrustes from an SVD;
M columns: normalized sums).  The gate distance is the average of the two,
with an infinite sentinel whenever exactly one gate of the pair is fixed.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from dataclasses import dataclass, field

import numpy as np

from .gates import CATALOG, CATALOG_ORDER, Gate
from .mub import build_mub
from .simulate import embed_operator, gate_matrix

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _nuclear_norm_hermitian(h: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvalsh(h)).sum())


def _generator_direction(name: str) -> np.ndarray:
    """d/dtheta at theta = 0 of the one-parameter family, divided by i."""
    if name in ("RX", "RY", "RZ"):
        return -0.5 * _PAULI[name[-1]]
    if name in ("CRX", "CRY", "CRZ"):
        h = np.zeros((4, 4), dtype=complex)
        h[2:, 2:] = -0.5 * _PAULI[name[-1]]
        return h
    if name in ("RXX", "RYY", "RZZ"):
        p = _PAULI[name[1]]
        return -0.5 * np.kron(p, p)
    raise ValueError(f"{name} is not parametrized")


def _principal_log_hermitian(u: np.ndarray) -> np.ndarray:
    """H with U = exp(iH), eigenphases in (-pi, pi] and -1 mapped to +pi."""
    import scipy.linalg

    t, z = scipy.linalg.schur(u.astype(complex), output="complex")
    phases = np.angle(np.diag(t))
    phases[np.isclose(phases, -np.pi)] = np.pi
    h = (z * phases) @ z.conj().T
    return 0.5 * (h + h.conj().T)


@dataclass(frozen=True)
class GeneratorDecomposition:
    """Unit-nuclear-norm Hermitian H and scale t with U = exp(i H t)."""

    h: np.ndarray
    t: float


def hermitian_generator(gate: Gate, n_qubits: int) -> GeneratorDecomposition:
    """Normalized generator of the gate embedded in the full 2^n space.

    Parametrized gates use the theta-independent family derivative, so
    U(theta) = exp(i H t theta).  Fixed gates use the principal matrix
    logarithm of the embedded unitary.
    """
    if gate.parametrized:
        raw = embed_operator(_generator_direction(gate.name), gate.wires, n_qubits)
    else:
        raw = _principal_log_hermitian(
            embed_operator(gate_matrix(gate.name), gate.wires, n_qubits))
    norm = _nuclear_norm_hermitian(raw)
    if norm < 1e-12:
        raise ValueError(f"degenerate generator for {gate}")
    return GeneratorDecomposition(raw / norm, norm)


def core_distance(g1: Gate, g2: Gate, n_qubits: int) -> float:
    """Half the nuclear norm of the difference of normalized generators."""
    h1 = hermitian_generator(g1, n_qubits).h
    h2 = hermitian_generator(g2, n_qubits).h
    return 0.5 * _nuclear_norm_hermitian(h1 - h2)


# ---------------------------------------------------------------------------
# shape distance (alternating minimization)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShapeConfig:
    t_samples: int = 12
    max_iters: int = 200
    tol: float = 1e-8
    restarts: int = 3
    seed: int = 0


@dataclass
class ShapeSolution:
    distance: float
    v: np.ndarray | None = None
    m: np.ndarray | None = None
    alpha: np.ndarray | None = None
    iterations: int = 0
    converged: bool = True
    swapped: bool = False  # solution refers to the arguments in reversed order


def _haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _family_stack(gate: Gate, thetas: np.ndarray, n_qubits: int) -> np.ndarray:
    return np.stack([embed_operator(gate_matrix(gate.name, th), gate.wires, n_qubits)
                     for th in thetas])


def _objective(inner: np.ndarray, alpha: np.ndarray) -> float:
    # (1/2KT) sum ||e^{i a} psi - phi||^2 with unit vectors on both sides.
    return float(np.mean(1.0 - np.real(np.exp(-1j * alpha) * inner)))


def shape_distance(g1: Gate, g2: Gate, n_qubits: int,
                   config: ShapeConfig | None = None,
                   monotone_trace: list | None = None) -> ShapeSolution:
    """Minimal orbit misalignment of two gates over the MUB anchors.

    Both gates fixed: 0 without optimization.  Exactly one fixed: +inf
    sentinel.  Both parametrized: coordinate descent over alpha, V, alpha, M
    per argument order, restarted from several initializations of V.  The
    anchor states enter on the first gate's side while the counterpart
    states are free, so the optimum is slightly order-dependent; the
    distance is symmetrized as the minimum over both orders.
    """
    p1, p2 = g1.parametrized, g2.parametrized
    if not p1 and not p2:
        return ShapeSolution(0.0)
    if p1 != p2:
        return ShapeSolution(math.inf)
    fwd = _shape_directed(g1, g2, n_qubits, config, monotone_trace)
    if fwd.distance < 1e-10:
        return fwd
    rev = _shape_directed(g2, g1, n_qubits, config, monotone_trace)
    if rev.distance < fwd.distance:
        rev.swapped = True
        return rev
    return fwd


def _shape_directed(g1: Gate, g2: Gate, n_qubits: int,
                    config: ShapeConfig | None = None,
                    monotone_trace: list | None = None) -> ShapeSolution:
    config = config or ShapeConfig()
    rng = np.random.default_rng(config.seed)
    mub = build_mub(n_qubits)
    d = mub.dim
    k = mub.n_anchors
    t = config.t_samples
    thetas = 2.0 * np.pi * np.arange(t) / t
    u1 = _family_stack(g1, thetas, n_qubits)   # (T, d, d)
    u2 = _family_stack(g2, thetas, n_qubits)
    a1 = np.einsum("tij,kj->tik", u1, mub.anchors)        # U1(th_t)|psi_k>
    u2h = u2.conj().transpose(0, 2, 1)

    inits = [np.eye(d, dtype=complex)]
    inits += [_haar_unitary(d, rng) for _ in range(max(0, config.restarts - 1))]

    best = ShapeSolution(math.inf, converged=False)
    for v0 in inits:
        seg = None
        if monotone_trace is not None:
            seg = []
            monotone_trace.append(seg)
        v = v0.copy()
        # M from the closed-form update at alpha = 0.
        s = (u2h @ (v @ a1)).sum(axis=0)
        m = s / np.linalg.norm(s, axis=0, keepdims=True)
        alpha = np.zeros((k, t))
        prev = np.inf
        iters = 0
        converged = False
        for iters in range(1, config.max_iters + 1):
            va1 = v @ a1                                  # (T, d, K)
            b2 = u2 @ m
            inner = (va1.conj() * b2).sum(axis=1).T       # (K, T)
            alpha = np.angle(inner)
            if seg is not None:
                seg.append(_objective(inner, alpha))
            # V update: unitary Procrustes on the phased column stacks; the
            # cross matrix L1 L2^dag is accumulated per theta sample.
            phased = np.exp(1j * alpha.T)[:, None, :] * a1
            cross = (phased @ b2.conj().transpose(0, 2, 1)).sum(axis=0)
            r, _, th = np.linalg.svd(cross)
            v = th.conj().T @ r.conj().T
            va1 = v @ a1
            inner = (va1.conj() * b2).sum(axis=1).T
            alpha = np.angle(inner)
            if seg is not None:
                seg.append(_objective(inner, alpha))
            # M update: normalized phase-aligned sums per anchor.
            w = u2h @ va1                                 # (T, d, K)
            s = (np.exp(1j * alpha.T)[:, None, :] * w).sum(axis=0)
            norms = np.linalg.norm(s, axis=0)
            nz = norms > 1e-14
            m[:, nz] = s[:, nz] / norms[nz]
            b2 = u2 @ m
            inner = (va1.conj() * b2).sum(axis=1).T
            alpha = np.angle(inner)
            obj = _objective(inner, alpha)
            if seg is not None:
                seg.append(obj)
            if prev - obj < config.tol:
                converged = True
                prev = obj
                break
            prev = obj
        if prev < best.distance:
            best = ShapeSolution(float(prev), v, m.copy(), alpha.copy(), iters, converged)
        if best.distance < 1e-10:
            break
    return best


def gate_distance(g1: Gate, g2: Gate, n_qubits: int,
                  config: ShapeConfig | None = None) -> float:
    """(core + shape) / 2; +inf for a mixed fixed/parametrized pair."""
    ds = shape_distance(g1, g2, n_qubits, config).distance
    if math.isinf(ds):
        return math.inf
    return 0.5 * (core_distance(g1, g2, n_qubits) + ds)


def shape_integral_mc(g1: Gate, g2: Gate, n_qubits: int, v: np.ndarray,
                      n_samples: int = 1000, t_samples: int = 12,
                      rng: np.random.Generator | None = None) -> float:
    """Monte-Carlo estimate of the Haar-integral shape form at a given V.

    Each sampled state gets its own optimal counterpart state and phases,
    found by a short inner alternation (the per-state analogue of the M and
    alpha updates).
    """
    rng = rng or np.random.default_rng(0)
    d = 1 << n_qubits
    thetas = 2.0 * np.pi * np.arange(t_samples) / t_samples
    w = np.stack([
        embed_operator(gate_matrix(g2.name, th), g2.wires, n_qubits).conj().T
        @ v @ embed_operator(gate_matrix(g1.name, th), g1.wires, n_qubits)
        for th in thetas])
    total = 0.0
    for _ in range(n_samples):
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        cols = w @ psi                      # (T, d)
        phi = cols.sum(axis=0)
        phi /= np.linalg.norm(phi)
        for _ in range(50):
            ip = cols @ phi.conj()
            s = (np.exp(-1j * np.angle(ip))[:, None] * cols).sum(axis=0)
            nrm = np.linalg.norm(s)
            if nrm < 1e-14:
                break
            new_phi = s / nrm
            if np.linalg.norm(new_phi - phi) < 1e-12:
                phi = new_phi
                break
            phi = new_phi
        total += float(np.mean(1.0 - np.abs(cols @ phi.conj())))
    return total / n_samples


# ---------------------------------------------------------------------------
# pairwise table over canonical wire placements
# ---------------------------------------------------------------------------

def _relabel(wa, wb):
    """Rename wires by first occurrence across both tuples."""
    mapping: dict[int, int] = {}
    for w in (*wa, *wb):
        if w not in mapping:
            mapping[w] = len(mapping)
    return tuple(mapping[w] for w in wa), tuple(mapping[w] for w in wb)


def canonical_pair(name1: str, wires1: tuple[int, ...],
                   name2: str, wires2: tuple[int, ...]):
    """Order-and-relabel a gate pair so equivalent placements share one key."""
    ra1, rb1 = _relabel(wires1, wires2)
    ra2, rb2 = _relabel(wires2, wires1)
    key1 = (CATALOG_ORDER[name1], ra1, CATALOG_ORDER[name2], rb1)
    key2 = (CATALOG_ORDER[name2], ra2, CATALOG_ORDER[name1], rb2)
    idx1, w1, idx2, w2 = min(key1, key2)
    return GATE_NAME_BY_ORDER[idx1], w1, GATE_NAME_BY_ORDER[idx2], w2


GATE_NAME_BY_ORDER = {i: n for n, i in CATALOG_ORDER.items()}


def _placements(arity1: int, arity2: int, n_qubits: int):
    """Relative wire placements (first gate on leading wires) for a pair."""
    w1 = tuple(range(arity1))
    pool = range(min(n_qubits, arity1 + arity2))
    seen = set()
    for w2 in itertools.permutations(pool, arity2):
        key = _relabel(w1, w2)
        if key not in seen:
            seen.add(key)
            yield key


# Table-grade optimizer settings: more restarts and a tighter stop than the
# per-call defaults, so every inter-class entry lands in the common optimum.
TABLE_SHAPE_CONFIG = ShapeConfig(max_iters=1500, tol=1e-10, restarts=8)

_CLASS_A = {"RX", "RY", "RZ", "RXX", "RYY", "RZZ"}
_CLASS_B = {"CRX", "CRY", "CRZ"}


def _gate_class(name: str) -> str:
    if name in _CLASS_A:
        return "A"
    if name in _CLASS_B:
        return "B"
    return "F"


@dataclass
class GateDistanceTable:
    """Precomputed (d_core, d_shape, d_gate) per canonical gate pair.

    Core distances are computed per relative wire placement (they depend on
    it); the shape distance is wire-invariant, so it is optimized once per
    type pair at a reference placement and reused.  Shape runs in dimension
    2^min(n, 4): four qubits cover every relative placement of two gates.
    With ``per_class_shape`` the shape optimization additionally runs only
    once per class combination (rotations x controlled rotations), which is
    exact up to optimizer noise by the class-invariance of the distance and
    much faster for the large experiment tables.
    """

    n_qubits: int
    config: ShapeConfig = field(default_factory=lambda: TABLE_SHAPE_CONFIG)
    per_class_shape: bool = False
    entries: dict = field(default_factory=dict)

    def _shape_reference(self, n1: str, n2: str, shape_n: int) -> float:
        a1, a2 = CATALOG[n1].arity, CATALOG[n2].arity
        ref1 = tuple(range(a1))
        if a1 + a2 <= shape_n:
            ref2 = tuple(range(a1, a1 + a2))
        else:
            ref2 = tuple(range(shape_n - a2, shape_n))
        return shape_distance(Gate(n1, ref1), Gate(n2, ref2),
                              shape_n, self.config).distance

    def build(self) -> "GateDistanceTable":
        names = list(CATALOG)
        shape_n = min(self.n_qubits, 4)
        class_shape: dict[tuple[str, str], float] = {}
        for i, n1 in enumerate(names):
            for n2 in names[i:]:
                if self.per_class_shape:
                    ckey = tuple(sorted((_gate_class(n1), _gate_class(n2))))
                    if ckey not in class_shape:
                        class_shape[ckey] = self._shape_reference(n1, n2, shape_n)
                    ds = class_shape[ckey]
                else:
                    ds = self._shape_reference(n1, n2, shape_n)
                for w1, w2 in _placements(CATALOG[n1].arity, CATALOG[n2].arity,
                                          self.n_qubits):
                    key = canonical_pair(n1, w1, n2, w2)
                    if key in self.entries:
                        continue
                    kn1, kw1, kn2, kw2 = key
                    u = max((*kw1, *kw2)) + 1
                    dc = core_distance(Gate(kn1, kw1), Gate(kn2, kw2), u)
                    dg = math.inf if math.isinf(ds) else 0.5 * (dc + ds)
                    self.entries[key] = (dc, ds, dg)
        return self

    def lookup(self, g1: Gate, g2: Gate) -> tuple[float, float, float]:
        key = canonical_pair(g1.name, g1.wires, g2.name, g2.wires)
        if key not in self.entries:
            raise KeyError(f"no table entry for {key}")
        return self.entries[key]

    def gate_distance(self, g1: Gate, g2: Gate) -> float:
        return self.lookup(g1, g2)[2]

    def rows(self):
        for (n1, w1, n2, w2), (dc, ds, dg) in sorted(self.entries.items(),
                                                     key=lambda kv: (CATALOG_ORDER[kv[0][0]],
                                                                     CATALOG_ORDER[kv[0][2]],
                                                                     kv[0][1], kv[0][3])):
            yield n1, w1, n2, w2, dc, ds, dg


@lru_cache(maxsize=None)
def _cached_table(effective_n: int, per_class: bool) -> GateDistanceTable:
    return GateDistanceTable(effective_n, per_class_shape=per_class).build()


def cached_table(n_qubits: int, per_class_shape: bool = True) -> GateDistanceTable:
    """Session-cached table; tables for n >= 4 coincide, so n is clamped."""
    return _cached_table(min(n_qubits, 4), per_class_shape)
