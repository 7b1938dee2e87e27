"""Gaussian-process surrogate over circuit space.

The kernel is a double exponential over the optimal-transport distances,
k(x, x') = alpha exp(-sum_i beta_i d_i) + alpha_bar exp(-sum_i beta_bar_i
dbar_i), with one unnormalized and one normalized distance per structural
weight nu in NU_VALUES.  The kernel is not provably positive definite, so
the training Gram matrix gets an escalating diagonal jitter whenever the
Cholesky factorization fails; every jitter event is recorded for the audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize
from scipy.special import ndtr

from .circuit_metric import ot_transport
from .gates import Circuit
from .gate_metric import GateDistanceTable

NU_VALUES = (0.1, 0.2, 0.4, 0.8)
NOISE_FLOOR = 1e-8


@dataclass(frozen=True)
class KernelHyperparams:
    alpha: float
    alpha_bar: float
    beta: np.ndarray       # one rate per nu, unnormalized distances
    beta_bar: np.ndarray   # one rate per nu, normalized distances
    noise: float           # observation noise variance

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        object.__setattr__(self, "beta_bar", np.asarray(self.beta_bar, dtype=float))
        if self.alpha < 0 or self.alpha_bar < 0 or (self.beta < 0).any() \
                or (self.beta_bar < 0).any():
            raise ValueError("kernel hyperparameters must be non-negative")
        object.__setattr__(self, "noise", max(float(self.noise), NOISE_FLOOR))

    def to_vector(self) -> np.ndarray:
        return np.log(np.concatenate([[self.alpha, self.alpha_bar],
                                      self.beta, self.beta_bar, [self.noise]]))

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "KernelHyperparams":
        v = np.exp(np.asarray(v, dtype=float))
        k = len(NU_VALUES)
        return cls(v[0], v[1], v[2:2 + k], v[2 + k:2 + 2 * k], v[-1])


def default_hyperparams(y: np.ndarray, d_stack: np.ndarray,
                        dbar_stack: np.ndarray) -> KernelHyperparams:
    """Median-heuristic defaults from the observed distances and values."""
    var = float(np.var(y)) if len(y) > 1 else 1.0
    var = max(var, 1e-6)

    def med_rates(stack):
        rates = []
        for i in range(stack.shape[0]):
            nz = stack[i][stack[i] > 0]
            rates.append(1.0 / np.median(nz) if nz.size else 1.0)
        return np.array(rates)

    return KernelHyperparams(var / 2, var / 2, med_rates(d_stack),
                             med_rates(dbar_stack), 1e-4 * var)


class ObservationSet:
    """Evaluated circuits with cached pairwise distance stacks."""

    def __init__(self, table: GateDistanceTable, nus=NU_VALUES):
        self.table = table
        self.nus = tuple(nus)
        self.circuits: list[Circuit] = []
        self.y = np.zeros(0)
        k = len(self.nus)
        self.d = np.zeros((k, 0, 0))
        self.dbar = np.zeros((k, 0, 0))

    def __len__(self) -> int:
        return len(self.circuits)

    def pair_distances(self, c1: Circuit, c2: Circuit):
        d = np.empty(len(self.nus))
        dbar = np.empty(len(self.nus))
        for i, nu in enumerate(self.nus):
            res = ot_transport(c1, c2, nu, self.table)
            d[i] = res.distance
            dbar[i] = res.normalized
        return d, dbar

    def add(self, circuit: Circuit, value: float):
        n = len(self.circuits)
        k = len(self.nus)
        d = np.zeros((k, n + 1, n + 1))
        dbar = np.zeros((k, n + 1, n + 1))
        d[:, :n, :n] = self.d
        dbar[:, :n, :n] = self.dbar
        for j, other in enumerate(self.circuits):
            dv, dbv = self.pair_distances(circuit, other)
            d[:, n, j] = d[:, j, n] = dv
            dbar[:, n, j] = dbar[:, j, n] = dbv
        self.circuits.append(circuit)
        self.y = np.append(self.y, value)
        self.d = d
        self.dbar = dbar

    def query_distances(self, circuit: Circuit):
        """Distance stacks from a query circuit to every observation."""
        n = len(self.circuits)
        k = len(self.nus)
        d = np.empty((k, n))
        dbar = np.empty((k, n))
        for j, other in enumerate(self.circuits):
            d[:, j], dbar[:, j] = self.pair_distances(circuit, other)
        return d, dbar


def kernel_matrix(d_stack: np.ndarray, dbar_stack: np.ndarray,
                  hp: KernelHyperparams) -> np.ndarray:
    """Double-exponential kernel over stacked distances (first axis = nu)."""
    expo = np.tensordot(hp.beta, d_stack, axes=(0, 0))
    expo_bar = np.tensordot(hp.beta_bar, dbar_stack, axes=(0, 0))
    return hp.alpha * np.exp(-expo) + hp.alpha_bar * np.exp(-expo_bar)


@dataclass
class JitterAudit:
    events: list = field(default_factory=list)
    worst_negative_eig: float = 0.0

    def record(self, jitter: float, min_eig: float):
        self.events.append({"jitter": jitter, "min_eig": float(min_eig)})
        self.worst_negative_eig = min(self.worst_negative_eig, float(min_eig))


@dataclass
class GpPosterior:
    mean: np.ndarray
    var: np.ndarray


class GpModel:
    """Posterior machinery for a fixed observation set and hyperparameters."""

    def __init__(self, obs: ObservationSet, hp: KernelHyperparams,
                 audit: JitterAudit | None = None):
        if len(obs) < 1:
            raise ValueError("need at least one observation")
        self.obs = obs
        self.hp = hp
        self.audit = audit if audit is not None else JitterAudit()
        self.prior_mean = float(np.mean(obs.y))
        k_train = kernel_matrix(obs.d, obs.dbar, hp)
        k_x = k_train + hp.noise * np.eye(len(obs))
        self._chol = self._factor(k_x)
        self._alpha_vec = cho_solve(self._chol, obs.y - self.prior_mean)

    def _factor(self, k_x: np.ndarray):
        scale = max(self.hp.alpha + self.hp.alpha_bar, 1e-12)
        jitter = 1e-6 * scale
        try:
            return cho_factor(k_x, lower=True)
        except np.linalg.LinAlgError:
            min_eig = float(np.linalg.eigvalsh(k_x).min())
            while jitter <= 1e-2 * scale:
                self.audit.record(jitter, min_eig)
                try:
                    return cho_factor(k_x + jitter * np.eye(len(k_x)), lower=True)
                except np.linalg.LinAlgError:
                    jitter *= 10.0
            raise np.linalg.LinAlgError(
                f"covariance not positive definite even with jitter {jitter:.1e}")

    def log_marginal_likelihood(self) -> float:
        n = len(self.obs)
        resid = self.obs.y - self.prior_mean
        logdet = 2.0 * np.log(np.diag(self._chol[0])).sum()
        return float(-0.5 * resid @ self._alpha_vec - 0.5 * logdet
                     - 0.5 * n * math.log(2.0 * math.pi))

    def posterior(self, circuits: list[Circuit]) -> GpPosterior:
        means = np.empty(len(circuits))
        variances = np.empty(len(circuits))
        for i, c in enumerate(circuits):
            d, dbar = self.obs.query_distances(c)
            means[i], variances[i] = self.posterior_from_distances(d, dbar)
        return GpPosterior(means, variances)

    def posterior_from_distances(self, d: np.ndarray, dbar: np.ndarray):
        k_vec = kernel_matrix(d, dbar, self.hp)
        mean = self.prior_mean + k_vec @ self._alpha_vec
        k_self = self.hp.alpha + self.hp.alpha_bar
        var = k_self - k_vec @ cho_solve(self._chol, k_vec)
        return float(mean), float(max(var, 0.0))


def gp_posterior(obs: ObservationSet, circuits: list[Circuit],
                 hp: KernelHyperparams,
                 audit: JitterAudit | None = None) -> GpPosterior:
    return GpModel(obs, hp, audit).posterior(circuits)


def fit_hyperparams(obs: ObservationSet, n_starts: int = 4,
                    rng: np.random.Generator | None = None,
                    audit: JitterAudit | None = None) -> KernelHyperparams:
    """Maximize the log marginal likelihood over log hyperparameters."""
    rng = rng or np.random.default_rng(0)
    base = default_hyperparams(obs.y, obs.d, obs.dbar)
    if len(obs) < 3 or np.var(obs.y) < 1e-14:
        return base

    def neg_lml(vec: np.ndarray) -> float:
        try:
            hp = KernelHyperparams.from_vector(vec)
            return -GpModel(obs, hp, audit).log_marginal_likelihood()
        except (np.linalg.LinAlgError, FloatingPointError, ValueError):
            return 1e10

    x0 = base.to_vector()
    best_vec, best_val = x0, neg_lml(x0)
    starts = [x0] + [x0 + rng.normal(scale=1.0, size=x0.size)
                     for _ in range(n_starts - 1)]
    for start in starts:
        res = minimize(neg_lml, start, method="L-BFGS-B",
                       bounds=[(-12.0, 12.0)] * len(start))
        if res.fun < best_val:
            best_vec, best_val = res.x, res.fun
    return KernelHyperparams.from_vector(best_vec)


def expected_improvement(mean, std, f_best: float):
    """Closed-form EI for maximization, exact normal CDF/PDF."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    improve = mean - f_best
    out = np.maximum(improve, 0.0)
    pos = std > 0
    z = np.divide(improve, std, out=np.zeros_like(improve), where=pos)
    pdf = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    out = np.where(pos, improve * ndtr(z) + std * pdf, out)
    return out if out.ndim else float(out)
