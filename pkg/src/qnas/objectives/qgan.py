"""Distribution-loading objective: adversarial training of a quantum
generator against a small classical discriminator, scored by the relative
entropy between the generated and target bin distributions."""

from __future__ import annotations

import numpy as np
from scipy.stats import norm

from ..gates import Circuit
from ..simulate import apply_circuit, zero_state
from .training import Adam, central_diff_grad

N_BINS = 8
_LEAK = 0.2


def target_distribution() -> np.ndarray:
    """Even mixture of N(0.5, 1) and N(3.5, 0.5^2), truncated to the bin
    range and discretized over bins 0..7 (bin k covers [k-0.5, k+0.5))."""
    edges = np.arange(N_BINS + 1) - 0.5
    mass = 0.5 * (norm.cdf(edges[1:], 0.5, 1.0) - norm.cdf(edges[:-1], 0.5, 1.0)) \
        + 0.5 * (norm.cdf(edges[1:], 3.5, 0.5) - norm.cdf(edges[:-1], 3.5, 0.5))
    return mass / mass.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """D_KL(P || Q); zero-probability P bins contribute nothing."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / q[nz])))


def generator_probs(circuit: Circuit, theta) -> np.ndarray:
    state = apply_circuit(circuit, theta, zero_state(circuit.n_qubits))
    return np.abs(state) ** 2


class Discriminator:
    """1 -> 50 -> 20 -> 1 classifier with leaky-ReLU hidden layers."""

    def __init__(self, rng: np.random.Generator, sizes=(1, 50, 20, 1)):
        self.w = [rng.normal(scale=np.sqrt(2.0 / sizes[i]),
                             size=(sizes[i + 1], sizes[i]))
                  for i in range(len(sizes) - 1)]
        self.b = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]

    def _forward(self, x: np.ndarray):
        acts = [x]  # x: (m, 1)
        h = x
        for w, b in zip(self.w[:-1], self.b[:-1]):
            z = h @ w.T + b
            h = np.where(z > 0, z, _LEAK * z)
            acts.append(h)
        z_out = h @ self.w[-1].T + self.b[-1]
        return acts, z_out[:, 0]

    def prob(self, x: np.ndarray) -> np.ndarray:
        _, z = self._forward(np.atleast_2d(x).reshape(-1, 1))
        return 1.0 / (1.0 + np.exp(-z))

    def grads(self, x: np.ndarray, dz_out: np.ndarray):
        """Backprop the per-sample output-preactivation gradient."""
        acts, _ = self._forward(x)
        gw = [None] * len(self.w)
        gb = [None] * len(self.b)
        delta = dz_out[:, None]  # (m, 1)
        for layer in range(len(self.w) - 1, -1, -1):
            gw[layer] = delta.T @ acts[layer] / x.shape[0]
            gb[layer] = delta.mean(axis=0)
            if layer > 0:
                upstream = delta @ self.w[layer]
                z_mask = acts[layer] > 0
                delta = upstream * np.where(z_mask, 1.0, _LEAK)
        return gw, gb


def train_qgan(circuit: Circuit, rng: np.random.Generator,
               epochs: int = 200, batch: int = 100, lr: float = 1e-3):
    """Alternating discriminator/generator updates; returns (theta, history).

    The discriminator trains on finite batches of real and generated
    samples; the generator step uses the exact output distribution (its
    statevector is available) and central-difference gradients.
    """
    q = target_distribution()
    xs = np.arange(N_BINS) / (N_BINS - 1.0)
    theta = rng.uniform(-0.1, 0.1, circuit.param_count)
    disc = Discriminator(rng)
    opt_d = [Adam(w.size, lr=lr) for w in disc.w] + [Adam(b.size, lr=lr) for b in disc.b]
    opt_g = Adam(theta.size, lr=lr)
    history = []
    for _ in range(epochs):
        probs = generator_probs(circuit, theta)
        real = rng.choice(N_BINS, size=batch, p=q)
        fake = rng.choice(N_BINS, size=batch, p=probs)
        x = np.concatenate([xs[real], xs[fake]]).reshape(-1, 1)
        d_out = disc.prob(x[:, 0])
        # d(-log sigma)/dz = sigma - 1 on real, d(-log(1 - sigma))/dz = sigma on fake
        dz = np.concatenate([d_out[:batch] - 1.0, d_out[batch:]])
        gw, gb = disc.grads(x, dz)
        for i, w in enumerate(disc.w):
            disc.w[i] = opt_d[i].step(w.ravel(), gw[i].ravel()).reshape(w.shape)
        for i, b in enumerate(disc.b):
            disc.b[i] = opt_d[len(disc.w) + i].step(b, gb[i])

        log_d = np.log(np.clip(disc.prob(xs), 1e-12, 1.0))

        def gen_loss(t):
            return -float(generator_probs(circuit, t) @ log_d)

        if theta.size:
            theta = opt_g.step(theta, central_diff_grad(gen_loss, theta))
        history.append(kl_divergence(generator_probs(circuit, theta), q))
    return theta, history


def qgan_objective(circuit: Circuit, rng: np.random.Generator | None = None,
                   epochs: int = 200, batch: int = 100, lr: float = 1e-3) -> float:
    """Relative entropy of the trained generator's distribution (minimized)."""
    rng = rng or np.random.default_rng(0)
    theta, _ = train_qgan(circuit, rng, epochs=epochs, batch=batch, lr=lr)
    return kl_divergence(generator_probs(circuit, theta), target_distribution())
