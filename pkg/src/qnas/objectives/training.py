"""Shared circuit-training utilities (quasi-Newton with finite differences)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

FD_STEP = 1e-5
PARAM_BOUND = 2.0 * np.pi


@dataclass
class TrainResult:
    params: np.ndarray
    value: float
    trace: list = field(default_factory=list)


def central_diff_grad(fun, x: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    grad = np.empty_like(x)
    for i in range(x.size):
        delta = np.zeros_like(x)
        delta[i] = step
        grad[i] = (fun(x + delta) - fun(x - delta)) / (2.0 * step)
    return grad


def train_circuit(loss, n_params: int, rng: np.random.Generator,
                  restarts: int = 3, maxiter: int = 300) -> TrainResult:
    """Minimize `loss` over bounded angles with multi-start L-BFGS-B.

    Gradients are central finite differences; restarts draw uniform starting
    points in [-pi, pi] and non-finite losses discard the restart.
    """
    if n_params == 0:
        return TrainResult(np.zeros(0), float(loss(np.zeros(0))))
    best: TrainResult | None = None
    bounds = [(-PARAM_BOUND, PARAM_BOUND)] * n_params
    for _ in range(max(1, restarts)):
        x0 = rng.uniform(-np.pi, np.pi, n_params)
        trace: list[float] = []
        try:
            res = minimize(loss, x0, jac=lambda x: central_diff_grad(loss, x),
                           method="L-BFGS-B", bounds=bounds,
                           callback=lambda xk: trace.append(float(loss(xk))),
                           options={"maxiter": maxiter})
        except FloatingPointError:
            continue
        if not np.isfinite(res.fun):
            continue
        value = float(loss(res.x))  # re-evaluate: final-value consistency
        if best is None or value < best.value:
            best = TrainResult(np.asarray(res.x), value, trace)
    if best is None:
        raise RuntimeError("all training restarts diverged")
    return best


class Adam:
    """Plain ADAM on a flat parameter vector."""

    def __init__(self, size: int, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        mhat = self.m / (1 - self.beta1 ** self.t)
        vhat = self.v / (1 - self.beta2 ** self.t)
        return params - self.lr * mhat / (np.sqrt(vhat) + self.eps)
