"""Reference optimizers: fixed-rate SGD, Nesterov momentum, and Adam.

All step functions are stateless over explicit state values and cost one
gradient evaluation per step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import Batch, NonFiniteEvaluation, Objective


def _finite_grad(obj: Objective, theta: np.ndarray, batch: Batch) -> np.ndarray:
    g = np.asarray(obj.grad(theta, batch), dtype=float)
    if not np.all(np.isfinite(g)):
        raise NonFiniteEvaluation("non-finite gradient")
    return g


@dataclass(frozen=True)
class MomentumState:
    v: np.ndarray
    beta: float = 0.9
    alpha: float = 0.001

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must be in [0, 1)")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    beta1: float = 0.9
    beta2: float = 0.999
    alpha: float = 0.001
    eps_stab: float = 1e-8
    t: int = 0


def sgd_step(obj: Objective, theta: np.ndarray, alpha: float,
             batch: Batch) -> np.ndarray:
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return theta - alpha * _finite_grad(obj, theta, batch)


def nesterov_step(obj: Objective, theta: np.ndarray, state: MomentumState,
                  batch: Batch) -> tuple[np.ndarray, MomentumState]:
    """Velocity update with the gradient taken at the look-ahead point."""
    look_ahead = theta - state.alpha * state.beta * state.v
    g = _finite_grad(obj, look_ahead, batch)
    v = state.beta * state.v + g
    theta_next = theta - state.alpha * v
    return theta_next, replace(state, v=v)


def adam_step(obj: Objective, theta: np.ndarray, state: AdamState,
              batch: Batch) -> tuple[np.ndarray, AdamState]:
    """Standard bias-corrected Adam update."""
    g = _finite_grad(obj, theta, batch)
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    theta_next = theta - state.alpha * m_hat / (np.sqrt(v_hat) + state.eps_stab)
    return theta_next, replace(state, m=m, v=v, t=t)


class SgdOptimizer:
    def __init__(self, alpha: float):
        self.alpha = alpha

    def step_params(self, obj, theta, batch):
        return sgd_step(obj, theta, self.alpha, batch)


class NesterovOptimizer:
    def __init__(self, dim: int, alpha: float, beta: float = 0.9):
        self.state = MomentumState(v=np.zeros(dim), beta=beta, alpha=alpha)

    def step_params(self, obj, theta, batch):
        theta, self.state = nesterov_step(obj, theta, self.state, batch)
        return theta


class AdamOptimizer:
    def __init__(self, dim: int, alpha: float = 0.001, beta1: float = 0.9,
                 beta2: float = 0.999, eps_stab: float = 1e-8):
        self.state = AdamState(m=np.zeros(dim), v=np.zeros(dim), beta1=beta1,
                               beta2=beta2, alpha=alpha, eps_stab=eps_stab)

    def step_params(self, obj, theta, batch):
        theta, self.state = adam_step(obj, theta, self.state, batch)
        return theta
