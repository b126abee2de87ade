import numpy as np
import pytest

from bfeopt.baselines import (
    AdamState,
    MomentumState,
    adam_step,
    nesterov_step,
    sgd_step,
)
from bfeopt.problems import quadratic_objective


def test_sgd_basic():
    obj = quadratic_objective([1.0])
    theta = sgd_step(obj, np.array([1.0]), 0.1, None)
    assert theta[0] == pytest.approx(0.9, rel=1e-15)


def test_sgd_zero_rate_is_identity():
    obj = quadratic_objective([1.0])
    theta = sgd_step(obj, np.array([1.0]), 0.0, None)
    assert theta[0] == 1.0


def test_sgd_fixed_point():
    obj = quadratic_objective([1.0])
    theta = sgd_step(obj, np.array([0.0]), 0.1, None)
    assert theta[0] == 0.0


def test_nesterov_hand_recursion():
    obj = quadratic_objective([1.0])
    state = MomentumState(v=np.zeros(1), beta=0.9, alpha=0.1)
    theta, state = nesterov_step(obj, np.array([1.0]), state, None)
    assert state.v[0] == pytest.approx(1.0, rel=1e-15)
    assert theta[0] == pytest.approx(0.9, rel=1e-15)
    theta, state = nesterov_step(obj, theta, state, None)
    assert state.v[0] == pytest.approx(1.71, rel=1e-14)
    assert theta[0] == pytest.approx(0.729, rel=1e-14)


def test_nesterov_zero_beta_equals_sgd_bitwise():
    obj = quadratic_objective([2.5])
    alpha = 0.07
    state = MomentumState(v=np.zeros(1), beta=0.0, alpha=alpha)
    tn = np.array([1.3])
    ts = np.array([1.3])
    for _ in range(50):
        tn, state = nesterov_step(obj, tn, state, None)
        ts = sgd_step(obj, ts, alpha, None)
        assert tn[0] == ts[0]  # exact, not approximate


def test_nesterov_zero_gradient_keeps_params():
    class Flat:
        def loss(self, theta, batch=None):
            return 0.0

        def grad(self, theta, batch=None):
            return np.zeros_like(theta)

    state = MomentumState(v=np.zeros(1), beta=0.9, alpha=0.1)
    theta = np.array([2.0])
    for _ in range(5):
        theta, state = nesterov_step(Flat(), theta, state, None)
    assert theta[0] == 2.0


def test_adam_first_step_magnitude():
    class UnitGrad:
        def loss(self, theta, batch=None):
            return float(theta[0])

        def grad(self, theta, batch=None):
            return np.ones_like(theta)

    state = AdamState(m=np.zeros(1), v=np.zeros(1), alpha=0.001)
    theta, state = adam_step(UnitGrad(), np.array([0.0]), state, None)
    assert theta[0] == pytest.approx(-0.001, rel=1e-7)
    assert state.t == 1


def test_adam_zero_gradient_fixed_point():
    class Flat:
        def loss(self, theta, batch=None):
            return 0.0

        def grad(self, theta, batch=None):
            return np.zeros_like(theta)

    state = AdamState(m=np.zeros(1), v=np.zeros(1), alpha=0.001)
    theta, state = adam_step(Flat(), np.array([1.0]), state, None)
    assert theta[0] == 1.0


def test_adam_constant_gradient_step_approaches_alpha():
    class ConstGrad:
        def loss(self, theta, batch=None):
            return float(3.0 * theta[0])

        def grad(self, theta, batch=None):
            return np.full_like(theta, 3.0)

    alpha = 0.01
    state = AdamState(m=np.zeros(1), v=np.zeros(1), alpha=alpha)
    theta = np.array([0.0])
    for _ in range(1000):
        prev = theta[0]
        theta, state = adam_step(ConstGrad(), theta, state, None)
    assert abs(prev - theta[0]) == pytest.approx(alpha, rel=1e-3)


def test_adam_step_magnitude_sanity_bound():
    obj = quadratic_objective([4.0])
    rng = np.random.default_rng(11)
    alpha = 0.05
    state = AdamState(m=np.zeros(1), v=np.zeros(1), alpha=alpha)
    theta = np.array([rng.normal(0, 5)])
    for _ in range(300):
        prev = theta.copy()
        theta, state = adam_step(obj, theta, state, None)
        assert np.all(np.abs(theta - prev) <= alpha * 10)


def test_baselines_one_gradient_per_step(counting):
    obj = counting(quadratic_objective([1.0]))
    sgd_step(obj, np.array([1.0]), 0.1, None)
    assert obj.grad_calls == 1
    obj.reset()
    nesterov_step(obj, np.array([1.0]),
                  MomentumState(v=np.zeros(1), alpha=0.1), None)
    assert obj.grad_calls == 1
    obj.reset()
    adam_step(obj, np.array([1.0]),
              AdamState(m=np.zeros(1), v=np.zeros(1)), None)
    assert obj.grad_calls == 1
