import numpy as np
import pytest


class CountingObjective:
    """Wraps an objective and counts loss/grad evaluations."""

    def __init__(self, inner):
        self.inner = inner
        self.loss_calls = 0
        self.grad_calls = 0

    def loss(self, theta, batch=None):
        self.loss_calls += 1
        return self.inner.loss(theta, batch)

    def grad(self, theta, batch=None):
        self.grad_calls += 1
        return self.inner.grad(theta, batch)

    def reset(self):
        self.loss_calls = 0
        self.grad_calls = 0


@pytest.fixture
def counting():
    return CountingObjective
