"""Numpy fallback kernels for the univariate regression objective."""
import numpy as np


def linreg_loss(w: float, b: float, x: np.ndarray, y: np.ndarray) -> float:
    r = w * x + b - y
    return float(np.mean(r * r))


def linreg_loss_grad(w: float, b: float, x: np.ndarray, y: np.ndarray):
    r = w * x + b - y
    gw = 2.0 * float(np.mean(x * r))
    gb = 2.0 * float(np.mean(r))
    return float(np.mean(r * r)), gw, gb
