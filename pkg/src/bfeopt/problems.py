"""Synthetic objectives and datasets: a seeded univariate regression task,
diagonal quadratic bowls, feature normalization, and epoch-shuffled batching.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .core import Batch

X_RANGE = (0.0, 10.0)


@dataclass(frozen=True)
class LinRegSpec:
    w0: float = 5.0
    b0: float = 9.0
    noise_std: float = 1.0
    n: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise_std < 0:
            raise ValueError("noise_std must be nonnegative")


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    y: np.ndarray
    normalized: bool = False
    norm_params: tuple[float, float] | None = None  # (mu, sigma)

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")


def gen_linear_data(spec: LinRegSpec) -> Dataset:
    """Sample y = w0*x + b0 + noise with x uniform on the feature range."""
    rng = np.random.default_rng(spec.seed)
    x = rng.uniform(X_RANGE[0], X_RANGE[1], size=spec.n)
    noise = rng.normal(0.0, spec.noise_std, size=spec.n) if spec.noise_std > 0 \
        else np.zeros(spec.n)
    y = spec.w0 * x + spec.b0 + noise
    return Dataset(x=x, y=y)


def normalize(data: Dataset) -> Dataset:
    """Standardize features to zero mean, unit sample std; targets unchanged."""
    mu = float(np.mean(data.x))
    sigma = float(np.std(data.x, ddof=1))
    if sigma == 0.0:
        raise ValueError("cannot normalize constant features")
    return Dataset(x=(data.x - mu) / sigma, y=data.y, normalized=True,
                   norm_params=(mu, sigma))


def save_dataset_csv(data: Dataset, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x", "y"])
        for xi, yi in zip(data.x, data.y):
            writer.writerow([f"{xi:.17g}", f"{yi:.17g}"])


def load_dataset_csv(path: str) -> Dataset:
    xs, ys = [], []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["x", "y"]:
            raise ValueError(f"unexpected dataset header: {header}")
        for row in reader:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
    return Dataset(x=np.array(xs), y=np.array(ys))


class LinRegObjective:
    """Mean squared error of y ~ w*x + b; theta = (w, b).

    A batch is an index array into the dataset; None means the full dataset.
    """

    def __init__(self, data: Dataset):
        if len(data.x) == 0:
            raise ValueError("empty dataset")
        self.data = data
        self._x = np.ascontiguousarray(data.x, dtype=float)
        self._y = np.ascontiguousarray(data.y, dtype=float)

    def _slice(self, batch: Batch):
        if batch is None:
            return self._x, self._y
        x = np.ascontiguousarray(self._x[batch])
        if x.size == 0:
            raise ValueError("empty batch")
        return x, np.ascontiguousarray(self._y[batch])

    def loss(self, theta: np.ndarray, batch: Batch = None) -> float:
        x, y = self._slice(batch)
        return float(kernels.linreg_loss(theta[0], theta[1], x, y))

    def grad(self, theta: np.ndarray, batch: Batch = None) -> np.ndarray:
        x, y = self._slice(batch)
        _, gw, gb = kernels.linreg_loss_grad(theta[0], theta[1], x, y)
        return np.array([gw, gb])


def linreg_objective(data: Dataset) -> LinRegObjective:
    return LinRegObjective(data)


class QuadraticObjective:
    """Diagonal bowl f(theta) = 0.5 * sum h_i * theta_i**2, batch-independent."""

    def __init__(self, curvatures):
        h = np.asarray(curvatures, dtype=float)
        if np.any(h <= 0):
            raise ValueError("curvatures must be positive")
        self.h = h

    def loss(self, theta: np.ndarray, batch: Batch = None) -> float:
        theta = np.asarray(theta, dtype=float)
        return float(0.5 * np.sum(self.h * theta * theta))

    def grad(self, theta: np.ndarray, batch: Batch = None) -> np.ndarray:
        return self.h * np.asarray(theta, dtype=float)


def quadratic_objective(curvatures) -> QuadraticObjective:
    return QuadraticObjective(curvatures)


class BatchStream:
    """Seeded epoch-shuffled mini-batch index stream, without replacement.

    The final partial batch of an epoch is kept. ``epoch`` reflects the epoch
    of the most recently yielded batch.
    """

    def __init__(self, n: int, batch_size: int, seed: int = 0):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.n = n
        self.batch_size = batch_size
        self.rng = np.random.default_rng(seed)
        self.epoch = 0

    def __iter__(self):
        while True:
            perm = self.rng.permutation(self.n)
            for start in range(0, self.n, self.batch_size):
                yield perm[start:start + self.batch_size]
            self.epoch += 1


class ConstantBatchStream:
    """Yields None forever, for batch-independent objectives."""

    def __init__(self):
        self.epoch = 0

    def __iter__(self):
        while True:
            yield None
