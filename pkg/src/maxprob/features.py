"""Moment estimates and feature maps used to write mean constraints."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelKind",
    "KernelSpec",
    "MeanEstimate",
    "Standardizer",
    "enrich_second_order",
    "enrich_rows",
    "kernel_feature_rows",
    "kernel_matrix",
    "kernel_value",
    "sample_mean",
]


class KernelKind(str, enum.Enum):
    LINEAR = "linear"
    POLYNOMIAL = "polynomial"
    RBF = "rbf"


@dataclass(frozen=True)
class KernelSpec:
    kind: KernelKind = KernelKind.RBF
    gamma: float = 1.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind is KernelKind.RBF and not self.gamma > 0:
            raise ValueError(f"RBF kernel needs gamma > 0, got {self.gamma}")
        if self.kind is KernelKind.POLYNOMIAL:
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError(f"polynomial degree must be an integer >= 1, got {self.degree}")
            if self.offset < 0:
                raise ValueError("polynomial offset must be non-negative")

    @classmethod
    def rbf(cls, gamma: float = 1.0) -> "KernelSpec":
        return cls(KernelKind.RBF, gamma=gamma)

    @classmethod
    def polynomial(cls, degree: int = 2, offset: float = 1.0) -> "KernelSpec":
        return cls(KernelKind.POLYNOMIAL, degree=degree, offset=offset)

    @classmethod
    def linear(cls) -> "KernelSpec":
        return cls(KernelKind.LINEAR)


@dataclass(frozen=True, eq=False)
class MeanEstimate:
    alpha: np.ndarray
    spread: np.ndarray
    sample_size: int


def sample_mean(points) -> MeanEstimate:
    """Arithmetic mean and per-coordinate sample standard deviation.

    The spread uses the ``l - 1`` denominator and is zero for a single point.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if X.size else X.reshape(0, 1)
    if X.shape[0] == 0:
        raise ValueError("empty labeled sample")
    l = X.shape[0]
    alpha = X.mean(axis=0)
    spread = X.std(axis=0, ddof=1) if l > 1 else np.zeros(X.shape[1])
    return MeanEstimate(alpha, spread, l)


def _pair_index(n):
    return np.triu_indices(n)


def enrich_second_order(x) -> np.ndarray:
    """Append all products ``x[t] * x[r]`` with ``t <= r`` in lexicographic order."""
    x = np.asarray(x, dtype=float).ravel()
    t, r = _pair_index(x.shape[0])
    return np.concatenate([x, x[t] * x[r]])


def enrich_rows(X) -> np.ndarray:
    """Row-wise :func:`enrich_second_order` for an ``(N, n)`` matrix."""
    X = np.asarray(X, dtype=float)
    t, r = _pair_index(X.shape[1])
    return np.hstack([X, X[:, t] * X[:, r]])


def kernel_value(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(kernel_matrix(spec, x[None, :], y[None, :])[0, 0])


def kernel_matrix(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel values between every row of ``X`` and every row of ``Y``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    if spec.kind is KernelKind.RBF:
        # direct differences keep K(x, x) == 1 exactly
        sq = np.zeros((X.shape[0], Y.shape[0]))
        for k in range(X.shape[1]):
            diff = X[:, k][:, None] - Y[:, k][None, :]
            sq += diff * diff
        return np.exp(-spec.gamma * sq)
    G = X @ Y.T
    if spec.kind is KernelKind.LINEAR:
        return G
    return (G + spec.offset) ** int(spec.degree)


def kernel_feature_rows(spec: KernelSpec, points, landmarks) -> np.ndarray:
    """Matrix whose entry ``(r, i)`` is ``K(points[i], points[landmarks[r]])``."""
    X = np.asarray(points, dtype=float)
    idx = np.asarray(landmarks, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= X.shape[0]):
        raise IndexError(f"landmark index out of range for {X.shape[0]} points")
    return kernel_matrix(spec, X[idx], X)


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-coordinate zero-mean/unit-variance map fitted on one matrix."""

    center: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        scale = X.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return cls(X.mean(axis=0), scale)

    def __call__(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.center) / self.scale
