"""Principal component analysis for projecting many outcomes onto a few axes.

The model is fit on agent states pooled over all steps so that every column
of a diagram shares one coordinate system.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UsageError


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, N), orthonormal rows
    explained_variance: np.ndarray  # (k,), non-increasing

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns, in
    no particular order.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise UsageError("jacobi_eigh needs a square matrix")
    v = np.eye(n)
    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= np.finfo(float).tiny:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J, touching only rows/cols p and q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def covariance(data: np.ndarray) -> np.ndarray:
    centered = data - data.mean(axis=0)
    return centered.T @ centered / (data.shape[0] - 1)


def fit_pca(data, k: int) -> PcaModel:
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise UsageError("data must be a 2-D matrix")
    p, n = x.shape
    if p < 2:
        raise UsageError(f"PCA needs at least 2 rows, got {p}")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= min(p, n):
        raise ConfigError(f"components must be in [1, {min(p, n)}], got {k!r}")
    values, vectors = jacobi_eigh(covariance(x))
    order = sorted(range(n), key=lambda i: -values[i])[:k]
    comps = vectors[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = np.maximum(values[order], 0.0)
    if not np.any(explained > 0):
        warnings.warn("data has zero variance; all explained variances are 0", RuntimeWarning,
                      stacklevel=2)
    return PcaModel(x.mean(axis=0), comps, explained)


def project(model: PcaModel, data) -> np.ndarray:
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.mean.shape[0]:
        raise UsageError(f"data must have {model.mean.shape[0]} columns, got shape {x.shape}")
    return (x - model.mean) @ model.components.T


def reconstruct(model: PcaModel, projected) -> np.ndarray:
    """Map projected coordinates back to the original (uncentered) space."""
    return np.asarray(projected, dtype=float) @ model.components + model.mean
