"""Gaussian radial-basis-function interpolation over the parameter space.

A scalar response sampled at ``n_centers`` parameter points is interpolated
as a weighted sum of Gaussians centered at those points. Centers are affinely
rescaled per-coordinate to [0, 1] before any kernel evaluation (identity
mapping for coordinates with zero range), so the shape parameter is
scale-free across parameter magnitudes; the mapping is recomputed
deterministically from the stored centers.

Weights solve ``(K + ridge*I) w = values`` with
``K[i, m] = exp(-(shape * d(i, m))**2)`` on rescaled distances. With
``ridge = 0`` the interpolant reproduces the training values at the centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.spatial.distance import cdist

from .errors import (
    DimensionMismatch,
    DuplicateCenters,
    InsufficientCenters,
    NonFinite,
    SingularSystem,
)

__all__ = [
    "RbfInterpolator",
    "gaussian_kernel",
    "default_shape_parameter",
    "fit",
    "fit_many",
    "evaluate",
    "evaluate_shared",
]

# ridge applied automatically when the plain ridge=0 solve fails;
# equals 1e-12 * trace(K) / n_centers (Gaussian diagonal is 1)
FALLBACK_RIDGE_SCALE = 1e-12


@dataclass(frozen=True)
class RbfInterpolator:
    """Fitted interpolant for one scalar response.

    ``centers`` are the raw (unscaled) training parameter points, one per
    row; ``regularization`` is the ridge value actually applied during the
    weight solve (0 unless the automatic fallback fired).
    """

    centers: np.ndarray
    shape: float
    weights: np.ndarray
    regularization: float = 0.0

    def __post_init__(self):
        centers = _as_centers(self.centers)
        weights = np.atleast_1d(np.asarray(self.weights, dtype=np.float64))
        if weights.shape != (centers.shape[0],):
            raise DimensionMismatch(
                f"{weights.shape[0]} weights for {centers.shape[0]} centers"
            )
        if not np.isfinite(weights).all():
            raise NonFinite("weights contain NaN/Inf")
        if not self.shape > 0:
            raise ValueError(f"shape parameter must be > 0, got {self.shape}")
        if self.regularization < 0:
            raise ValueError("regularization must be >= 0")
        _check_distinct(centers)
        centers.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "shape", float(self.shape))
        object.__setattr__(self, "regularization", float(self.regularization))

    @property
    def n_centers(self) -> int:
        return self.centers.shape[0]

    @property
    def n_dims(self) -> int:
        return self.centers.shape[1]


def _as_centers(points) -> np.ndarray:
    """Coerce to an owned (n_centers, n_dims) float array."""
    arr = np.array(points, dtype=np.float64, copy=True)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"centers must be (n, p) with n,p >= 1, got {arr.shape}")
    if not np.isfinite(arr).all():
        raise NonFinite("centers contain NaN/Inf")
    return arr


def _check_distinct(centers: np.ndarray) -> None:
    if centers.shape[0] < 2:
        return
    d = cdist(centers, centers)
    iu = np.triu_indices(centers.shape[0], k=1)
    if d[iu].min() == 0.0:
        i, j = np.argwhere(np.isclose(d, 0) & ~np.eye(len(d), dtype=bool))[0]
        raise DuplicateCenters(f"centers {i} and {j} coincide")


def _unit_box_map(centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate affine map onto [0, 1]; identity where the range is a point."""
    lo = centers.min(axis=0)
    span = centers.max(axis=0) - lo
    scale = np.where(span > 0, span, 1.0)
    return lo, scale


def gaussian_kernel(r: float, shape: float) -> float:
    """Gaussian kernel ``exp(-(shape * r)**2)``; 1 at r=0, strictly decaying."""
    if r < 0:
        raise ValueError(f"distance must be >= 0, got {r}")
    if not shape > 0:
        raise ValueError(f"shape parameter must be > 0, got {shape}")
    return math.exp(-((shape * r) ** 2))


def default_shape_parameter(centers) -> float:
    """Reciprocal of the mean pairwise Euclidean distance among the centers."""
    pts = _as_centers(centers)
    if pts.shape[0] < 2:
        raise InsufficientCenters("need at least two centers for a default shape")
    iu = np.triu_indices(pts.shape[0], k=1)
    mean_distance = cdist(pts, pts)[iu].mean()
    if mean_distance == 0.0:
        raise DuplicateCenters("all centers coincide")
    return 1.0 / mean_distance


def _solve_weights(
    kernel: np.ndarray, values: np.ndarray, ridge: float
) -> tuple[np.ndarray, float]:
    """Solve (K + ridge*I) w = values, falling back to a tiny automatic ridge
    when the plain ridge=0 factorization fails. Returns (weights, applied ridge)."""
    n = kernel.shape[0]
    for attempt_ridge in (ridge,) if ridge > 0 else (0.0, FALLBACK_RIDGE_SCALE * np.trace(kernel) / n):
        system = kernel + attempt_ridge * np.eye(n) if attempt_ridge > 0 else kernel
        try:
            factor = cho_factor(system)
        except np.linalg.LinAlgError:
            continue
        return cho_solve(factor, values), attempt_ridge
    cond = float(np.linalg.cond(kernel))
    raise SingularSystem(
        f"kernel matrix singular beyond ridge (cond ~ {cond:.3e})",
        condition_estimate=cond,
    )


def fit_many(
    centers,
    value_rows,
    shape: float | None = None,
    ridge: float = 0.0,
) -> list[RbfInterpolator]:
    """Fit one interpolator per row of ``value_rows`` over shared centers.

    The kernel matrix is assembled and factored once and reused for every
    row. ``shape=None`` selects the default shape parameter computed on the
    rescaled centers.
    """
    pts = _as_centers(centers)
    _check_distinct(pts)
    rows = np.atleast_2d(np.asarray(value_rows, dtype=np.float64))
    if rows.shape[1] != pts.shape[0]:
        raise DimensionMismatch(
            f"value rows have {rows.shape[1]} entries for {pts.shape[0]} centers"
        )
    if not np.isfinite(rows).all():
        raise NonFinite("training values contain NaN/Inf")
    if ridge < 0:
        raise ValueError("ridge must be >= 0")

    lo, scale = _unit_box_map(pts)
    scaled = (pts - lo) / scale
    if shape is None:
        shape = default_shape_parameter(scaled)
    elif not shape > 0:
        raise ValueError(f"shape parameter must be > 0, got {shape}")

    kernel = np.exp(-((shape * cdist(scaled, scaled)) ** 2))
    weights, applied = _solve_weights(kernel, rows.T, ridge)
    return [
        RbfInterpolator(
            centers=pts, shape=shape, weights=weights[:, j], regularization=applied
        )
        for j in range(rows.shape[0])
    ]


def fit(
    centers,
    values: Sequence[float],
    shape: float | None = None,
    ridge: float = 0.0,
) -> RbfInterpolator:
    """Fit a single interpolator; see :func:`fit_many`."""
    values = np.atleast_1d(np.asarray(values, dtype=np.float64))
    return fit_many(centers, values[None, :], shape=shape, ridge=ridge)[0]


def _kernel_vector(interp: RbfInterpolator, target) -> np.ndarray:
    point = np.atleast_1d(np.asarray(target, dtype=np.float64))
    if point.shape != (interp.n_dims,):
        raise DimensionMismatch(
            f"target has shape {point.shape}, centers have {interp.n_dims} coordinates"
        )
    if not np.isfinite(point).all():
        raise NonFinite("target contains NaN/Inf")
    lo, scale = _unit_box_map(interp.centers)
    scaled_centers = (interp.centers - lo) / scale
    scaled_point = (point - lo) / scale
    dist = cdist(scaled_point[None, :], scaled_centers).ravel()
    return np.exp(-((interp.shape * dist) ** 2))


def evaluate(interp: RbfInterpolator, target) -> float:
    """Weighted Gaussian sum at ``target``; reproduces training values at the
    centers when the interpolator was fit with ridge=0."""
    return float(_kernel_vector(interp, target) @ interp.weights)


def evaluate_shared(interps: Sequence[RbfInterpolator], target) -> np.ndarray:
    """Evaluate several interpolators at one point, computing the kernel
    vector once. All interpolators must share centers and shape (as produced
    by :func:`fit_many`); falls back to per-interpolator evaluation when they
    do not."""
    first = interps[0]
    shared = all(
        other.shape == first.shape
        and (other.centers is first.centers or np.array_equal(other.centers, first.centers))
        for other in interps[1:]
    )
    if not shared:
        return np.array([evaluate(interp, target) for interp in interps])
    kvec = _kernel_vector(first, target)
    return np.stack([interp.weights for interp in interps]) @ kvec
