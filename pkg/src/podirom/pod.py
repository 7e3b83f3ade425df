"""Snapshot matrices, SVD-based modal bases, and field reconstruction.

Snapshots are column vectors of length ``n_dof``; a snapshot matrix stacks
them column by column. The modal basis consists of the left-singular vectors
of that matrix, with an energy-based truncation rule operating on squared
singular values. All containers are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSpectrum,
    DimensionMismatch,
    LengthMismatch,
    NonFinite,
    NumericalFailure,
    RankOutOfRange,
    ZeroReference,
)

__all__ = [
    "SnapshotMatrix",
    "PodBasis",
    "ModalCoefficients",
    "assemble_snapshot_matrix",
    "compute_pod_basis",
    "cumulative_energy",
    "rank_for_energy",
    "truncate",
    "project_coefficients",
    "reconstruct",
    "relative_error_l2",
]

ORTHONORMALITY_TOL = 1e-10
SVD_CHECK_TOL = 1e-12


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    """Owned, read-only float array (copies iff the input is not already owned)."""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SnapshotMatrix:
    """Dense ``n_dof x n_snapshots`` matrix, one solution vector per column."""

    data: np.ndarray
    field_name: str

    def __post_init__(self):
        data = np.atleast_2d(np.asarray(self.data, dtype=np.float64))
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionMismatch(
                f"snapshot matrix must be 2-D with positive shape, got {data.shape}"
            )
        bad = ~np.isfinite(data)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise NonFinite(
                f"non-finite entry at row {row}, snapshot column {col} "
                f"of field '{self.field_name}'",
                row=int(row),
                column=int(col),
            )
        object.__setattr__(self, "data", _frozen_array(data))

    @property
    def n_dof(self) -> int:
        return self.data.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class PodBasis:
    """Orthonormal modes (columns), their singular values, and a truncation rank.

    ``modes`` is ``n_dof x r`` with ``modes.T @ modes = I`` to within
    ``ORTHONORMALITY_TOL`` (max-norm); singular values are nonincreasing and
    nonnegative; ``1 <= truncation_rank <= r``.
    """

    modes: np.ndarray
    singular_values: np.ndarray
    truncation_rank: int

    def __post_init__(self):
        modes = np.atleast_2d(np.asarray(self.modes, dtype=np.float64))
        svals = np.atleast_1d(np.asarray(self.singular_values, dtype=np.float64))
        if modes.ndim != 2 or svals.ndim != 1 or modes.shape[1] != svals.shape[0]:
            raise DimensionMismatch(
                f"modes {modes.shape} do not match {svals.shape[0]} singular values"
            )
        if not np.isfinite(modes).all() or not np.isfinite(svals).all():
            raise NonFinite("basis contains NaN/Inf")
        if (svals < 0).any() or (np.diff(svals) > 0).any():
            raise NumericalFailure("singular values must be nonincreasing and >= 0")
        gram = modes.T @ modes
        dev = np.abs(gram - np.eye(modes.shape[1])).max()
        if dev > ORTHONORMALITY_TOL:
            raise NumericalFailure(
                f"modes not orthonormal: max deviation {dev:.3e}"
            )
        if not 1 <= self.truncation_rank <= modes.shape[1]:
            raise RankOutOfRange(
                f"truncation rank {self.truncation_rank} outside [1, {modes.shape[1]}]"
            )
        object.__setattr__(self, "modes", _frozen_array(modes))
        object.__setattr__(self, "singular_values", _frozen_array(svals))
        object.__setattr__(self, "truncation_rank", int(self.truncation_rank))

    @property
    def n_dof(self) -> int:
        return self.modes.shape[0]

    @property
    def n_modes(self) -> int:
        return self.modes.shape[1]

    @property
    def truncated_modes(self) -> np.ndarray:
        """The first ``truncation_rank`` mode columns."""
        return self.modes[:, : self.truncation_rank]


@dataclass(frozen=True)
class ModalCoefficients:
    """``k x n_snapshots`` projection coefficients; entry (j, i) belongs to
    mode j and snapshot i."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.atleast_2d(np.asarray(self.matrix, dtype=np.float64))
        if not np.isfinite(matrix).all():
            raise NonFinite("modal coefficients contain NaN/Inf")
        object.__setattr__(self, "matrix", _frozen_array(matrix))

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.matrix.shape[1]


def assemble_snapshot_matrix(
    snapshots: Sequence[Sequence[float]], field_name: str
) -> SnapshotMatrix:
    """Stack snapshot vectors as columns, preserving their order.

    Raises LengthMismatch for ragged input and NonFinite (with row/column
    indices) for NaN/Inf entries.
    """
    if len(snapshots) == 0:
        raise LengthMismatch("need at least one snapshot")
    columns = [np.atleast_1d(np.asarray(s, dtype=np.float64)) for s in snapshots]
    n = columns[0].shape[0]
    for i, c in enumerate(columns):
        if c.ndim != 1 or c.shape[0] != n:
            raise LengthMismatch(
                f"snapshot {i} has length {c.shape[0]}, expected {n}"
            )
    return SnapshotMatrix(data=np.column_stack(columns), field_name=field_name)


def _fix_mode_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make each mode's largest-magnitude entry positive; flip the matching
    right-singular row so the product is unchanged."""
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def compute_pod_basis(s: SnapshotMatrix) -> PodBasis:
    """Full SVD-based modal basis of a snapshot matrix.

    Returns all ``min(n_dof, n_snapshots)`` left-singular vectors with their
    singular values in nonincreasing order; ``truncation_rank`` starts at full
    rank. Mode signs are fixed deterministically (largest-magnitude entry
    positive) so repeated runs produce bit-identical bases. The factorization
    is verified against the input to a relative Frobenius tolerance of 1e-12.
    """
    try:
        u, svals, vt = np.linalg.svd(s.data, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    u, vt = _fix_mode_signs(u, vt)

    norm_s = np.linalg.norm(s.data)
    if norm_s > 0:
        residual = np.linalg.norm((u * svals) @ vt - s.data) / norm_s
        if residual > SVD_CHECK_TOL:
            raise NumericalFailure(
                f"SVD reconstruction residual {residual:.3e} exceeds {SVD_CHECK_TOL}"
            )
    return PodBasis(modes=u, singular_values=svals, truncation_rank=svals.shape[0])


def cumulative_energy(basis: PodBasis) -> np.ndarray:
    """Cumulative squared-singular-value fractions; nondecreasing, ends at 1.

    The energy convention sums squared singular values. Raises
    DegenerateSpectrum when the whole spectrum is zero.
    """
    squared = basis.singular_values**2
    total = squared.sum()
    if total == 0.0:
        raise DegenerateSpectrum("all singular values are zero")
    return np.cumsum(squared) / total


def rank_for_energy(basis: PodBasis, threshold: float) -> int:
    """Smallest k whose cumulative energy reaches ``threshold`` (in (0, 1]).

    Plateaus in the energy sequence resolve to the smallest qualifying k.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    energy = cumulative_energy(basis)
    k = int(np.searchsorted(energy, threshold, side="left")) + 1
    # the final entry is 1.0 up to roundoff; never exceed the stored rank
    return min(k, basis.n_modes)


def truncate(basis: PodBasis, k: int) -> PodBasis:
    """Basis restricted to the first k modes and singular values."""
    if not 1 <= k <= basis.n_modes:
        raise RankOutOfRange(f"k={k} outside [1, {basis.n_modes}]")
    return PodBasis(
        modes=basis.modes[:, :k],
        singular_values=basis.singular_values[:k],
        truncation_rank=k,
    )


def project_coefficients(basis: PodBasis, s: SnapshotMatrix) -> ModalCoefficients:
    """Coefficients of the snapshots in the truncated basis: modes.T @ data."""
    if basis.n_dof != s.n_dof:
        raise DimensionMismatch(
            f"basis has {basis.n_dof} dofs, snapshots have {s.n_dof}"
        )
    return ModalCoefficients(matrix=basis.truncated_modes.T @ s.data)


def reconstruct(basis: PodBasis, coeffs: Sequence[float]) -> np.ndarray:
    """Linear combination of the truncated modes with the given coefficients."""
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=np.float64))
    if coeffs.shape != (basis.truncation_rank,):
        raise DimensionMismatch(
            f"expected {basis.truncation_rank} coefficients, got {coeffs.shape}"
        )
    return basis.truncated_modes @ coeffs


def relative_error_l2(
    x_fom: Sequence[float],
    x_rom: Sequence[float],
    weights: Sequence[float] | None = None,
) -> float:
    """Percent relative error ``100 * ||x_fom - x_rom|| / ||x_fom||``.

    Uses the discrete Euclidean norm; an optional per-DOF weight vector w
    switches to the weighted norm ``sqrt(sum(w * x**2))`` for mesh-weighted
    comparisons. Raises ZeroReference when the reference norm vanishes.
    """
    a = np.atleast_1d(np.asarray(x_fom, dtype=np.float64))
    b = np.atleast_1d(np.asarray(x_rom, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if weights is None:
        ref = np.linalg.norm(a)
        diff = np.linalg.norm(a - b)
    else:
        w = np.atleast_1d(np.asarray(weights, dtype=np.float64))
        if w.shape != a.shape:
            raise DimensionMismatch(f"weights shape {w.shape} != data shape {a.shape}")
        ref = np.sqrt(np.sum(w * a * a))
        diff = np.sqrt(np.sum(w * (a - b) ** 2))
    if ref == 0.0:
        raise ZeroReference("reference vector has zero norm")
    return 100.0 * diff / ref
