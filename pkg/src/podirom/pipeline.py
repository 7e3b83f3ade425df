"""Offline training and online evaluation of the parametric surrogate.

Training runs per field: modal basis extraction from the snapshot matrix,
energy-based truncation (or an explicit per-field rank override), projection
of the snapshots onto the truncated basis, and one RBF interpolator per mode
row of the coefficient matrix. Online evaluation interpolates the modal
coefficients at the requested parameter and projects them back to the full
field.

Trained models are immutable and serialize to a single binary container:
header (magic ``PODI``, format version and field count as 32-bit
little-endian integers, model metadata), then per field the label
(length-prefixed UTF-8), N / k / N_s as 64-bit little-endian integers, the
truncated modes column-major as 64-bit little-endian floats, the singular
values, and one RBF block (centers, shape, ridge, weights) per mode, with a
trailing CRC-32 over everything before it. Roundtrips are bit-exact.
"""

from __future__ import annotations

import struct
import time
import zlib
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import pod, rbf
from .errors import (
    CorruptModel,
    DimensionMismatch,
    FieldMismatch,
    InsufficientSnapshots,
    IoFailure,
    ParameterOutOfRange,
    UnknownField,
    VersionMismatch,
)
from .pod import PodBasis
from .rbf import RbfInterpolator
from .snapshots import SnapshotSet

__all__ = [
    "RbfConfig",
    "FieldRom",
    "RomModel",
    "ValidationEntry",
    "ValidationReport",
    "train",
    "evaluate_field",
    "validate",
    "save_model",
    "load_model",
    "load_model_bytes",
]

FORMAT_VERSION = 1
MAGIC = b"PODI"
TIMING_REPETITIONS = 5


@dataclass(frozen=True)
class RbfConfig:
    """Interpolator options shared by every field: Gaussian shape parameter
    (None selects the scale-free default) and ridge regularization."""

    shape: float | None = None
    ridge: float = 0.0


@dataclass(frozen=True)
class FieldRom:
    """Per-field trained artifact: truncated basis + one interpolator per mode."""

    basis: PodBasis
    interpolators: tuple[RbfInterpolator, ...]

    def __post_init__(self):
        interps = tuple(self.interpolators)
        if len(interps) != self.basis.truncation_rank:
            raise DimensionMismatch(
                f"{len(interps)} interpolators for truncation rank "
                f"{self.basis.truncation_rank}"
            )
        object.__setattr__(self, "interpolators", interps)

    @property
    def rank(self) -> int:
        return self.basis.truncation_rank

    @property
    def n_dof(self) -> int:
        return self.basis.n_dof


@dataclass(frozen=True)
class RomModel:
    """Immutable trained surrogate: per-field bases and interpolators plus the
    shared training design.

    ``parameter_range`` is an optional declared admissible range ((low, high)
    per coordinate) enforced by serving layers; ``training_bounds`` is the
    axis-aligned bounding box of the training parameters, used to flag
    extrapolation.
    """

    fields: Mapping[str, FieldRom]
    parameter_table: np.ndarray
    energy_threshold: float
    format_version: int = FORMAT_VERSION
    parameter_range: np.ndarray | None = None

    def __post_init__(self):
        table = np.atleast_2d(np.asarray(self.parameter_table, dtype=np.float64))
        fields = dict(self.fields)
        for label, rom in fields.items():
            for interp in rom.interpolators:
                if not np.array_equal(interp.centers, table):
                    raise DimensionMismatch(
                        f"field '{label}' interpolator centers differ from the "
                        "parameter table"
                    )
        table = np.array(table, copy=True)
        table.setflags(write=False)
        rng = self.parameter_range
        if rng is not None:
            rng = np.atleast_2d(np.asarray(rng, dtype=np.float64))
            if rng.shape != (table.shape[1], 2) or (rng[:, 0] >= rng[:, 1]).any():
                raise DimensionMismatch(
                    f"parameter range must be ({table.shape[1]}, 2) with low < high"
                )
            rng = np.array(rng, copy=True)
            rng.setflags(write=False)
        object.__setattr__(self, "fields", MappingProxyType(fields))
        object.__setattr__(self, "parameter_table", table)
        object.__setattr__(self, "parameter_range", rng)

    @property
    def n_snapshots(self) -> int:
        return self.parameter_table.shape[0]

    @property
    def parameter_dim(self) -> int:
        return self.parameter_table.shape[1]

    @property
    def training_bounds(self) -> np.ndarray:
        """(parameter_dim, 2) min/max of the training parameters."""
        return np.column_stack(
            [self.parameter_table.min(axis=0), self.parameter_table.max(axis=0)]
        )

    def is_extrapolated(self, target) -> bool:
        """True when the target lies outside the training bounding box."""
        point = _as_parameter(target, self.parameter_dim)
        bounds = self.training_bounds
        return bool((point < bounds[:, 0]).any() or (point > bounds[:, 1]).any())

    def check_parameter_range(self, target) -> None:
        """Raise ParameterOutOfRange when a declared range exists and the
        target violates it. No-op for models without a declared range."""
        if self.parameter_range is None:
            return
        point = _as_parameter(target, self.parameter_dim)
        low, high = self.parameter_range[:, 0], self.parameter_range[:, 1]
        if (point < low).any() or (point > high).any():
            raise ParameterOutOfRange(
                f"parameter {point.tolist()} outside declared range "
                f"[{low.tolist()}, {high.tolist()}]",
                parameter=point.tolist(),
                low=low.tolist(),
                high=high.tolist(),
            )


def _as_parameter(target, expected_dim: int) -> np.ndarray:
    point = np.atleast_1d(np.asarray(target, dtype=np.float64))
    if point.shape != (expected_dim,):
        raise DimensionMismatch(
            f"parameter has shape {point.shape}, model expects ({expected_dim},)"
        )
    return point


def train(
    snapshot_set: SnapshotSet,
    energy_threshold: float = 0.99,
    rank_override: Mapping[str, int] | None = None,
    rbf_config: RbfConfig | None = None,
    parameter_range=None,
) -> RomModel:
    """Train a surrogate on every field of a snapshot set.

    Per field the truncation rank comes from the energy threshold unless
    ``rank_override`` pins it. Deterministic: identical inputs and options
    produce bit-identical models.
    """
    if snapshot_set.n_snapshots < 2:
        raise InsufficientSnapshots(
            f"need at least 2 snapshots, got {snapshot_set.n_snapshots}"
        )
    config = rbf_config or RbfConfig()
    overrides = dict(rank_override or {})
    unknown = set(overrides) - set(snapshot_set.fields)
    if unknown:
        raise UnknownField(f"rank override for unknown fields: {sorted(unknown)}")

    fields: dict[str, FieldRom] = {}
    for label, matrix in snapshot_set.fields.items():
        basis = pod.compute_pod_basis(matrix)
        k = overrides.get(label, None)
        if k is None:
            k = pod.rank_for_energy(basis, energy_threshold)
        basis = pod.truncate(basis, k)
        coeffs = pod.project_coefficients(basis, matrix)
        interpolators = rbf.fit_many(
            snapshot_set.parameter_table,
            coeffs.matrix,
            shape=config.shape,
            ridge=config.ridge,
        )
        fields[label] = FieldRom(basis=basis, interpolators=tuple(interpolators))
    return RomModel(
        fields=fields,
        parameter_table=snapshot_set.parameter_table,
        energy_threshold=float(energy_threshold),
        parameter_range=parameter_range,
    )


def evaluate_field(model: RomModel, field: str, target) -> np.ndarray:
    """Reconstructed field vector at a parameter point: interpolate each
    mode's coefficient, then combine the modes."""
    rom = model.fields.get(field)
    if rom is None:
        raise UnknownField(
            f"field '{field}' not in model (has {sorted(model.fields)})"
        )
    point = _as_parameter(target, model.parameter_dim)
    coeffs = rbf.evaluate_shared(rom.interpolators, point)
    return pod.reconstruct(rom.basis, coeffs)


@dataclass(frozen=True)
class ValidationEntry:
    """Error and timing for one (field, held-out parameter) pair."""

    field: str
    parameter: tuple[float, ...]
    error_percent: float
    eval_seconds: float


@dataclass(frozen=True)
class ValidationReport:
    """Per-field errors at every held-out parameter plus truncation ranks."""

    entries: tuple[ValidationEntry, ...]
    ranks: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "ranks", MappingProxyType(dict(self.ranks)))

    def worst_error(self) -> float:
        return max(e.error_percent for e in self.entries)

    def by_field(self) -> dict[str, list[ValidationEntry]]:
        grouped: dict[str, list[ValidationEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.field, []).append(entry)
        return grouped


def validate(model: RomModel, heldout: SnapshotSet) -> ValidationReport:
    """Compare surrogate predictions against held-out snapshots.

    Every held-out field must exist in the model with matching dof count.
    Timing per entry is the median of 5 repeated evaluations on a monotonic
    clock.
    """
    missing = set(heldout.fields) - set(model.fields)
    if missing:
        raise FieldMismatch(f"model lacks held-out fields: {sorted(missing)}")
    if heldout.parameter_dim != model.parameter_dim:
        raise DimensionMismatch(
            f"held-out parameters have dim {heldout.parameter_dim}, "
            f"model expects {model.parameter_dim}"
        )
    entries = []
    for label, matrix in heldout.fields.items():
        if matrix.n_dof != model.fields[label].n_dof:
            raise DimensionMismatch(
                f"field '{label}': held-out n_dof {matrix.n_dof} != model "
                f"{model.fields[label].n_dof}"
            )
        for i in range(heldout.n_snapshots):
            point = heldout.parameter_table[i]
            timings = []
            for _ in range(TIMING_REPETITIONS):
                start = time.perf_counter()
                prediction = evaluate_field(model, label, point)
                timings.append(time.perf_counter() - start)
            error = pod.relative_error_l2(matrix.data[:, i], prediction)
            entries.append(
                ValidationEntry(
                    field=label,
                    parameter=tuple(point.tolist()),
                    error_percent=error,
                    eval_seconds=float(np.median(timings)),
                )
            )
    ranks = {label: rom.rank for label, rom in model.fields.items()}
    return ValidationReport(entries=tuple(entries), ranks=ranks)


# --- persistence ---------------------------------------------------------------


def _pack_matrix(buf: bytearray, arr: np.ndarray) -> None:
    buf += np.ascontiguousarray(arr, dtype="<f8").tobytes(order="F")


class _Cursor:
    """Sequential reader raising CorruptModel on truncation."""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, count: int) -> bytes:
        if self.offset + count > len(self.data):
            raise CorruptModel("model file truncated")
        chunk = self.data[self.offset : self.offset + count]
        self.offset += count
        return chunk

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def matrix(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        raw = self.take(count * 8)
        return (
            np.frombuffer(raw, dtype="<f8")
            .reshape(shape, order="F")
            .astype(np.float64, copy=True)
        )


def save_model(model: RomModel, path) -> None:
    """Write the binary model container (bit-exact, CRC-32 protected)."""
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<ii", model.format_version, len(model.fields))
    buf += struct.pack("<d", model.energy_threshold)
    buf += struct.pack("<qq", model.n_snapshots, model.parameter_dim)
    _pack_matrix(buf, model.parameter_table)
    if model.parameter_range is None:
        buf += struct.pack("<B", 0)
    else:
        buf += struct.pack("<B", 1)
        _pack_matrix(buf, model.parameter_range)
    for label, rom in model.fields.items():
        encoded = label.encode("utf-8")
        buf += struct.pack("<I", len(encoded))
        buf += encoded
        buf += struct.pack("<qqq", rom.n_dof, rom.rank, model.n_snapshots)
        _pack_matrix(buf, rom.basis.truncated_modes)
        _pack_matrix(buf, rom.basis.singular_values)
        for interp in rom.interpolators:
            _pack_matrix(buf, interp.centers)
            buf += struct.pack("<dd", interp.shape, interp.regularization)
            _pack_matrix(buf, interp.weights)
    buf += struct.pack("<I", zlib.crc32(bytes(buf)))
    try:
        Path(path).write_bytes(bytes(buf))
    except OSError as exc:
        raise IoFailure(f"cannot write model to {path}: {exc}") from exc


def load_model(path) -> RomModel:
    """Read a model container, verifying checksum, magic, and version."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read model from {path}: {exc}") from exc
    return load_model_bytes(data)


def load_model_bytes(data: bytes) -> RomModel:
    """Parse an in-memory model container; see :func:`load_model`."""
    if len(data) < len(MAGIC) + 4:
        raise CorruptModel("model file truncated")
    payload, stored = data[:-4], data[-4:]
    if zlib.crc32(payload) != struct.unpack("<I", stored)[0]:
        raise CorruptModel("checksum mismatch")
    cur = _Cursor(payload)
    if cur.take(4) != MAGIC:
        raise CorruptModel("bad magic bytes")
    version, field_count = cur.unpack("<ii")
    if version != FORMAT_VERSION:
        raise VersionMismatch(
            f"model format version {version} not supported (expected {FORMAT_VERSION})"
        )
    if field_count < 0:
        raise CorruptModel(f"negative field count {field_count}")
    (energy_threshold,) = cur.unpack("<d")
    n_snapshots, parameter_dim = cur.unpack("<qq")
    if n_snapshots < 1 or parameter_dim < 1:
        raise CorruptModel("invalid parameter table dimensions")
    table = cur.matrix((n_snapshots, parameter_dim))
    (has_range,) = cur.unpack("<B")
    parameter_range = cur.matrix((parameter_dim, 2)) if has_range else None

    fields: dict[str, FieldRom] = {}
    for _ in range(field_count):
        (label_len,) = cur.unpack("<I")
        label = cur.take(label_len).decode("utf-8")
        n_dof, rank, n_s = cur.unpack("<qqq")
        if n_s != n_snapshots or n_dof < 1 or not 1 <= rank:
            raise CorruptModel(f"inconsistent field block for '{label}'")
        modes = cur.matrix((n_dof, rank))
        svals = cur.matrix((rank,))
        interpolators = []
        for _ in range(rank):
            centers = cur.matrix((n_snapshots, parameter_dim))
            shape, ridge = cur.unpack("<dd")
            weights = cur.matrix((n_snapshots,))
            interpolators.append(
                RbfInterpolator(
                    centers=centers, shape=shape, weights=weights, regularization=ridge
                )
            )
        basis = PodBasis(modes=modes, singular_values=svals, truncation_rank=rank)
        fields[label] = FieldRom(basis=basis, interpolators=tuple(interpolators))
    if cur.offset != len(payload):
        raise CorruptModel(f"{len(payload) - cur.offset} unexpected trailing bytes")
    return RomModel(
        fields=fields,
        parameter_table=table,
        energy_threshold=energy_threshold,
        format_version=version,
        parameter_range=parameter_range,
    )
