"""Snapshot-set containers, bit-exact disk persistence, and the synthetic
snapshot generator used as a verification oracle.

On disk a snapshot set is a directory holding a UTF-8 ``manifest.txt``
(``key = value`` lines: version, parameter dimension, snapshot count,
provenance, field labels and sizes) plus one binary file per field and one
for the parameter table. Binaries are column-major 64-bit little-endian
floats; each binary's CRC-32 is recorded in the manifest, so roundtrips are
bit-exact and corruption is detected at read time.

The synthetic generator draws spatial modes from a fixed 64-bit
counter-based PRNG (splitmix64), orthonormalizes them, and combines them
with smooth coefficient functions of the parameter. It returns both the
sampled snapshot set and a closure evaluating the exact noiseless field at
arbitrary parameters, which stands in for the high-fidelity solver when
checking reconstruction accuracy.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import CorruptData, InvalidSpec, IoFailure, VersionMismatch
from .pod import SnapshotMatrix

__all__ = [
    "SnapshotSet",
    "CoefficientFunction",
    "SyntheticManifoldSpec",
    "write_snapshot_set",
    "read_snapshot_set",
    "import_csv_snapshots",
    "generate_synthetic_set",
    "generate_multi_field_set",
    "generating_modes",
]

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.txt"
PARAMETERS_NAME = "parameters.bin"

# splitmix64 constants
_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@dataclass(frozen=True)
class SnapshotSet:
    """Parameter table (one row per snapshot) plus per-field snapshot matrices."""

    parameter_table: np.ndarray
    fields: Mapping[str, SnapshotMatrix]
    provenance: str = ""

    def __post_init__(self):
        table = np.atleast_2d(np.asarray(self.parameter_table, dtype=np.float64))
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ValueError(f"parameter table must be (n_s, p), got {table.shape}")
        if not np.isfinite(table).all():
            raise ValueError("parameter table contains NaN/Inf")
        n_s = table.shape[0]
        for i in range(n_s):
            for j in range(i + 1, n_s):
                if np.array_equal(table[i], table[j]):
                    raise ValueError(f"parameter rows {i} and {j} coincide")
        for label, matrix in self.fields.items():
            if matrix.n_snapshots != n_s:
                raise ValueError(
                    f"field '{label}' has {matrix.n_snapshots} snapshots, "
                    f"parameter table has {n_s} rows"
                )
        table = np.array(table, copy=True)
        table.setflags(write=False)
        object.__setattr__(self, "parameter_table", table)
        object.__setattr__(self, "fields", MappingProxyType(dict(self.fields)))

    @property
    def n_snapshots(self) -> int:
        return self.parameter_table.shape[0]

    @property
    def parameter_dim(self) -> int:
        return self.parameter_table.shape[1]


def _column_major_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes(order="F")


def _from_column_major(raw: bytes, shape: tuple[int, ...]) -> np.ndarray:
    expected = int(np.prod(shape)) * 8
    if len(raw) != expected:
        raise CorruptData(f"binary payload is {len(raw)} bytes, expected {expected}")
    return np.frombuffer(raw, dtype="<f8").reshape(shape, order="F").astype(
        np.float64, copy=True
    )


def _write_binary(path: Path, payload: bytes) -> int:
    path.write_bytes(payload)
    return zlib.crc32(payload)


def write_snapshot_set(sset: SnapshotSet, path) -> None:
    """Persist a snapshot set to a directory; see the module docstring for
    the layout. Overwrites existing files of the same names."""
    root = Path(path)
    try:
        root.mkdir(parents=True, exist_ok=True)
        lines = [
            f"version = {FORMAT_VERSION}",
            f"parameter_dim = {sset.parameter_dim}",
            f"n_snapshots = {sset.n_snapshots}",
            f"provenance = {json.dumps(sset.provenance)}",
        ]
        crc = _write_binary(root / PARAMETERS_NAME, _column_major_bytes(sset.parameter_table))
        lines.append(f"parameters.file = {PARAMETERS_NAME}")
        lines.append(f"parameters.crc32 = {crc:08x}")
        for index, (label, matrix) in enumerate(sset.fields.items()):
            filename = f"field_{index:03d}.bin"
            crc = _write_binary(root / filename, _column_major_bytes(matrix.data))
            lines.append(f"field.{index}.label = {json.dumps(label)}")
            lines.append(f"field.{index}.n_dof = {matrix.n_dof}")
            lines.append(f"field.{index}.file = {filename}")
            lines.append(f"field.{index}.crc32 = {crc:08x}")
        (root / MANIFEST_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write snapshot set to {root}: {exc}") from exc


def _parse_manifest(text: str) -> dict[str, str]:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if " = " not in line:
            raise CorruptData(f"malformed manifest line {lineno}: {line!r}")
        key, value = line.split(" = ", 1)
        entries[key.strip()] = value
    return entries


def _read_checked(root: Path, filename: str, crc_hex: str) -> bytes:
    try:
        raw = (root / filename).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {root / filename}: {exc}") from exc
    if f"{zlib.crc32(raw):08x}" != crc_hex:
        raise CorruptData(f"checksum mismatch for {filename}")
    return raw


def read_snapshot_set(path) -> SnapshotSet:
    """Load a snapshot set written by :func:`write_snapshot_set`."""
    root = Path(path)
    try:
        text = (root / MANIFEST_NAME).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read manifest in {root}: {exc}") from exc
    entries = _parse_manifest(text)
    try:
        version = int(entries["version"])
    except (KeyError, ValueError) as exc:
        raise CorruptData(f"manifest missing a valid version: {exc}") from exc
    if version != FORMAT_VERSION:
        raise VersionMismatch(
            f"snapshot format version {version} not supported (expected {FORMAT_VERSION})"
        )
    try:
        p = int(entries["parameter_dim"])
        n_s = int(entries["n_snapshots"])
        provenance = json.loads(entries["provenance"])
        raw = _read_checked(root, entries["parameters.file"], entries["parameters.crc32"])
        table = _from_column_major(raw, (n_s, p))
        fields: dict[str, SnapshotMatrix] = {}
        index = 0
        while f"field.{index}.label" in entries:
            label = json.loads(entries[f"field.{index}.label"])
            n_dof = int(entries[f"field.{index}.n_dof"])
            raw = _read_checked(
                root, entries[f"field.{index}.file"], entries[f"field.{index}.crc32"]
            )
            data = _from_column_major(raw, (n_dof, n_s))
            fields[label] = SnapshotMatrix(data=data, field_name=label)
            index += 1
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CorruptData(f"malformed manifest in {root}: {exc}") from exc
    return SnapshotSet(parameter_table=table, fields=fields, provenance=provenance)


def import_csv_snapshots(
    parameters_csv, field_csvs: Mapping[str, str], provenance: str = "csv import"
) -> SnapshotSet:
    """Build a snapshot set from plain CSV files (one snapshot per column,
    ``,`` delimiter, ``.`` decimal, no header).

    CSV carries decimal text, so imports are lossy; the provenance string is
    tagged accordingly.
    """
    try:
        table = np.loadtxt(parameters_csv, delimiter=",", ndmin=2, dtype=np.float64)
        fields = {}
        for label, csv_path in field_csvs.items():
            data = np.loadtxt(csv_path, delimiter=",", ndmin=2, dtype=np.float64)
            fields[label] = SnapshotMatrix(data=data, field_name=label)
    except OSError as exc:
        raise IoFailure(f"cannot read CSV: {exc}") from exc
    except ValueError as exc:
        raise CorruptData(f"malformed CSV: {exc}") from exc
    return SnapshotSet(
        parameter_table=table,
        fields=fields,
        provenance=f"{provenance} [lossy CSV import]",
    )


# --- synthetic manifold generator ---------------------------------------------


def _splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Vectorized splitmix64 stream: output i is a pure function of
    ``seed + (offset + i + 1) * GAMMA``, identical on every platform."""
    with np.errstate(over="ignore"):
        idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
    return z


def _uniform_symmetric(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Doubles in [-1, 1) from the splitmix64 stream."""
    bits = _splitmix64(seed, count, offset) >> np.uint64(11)
    return 2.0 * (bits.astype(np.float64) * 2.0**-53) - 1.0


@dataclass(frozen=True)
class CoefficientFunction:
    """Smooth scalar map of the leading parameter coordinate.

    kind "polynomial": coefficients (c0, c1, ...) give sum(c_i * t**i).
    kind "sinusoidal": coefficients (amplitude, frequency, phase, offset)
    give amplitude * sin(frequency * t + phase) + offset.
    """

    kind: str
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("polynomial", "sinusoidal"):
            raise InvalidSpec(f"unknown coefficient kind {self.kind!r}")
        coeffs = tuple(float(c) for c in self.coefficients)
        if not coeffs:
            raise InvalidSpec("coefficient function needs at least one coefficient")
        if self.kind == "sinusoidal" and len(coeffs) != 4:
            raise InvalidSpec(
                "sinusoidal functions take (amplitude, frequency, phase, offset)"
            )
        if not all(np.isfinite(coeffs)):
            raise InvalidSpec("coefficient values must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def __call__(self, point) -> float:
        t = float(np.atleast_1d(np.asarray(point, dtype=np.float64))[0])
        if self.kind == "polynomial":
            return float(sum(c * t**i for i, c in enumerate(self.coefficients)))
        amplitude, frequency, phase, offset = self.coefficients
        return float(amplitude * np.sin(frequency * t + phase) + offset)


@dataclass(frozen=True)
class SyntheticManifoldSpec:
    """Recipe for one synthetic field: mode count and shapes come from the
    coefficient functions; spatial modes are drawn from the seeded PRNG and
    orthonormalized."""

    n_dof: int
    coefficient_functions: tuple[CoefficientFunction, ...]
    parameter_samples: np.ndarray
    noise_amplitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        functions = tuple(self.coefficient_functions)
        if not functions:
            raise InvalidSpec("need at least one coefficient function")
        if self.n_dof < len(functions):
            raise InvalidSpec(
                f"n_dof={self.n_dof} smaller than mode count {len(functions)}"
            )
        samples = np.atleast_2d(np.asarray(self.parameter_samples, dtype=np.float64))
        if samples.shape[0] < 1 or not np.isfinite(samples).all():
            raise InvalidSpec("parameter samples must be a finite (n_s, p) table")
        if self.noise_amplitude < 0:
            raise InvalidSpec("noise amplitude must be >= 0")
        samples = np.array(samples, copy=True)
        samples.setflags(write=False)
        object.__setattr__(self, "coefficient_functions", functions)
        object.__setattr__(self, "parameter_samples", samples)

    @property
    def n_modes(self) -> int:
        return len(self.coefficient_functions)


def _orthonormalize(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass; column signs
    fixed so the largest-magnitude entry is positive."""
    q = np.array(columns, dtype=np.float64)
    n, r = q.shape
    for j in range(r):
        v = q[:, j]
        for _ in range(2):
            for i in range(j):
                v = v - (q[:, i] @ v) * q[:, i]
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise InvalidSpec("degenerate random draw produced a zero mode")
        q[:, j] = v / norm
    idx = np.argmax(np.abs(q), axis=0)
    signs = np.sign(q[idx, np.arange(r)])
    signs[signs == 0] = 1.0
    return q * signs


def generating_modes(spec: SyntheticManifoldSpec) -> np.ndarray:
    """The orthonormal spatial modes implied by a spec (n_dof x r)."""
    r = spec.n_modes
    draws = _uniform_symmetric(spec.seed, spec.n_dof * r).reshape(spec.n_dof, r)
    return _orthonormalize(draws)


def generate_synthetic_set(
    spec: SyntheticManifoldSpec, field_name: str = "field"
) -> tuple[SnapshotSet, Callable[[np.ndarray], np.ndarray]]:
    """Sample the manifold at the spec's parameters.

    Returns the snapshot set and an evaluator giving the exact noiseless
    field at arbitrary parameter points (the oracle). Identical specs produce
    bit-identical sets.
    """
    modes = generating_modes(spec)
    samples = spec.parameter_samples
    coeff = np.array(
        [[fn(pi) for pi in samples] for fn in spec.coefficient_functions],
        dtype=np.float64,
    )
    data = modes @ coeff
    if spec.noise_amplitude > 0:
        noise = _uniform_symmetric(
            spec.seed, data.size, offset=modes.size
        ).reshape(data.shape)
        data = data + spec.noise_amplitude * noise

    def exact_field(point) -> np.ndarray:
        c = np.array([fn(point) for fn in spec.coefficient_functions])
        return modes @ c

    sset = SnapshotSet(
        parameter_table=samples,
        fields={field_name: SnapshotMatrix(data=data, field_name=field_name)},
        provenance=f"synthetic manifold (seed={spec.seed}, r={spec.n_modes}, "
        f"noise={spec.noise_amplitude})",
    )
    return sset, exact_field


def generate_multi_field_set(
    specs: Mapping[str, SyntheticManifoldSpec],
) -> tuple[SnapshotSet, dict[str, Callable[[np.ndarray], np.ndarray]]]:
    """Merge several single-field manifolds sharing one parameter table."""
    if not specs:
        raise InvalidSpec("need at least one field spec")
    items = list(specs.items())
    table = items[0][1].parameter_samples
    fields = {}
    evaluators = {}
    for label, spec in items:
        if not np.array_equal(spec.parameter_samples, table):
            raise InvalidSpec(f"field '{label}' has a different parameter table")
        single, evaluator = generate_synthetic_set(spec, field_name=label)
        fields[label] = single.fields[label]
        evaluators[label] = evaluator
    seeds = ",".join(str(spec.seed) for _, spec in items)
    sset = SnapshotSet(
        parameter_table=table,
        fields=fields,
        provenance=f"synthetic manifold set (seeds={seeds})",
    )
    return sset, evaluators
