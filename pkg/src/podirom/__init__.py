"""Non-intrusive reduced-order modeling toolkit.

Core pipeline: snapshot matrices -> SVD modal basis -> per-mode Gaussian RBF
interpolation of the modal coefficients -> real-time field reconstruction at
new parameter values. Companion models: a three-element Windkessel outlet
integrator and an analytical pump head-flow curve with operator panels.
"""

from . import errors, pipeline, pod, pump, rbf, snapshots, windkessel
from .errors import RomError
from .pipeline import (
    RbfConfig,
    RomModel,
    ValidationReport,
    evaluate_field,
    load_model,
    save_model,
    train,
    validate,
)
from .pod import (
    ModalCoefficients,
    PodBasis,
    SnapshotMatrix,
    assemble_snapshot_matrix,
    compute_pod_basis,
    cumulative_energy,
    rank_for_energy,
    reconstruct,
    relative_error_l2,
    truncate,
)
from .pump import PumpCurve, PumpOperatingPoint
from .rbf import RbfInterpolator
from .snapshots import (
    CoefficientFunction,
    SnapshotSet,
    SyntheticManifoldSpec,
    generate_multi_field_set,
    generate_synthetic_set,
    read_snapshot_set,
    write_snapshot_set,
)
from .windkessel import WindkesselParams, WindkesselState

__version__ = "0.1.0"

__all__ = [
    "errors",
    "pod",
    "rbf",
    "pipeline",
    "snapshots",
    "windkessel",
    "pump",
    "RomError",
    "SnapshotMatrix",
    "PodBasis",
    "ModalCoefficients",
    "assemble_snapshot_matrix",
    "compute_pod_basis",
    "cumulative_energy",
    "rank_for_energy",
    "truncate",
    "reconstruct",
    "relative_error_l2",
    "RbfInterpolator",
    "RbfConfig",
    "RomModel",
    "ValidationReport",
    "train",
    "evaluate_field",
    "validate",
    "save_model",
    "load_model",
    "SnapshotSet",
    "SyntheticManifoldSpec",
    "CoefficientFunction",
    "generate_synthetic_set",
    "generate_multi_field_set",
    "read_snapshot_set",
    "write_snapshot_set",
    "WindkesselParams",
    "WindkesselState",
    "PumpCurve",
    "PumpOperatingPoint",
]
