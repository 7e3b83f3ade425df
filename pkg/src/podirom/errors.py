"""Exception types raised across the toolkit.

Every domain failure maps to one concrete subclass of :class:`RomError` so
callers (CLI, HTTP service) can translate failures into reason codes without
string matching.
"""


class RomError(Exception):
    """Base class for all toolkit errors."""

    #: short machine-readable reason code, overridden per subclass
    code = "error"


# --- snapshot / POD ----------------------------------------------------------

class LengthMismatch(RomError):
    """Snapshot vectors of unequal length."""

    code = "length_mismatch"


class NonFinite(RomError):
    """A NaN or Inf entry where finite data is required."""

    code = "non_finite"

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalFailure(RomError):
    """A numerical kernel (e.g. SVD) failed to converge."""

    code = "numerical_failure"


class DegenerateSpectrum(RomError):
    """All singular values are zero; energy fractions are undefined."""

    code = "degenerate_spectrum"


class RankOutOfRange(RomError):
    """Requested truncation rank outside [1, stored rank]."""

    code = "rank_out_of_range"


class DimensionMismatch(RomError):
    """Operand dimensions are incompatible."""

    code = "dimension_mismatch"


class ZeroReference(RomError):
    """Relative error against a zero reference vector."""

    code = "zero_reference"


# --- RBF ----------------------------------------------------------------------

class InsufficientCenters(RomError):
    """Fewer centers than the operation requires."""

    code = "insufficient_centers"


class DuplicateCenters(RomError):
    """Two interpolation centers coincide."""

    code = "duplicate_centers"


class SingularSystem(RomError):
    """Kernel system numerically singular beyond the applied ridge."""

    code = "singular_system"

    def __init__(self, message, condition_estimate=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate


# --- pipeline -----------------------------------------------------------------

class InsufficientSnapshots(RomError):
    """Too few snapshots to train an interpolating model."""

    code = "insufficient_snapshots"


class UnknownField(RomError):
    """Field label not present in the model."""

    code = "unknown_field"


class FieldMismatch(RomError):
    """Held-out set contains fields the model does not know."""

    code = "field_mismatch"


class ParameterOutOfRange(RomError):
    """Evaluation parameter outside the model's declared admissible range."""

    code = "parameter_out_of_range"

    def __init__(self, message, parameter=None, low=None, high=None):
        super().__init__(message)
        self.parameter = parameter
        self.low = low
        self.high = high


# --- persistence ----------------------------------------------------------------

class IoFailure(RomError):
    """Underlying file operation failed."""

    code = "io_failure"


class VersionMismatch(RomError):
    """Stored format version not supported by this build."""

    code = "version_mismatch"


class CorruptModel(RomError):
    """Model container failed structural or checksum validation."""

    code = "corrupt_model"


class CorruptData(RomError):
    """Snapshot container failed structural or checksum validation."""

    code = "corrupt_data"


class InvalidSpec(RomError):
    """Synthetic-manifold specification is inconsistent."""

    code = "invalid_spec"


# --- windkessel ------------------------------------------------------------------

class NonFiniteSignal(RomError):
    """Flow-rate signal produced a NaN or Inf sample."""

    code = "non_finite_signal"


# --- pump --------------------------------------------------------------------------

class NoRealRoot(RomError):
    """Head-flow quadratic has no real solution for the requested head."""

    code = "no_real_root"


class FlowOutOfRange(RomError):
    """Computed pump flow falls outside the admissible range."""

    code = "flow_out_of_range"

    def __init__(self, message, computed_flow=None, pf_min=None, pf_max=None):
        super().__init__(message)
        self.computed_flow = computed_flow
        self.pf_min = pf_min
        self.pf_max = pf_max


class AmbiguousRoot(RomError):
    """Both quadratic roots are admissible; the operating point is not unique."""

    code = "ambiguous_root"
