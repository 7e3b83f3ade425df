"""Analytical head-speed-flow model of a centrifugal blood pump.

The pressure head across the pump follows a quadratic fit

    head = k_a * speed**2 + k_b * speed * flow + k_c * flow**2

with speed in rpm, flow in l/min, and head in mmHg. The default constants
describe the supported device; flow outside the admissible clinical range
[pf_min, pf_max] (default [3, 5] l/min) is rejected with a typed error that
carries the offending value so front ends can show it.

The inverse solve (flow from speed and head) uses the numerically stable
quadratic formulation: the larger-magnitude root comes from
``-(b + sign(b) * sqrt(disc)) / 2`` and the other from Vieta's product, which
avoids cancellation when the head sits close to the shutoff value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousRoot, FlowOutOfRange, NoRealRoot

__all__ = [
    "PumpCurve",
    "PumpOperatingPoint",
    "head_from_speed_flow",
    "flow_from_speed_head",
    "curve_samples",
    "panel1",
    "panel2_calibrate",
    "panel2_predict",
]

# slack on the admissible-range check so a roundtrip landing one ulp past a
# boundary is not rejected
RANGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class PumpCurve:
    """Quadratic fit constants plus the admissible flow range.

    k_a: mmHg/rpm^2; k_b: mmHg/(rpm * l/min); k_c: mmHg/(l/min)^2.
    """

    k_a: float = 3.45e-6
    k_b: float = -5.9e-5
    k_c: float = -1.45
    pf_min: float = 3.0
    pf_max: float = 5.0

    def __post_init__(self):
        values = (self.k_a, self.k_b, self.k_c, self.pf_min, self.pf_max)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("curve constants must be finite")
        if self.k_c == 0.0:
            raise ValueError("k_c must be nonzero (inverse needs a genuine quadratic)")
        if not self.pf_min < self.pf_max:
            raise ValueError(f"pf_min={self.pf_min} must be < pf_max={self.pf_max}")


@dataclass(frozen=True)
class PumpOperatingPoint:
    """Consistent (speed rpm, flow l/min, head mmHg) triple on the curve."""

    speed: float
    flow: float
    head: float


def _require_speed(omega: float) -> None:
    if not omega > 0:
        raise ValueError(f"pump speed must be > 0 rpm, got {omega}")


def head_from_speed_flow(curve: PumpCurve, omega: float, pf: float) -> float:
    """Forward evaluation of the quadratic fit."""
    _require_speed(omega)
    return curve.k_a * omega**2 + curve.k_b * omega * pf + curve.k_c * pf**2


def flow_from_speed_head(curve: PumpCurve, omega: float, head: float) -> float:
    """Flow rate for a given speed and head.

    Solves ``k_c*pf**2 + k_b*omega*pf + (k_a*omega**2 - head) = 0`` and
    returns the unique nonnegative root, checked against the admissible
    range. Raises NoRealRoot (negative discriminant), FlowOutOfRange (root
    outside [pf_min, pf_max], including the no-nonnegative-root case), or
    AmbiguousRoot (both roots nonnegative; defensive, cannot happen with the
    default signs when head < shutoff).
    """
    _require_speed(omega)
    a, b, c = curve.k_c, curve.k_b * omega, curve.k_a * omega**2 - head
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NoRealRoot(
            f"no real flow for omega={omega} rpm, head={head} mmHg "
            f"(discriminant {disc:.3e})"
        )
    q = -(b + math.copysign(math.sqrt(disc), b)) / 2.0
    if q != 0.0:
        roots = (q / a, c / q)
    else:  # b == 0 and disc == 0 imply c == 0: double root at zero
        roots = (0.0, 0.0)
    nonnegative = sorted({r for r in roots if r >= 0.0})
    if len(nonnegative) == 2:
        raise AmbiguousRoot(
            f"both roots admissible ({nonnegative[0]:.6g}, {nonnegative[1]:.6g})"
        )
    pf = nonnegative[0] if nonnegative else max(roots)
    if not curve.pf_min - RANGE_TOLERANCE <= pf <= curve.pf_max + RANGE_TOLERANCE:
        raise FlowOutOfRange(
            f"computed flow {pf:.6g} l/min outside the admissible range "
            f"[{curve.pf_min:g}, {curve.pf_max:g}]",
            computed_flow=pf,
            pf_min=curve.pf_min,
            pf_max=curve.pf_max,
        )
    return pf


def curve_samples(curve: PumpCurve, omega: float, n: int) -> list[tuple[float, float]]:
    """``n`` equispaced (flow, head) pairs over the admissible flow range."""
    _require_speed(omega)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    flows = np.linspace(curve.pf_min, curve.pf_max, n)
    return [(float(pf), head_from_speed_flow(curve, omega, float(pf))) for pf in flows]


def panel1(curve: PumpCurve, head: float, omega: float) -> PumpOperatingPoint:
    """Designer panel: head and speed in, full operating point out."""
    pf = flow_from_speed_head(curve, omega, head)
    return PumpOperatingPoint(speed=omega, flow=pf, head=head)


def panel2_calibrate(curve: PumpCurve, omega_measured: float, pf_measured: float) -> float:
    """Ramp-test calibration: the head implied by a measured (speed, flow)
    pair. The measurement itself is not range-checked; only predictions are."""
    return head_from_speed_flow(curve, omega_measured, pf_measured)


def panel2_predict(curve: PumpCurve, head_fixed: float, omega_new: float) -> PumpOperatingPoint:
    """Ramp-test what-if: flow at a new speed, holding the calibrated head."""
    pf = flow_from_speed_head(curve, omega_new, head_fixed)
    return PumpOperatingPoint(speed=omega_new, flow=pf, head=head_fixed)
