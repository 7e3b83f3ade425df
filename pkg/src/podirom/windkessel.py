"""Three-element RCR lumped-parameter outlet model.

One scalar ODE per outlet governs the proximal pressure:

    C * dp_p/dt + (p_p - p_d) / R_d = Q

and the outlet pressure follows algebraically as ``p = p_p + R_p * Q``; the
algebraic relation is eliminated analytically, so no constraint drift can
occur. Time integration is the first-order backward differentiation formula
(implicit Euler), unconditionally stable for this problem.

All quantities are CGS (dyne, cm, s). Conversions to clinical units live in
the helpers at the bottom (1 mmHg = 1333.22 dyne/cm^2,
1 l/min = 16.6667 cm^3/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import IoFailure, NonFiniteSignal

__all__ = [
    "WindkesselParams",
    "WindkesselState",
    "SimulationTrace",
    "bdf1_step",
    "outlet_pressure",
    "steady_state",
    "simulate",
    "write_trace_csv",
    "REFERENCE_OUTLETS",
    "MMHG_PER_DYNE_CM2",
    "CM3S_PER_LMIN",
    "dyne_cm2_to_mmhg",
    "mmhg_to_dyne_cm2",
    "lmin_to_cm3s",
    "cm3s_to_lmin",
]

MMHG_PER_DYNE_CM2 = 1.0 / 1333.22
CM3S_PER_LMIN = 16.6667

FlowSignal = Union[Callable[[float], float], tuple]


@dataclass(frozen=True)
class WindkesselParams:
    """RCR coefficients for one outlet, CGS units.

    r_proximal, r_distal: dyne*s/cm^5; compliance: cm^5/dyne;
    p_distal: reference distal pressure, dyne/cm^2.
    """

    r_proximal: float
    r_distal: float
    compliance: float
    p_distal: float = 0.0

    def __post_init__(self):
        for name in ("r_proximal", "r_distal", "compliance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value}")
        if not math.isfinite(self.p_distal):
            raise ValueError("p_distal must be finite")

    @property
    def time_constant(self) -> float:
        """Decay time constant R_d * C, seconds."""
        return self.r_distal * self.compliance


@dataclass(frozen=True)
class WindkesselState:
    """Proximal pressure (dyne/cm^2) at a simulation time (s)."""

    p_proximal: float
    time: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.p_proximal) and math.isfinite(self.time)):
            raise ValueError("state must be finite")
        if self.time < 0:
            raise ValueError("time must be >= 0")


def bdf1_step(
    state: WindkesselState, params: WindkesselParams, q: float, dt: float
) -> WindkesselState:
    """One implicit-Euler update of the proximal pressure.

    p_new = (p + (dt/C) * (Q + p_d/R_d)) / (1 + dt/(R_d*C)); q is the flow
    rate at the end of the step.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    c, r_d, p_d = params.compliance, params.r_distal, params.p_distal
    p_new = (state.p_proximal + (dt / c) * (q + p_d / r_d)) / (1.0 + dt / (r_d * c))
    return WindkesselState(p_proximal=p_new, time=state.time + dt)


def outlet_pressure(state: WindkesselState, params: WindkesselParams, q: float) -> float:
    """Outlet pressure p = p_p + R_p * Q."""
    return state.p_proximal + params.r_proximal * q


def steady_state(params: WindkesselParams, q: float) -> tuple[float, float]:
    """Equilibrium (p_proximal, p_outlet) for a constant flow rate."""
    p_p = params.p_distal + params.r_distal * q
    return p_p, p_p + params.r_proximal * q


@dataclass(frozen=True)
class SimulationTrace:
    """Uniformly sampled (t, p_proximal, p_outlet) arrays, initial state included."""

    t: np.ndarray
    p_proximal: np.ndarray
    p_outlet: np.ndarray

    def __len__(self) -> int:
        return self.t.shape[0]


def _signal_at(q_of_t: FlowSignal, t: float) -> float:
    if callable(q_of_t):
        value = float(q_of_t(t))
    else:
        times, values = q_of_t
        value = float(np.interp(t, np.asarray(times, float), np.asarray(values, float)))
    if not math.isfinite(value):
        raise NonFiniteSignal(f"flow signal returned {value} at t={t}")
    return value


def simulate(
    params: WindkesselParams,
    q_of_t: FlowSignal,
    dt: float,
    t_end: float,
    initial: WindkesselState,
) -> SimulationTrace:
    """March the outlet from ``initial`` to (at least) ``t_end`` with fixed dt.

    ``q_of_t`` is either a callable of time or a ``(times, values)`` pair of
    uniformly sampled arrays (linearly interpolated, end values held outside
    the sample range). The flow feeding each implicit step is evaluated at
    the end of that step. Trace length is ``ceil((t_end - t0)/dt) + 1``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not t_end > initial.time:
        raise ValueError(f"t_end={t_end} must exceed initial time {initial.time}")
    # tiny slack so an exact multiple of dt does not gain a step to roundoff
    n_steps = math.ceil((t_end - initial.time) / dt - 1e-9)
    times = np.empty(n_steps + 1)
    proximal = np.empty(n_steps + 1)
    outlet = np.empty(n_steps + 1)
    state = initial
    times[0] = state.time
    proximal[0] = state.p_proximal
    outlet[0] = outlet_pressure(state, params, _signal_at(q_of_t, state.time))
    for i in range(1, n_steps + 1):
        q = _signal_at(q_of_t, state.time + dt)
        state = bdf1_step(state, params, q, dt)
        times[i] = state.time
        proximal[i] = state.p_proximal
        outlet[i] = outlet_pressure(state, params, q)
    return SimulationTrace(t=times, p_proximal=proximal, p_outlet=outlet)


def write_trace_csv(trace: SimulationTrace, path) -> None:
    """Plain-text CSV export: header ``t,p_proximal,p_outlet``, 17
    significant digits per value (lossless for 64-bit floats)."""
    rows = np.column_stack([trace.t, trace.p_proximal, trace.p_outlet])
    try:
        np.savetxt(
            Path(path),
            rows,
            fmt="%.17g",
            delimiter=",",
            header="t,p_proximal,p_outlet",
            comments="",
        )
    except OSError as exc:
        raise IoFailure(f"cannot write trace to {path}: {exc}") from exc


#: bundled RCR coefficient sets for the major aortic branch outlets
REFERENCE_OUTLETS: dict[str, WindkesselParams] = {
    "right_subclavian": WindkesselParams(2.56e3, 4.32e4, 3.26e-5),
    "right_common_carotid": WindkesselParams(1.63e3, 2.74e4, 5.16e-5),
    "left_common_carotid": WindkesselParams(2.38e3, 4.0e4, 3.52e-5),
    "left_subclavian": WindkesselParams(8.96e2, 1.51e4, 9.35e-5),
    "descending_aorta": WindkesselParams(1.08e2, 1.83e3, 7.72e-4),
}


def dyne_cm2_to_mmhg(p: float) -> float:
    return p * MMHG_PER_DYNE_CM2


def mmhg_to_dyne_cm2(p: float) -> float:
    return p / MMHG_PER_DYNE_CM2


def lmin_to_cm3s(q: float) -> float:
    return q * CM3S_PER_LMIN


def cm3s_to_lmin(q: float) -> float:
    return q / CM3S_PER_LMIN
