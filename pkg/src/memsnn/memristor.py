"""Behavioral RRAM device models.

Two kinds are supported: an ideal device with a fixed, symmetric programming
threshold, and a realistic one whose reset threshold grows as resistance
grows and whose conductance change saturates toward either bound.

Conductances are in uS, voltages in V, times in ms, so read currents come
out in uA and rates are in uS/(V*ms).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class DeviceKind(enum.Enum):
    IDEAL = "ideal"
    REALISTIC = "realistic"


@dataclass(frozen=True)
class DeviceParams:
    """Crosspoint device constants.

    For the ideal kind both polarities share threshold_pos; the negative-side
    fields are ignored. rate_pos / rate_neg scale the over-threshold
    conductance change per volt of excess per ms.
    """

    g_min: float = 2.0                 # uS
    g_max: float = 50.0                # uS (g_max/g_min = 25 for the realistic default)
    threshold_pos: float = 1.0         # V
    threshold_neg_low: float = 1.0     # V magnitude, reset threshold at g_max
    threshold_neg_high: float = 1.8    # V magnitude, reset threshold at g_min
    rate_pos: float = 0.5              # uS/(V*ms)
    rate_neg: float = 0.5              # uS/(V*ms)
    kind: DeviceKind = DeviceKind.IDEAL

    def __post_init__(self) -> None:
        if not (0 < self.g_min < self.g_max):
            raise ValueError("need 0 < g_min < g_max")
        if self.threshold_pos <= 0:
            raise ValueError("threshold_pos must be positive")
        if not (self.threshold_neg_high >= self.threshold_neg_low > 0):
            raise ValueError("need threshold_neg_high >= threshold_neg_low > 0")
        if self.rate_pos < 0 or self.rate_neg < 0:
            raise ValueError("rates must be non-negative")

    @property
    def g_range(self) -> float:
        return self.g_max - self.g_min

    @property
    def g_mid(self) -> float:
        return 0.5 * (self.g_min + self.g_max)


@dataclass
class DeviceState:
    """One crosspoint: just its conductance, always clamped to [g_min, g_max]."""

    conductance: float


def read_current(state: DeviceState, voltage: float) -> float:
    """Ohmic read, uA = uS * V. Reads never mutate the device."""
    return state.conductance * voltage


def effective_thresholds(state: DeviceState, params: DeviceParams) -> tuple[float, float]:
    """(set threshold, reset threshold magnitude) for the current conductance.

    Ideal devices keep both fixed at threshold_pos. Realistic devices keep the
    set side fixed but interpolate the reset side linearly between
    threshold_neg_low (at g_max) and threshold_neg_high (at g_min): the more
    resistive the device, the harder it is to reset further.
    """
    if params.kind is DeviceKind.IDEAL:
        return params.threshold_pos, params.threshold_pos
    frac_from_top = (params.g_max - state.conductance) / params.g_range
    v_neg = params.threshold_neg_low + (params.threshold_neg_high - params.threshold_neg_low) * frac_from_top
    return params.threshold_pos, v_neg


def apply_voltage(state: DeviceState, params: DeviceParams, voltage: float, dt: float) -> DeviceState:
    """Advance the conductance under an applied voltage held for dt.

    Below threshold nothing happens; above it the change is proportional to
    the excess, scaled for the realistic kind by how far the conductance sits
    from the bound it is moving toward (saturation).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    v_pos, v_neg = effective_thresholds(state, params)
    g = state.conductance
    if voltage > v_pos:
        scale = 1.0 if params.kind is DeviceKind.IDEAL else (params.g_max - g) / params.g_range
        g += params.rate_pos * (voltage - v_pos) * dt * scale
    elif voltage < -v_neg:
        scale = 1.0 if params.kind is DeviceKind.IDEAL else (g - params.g_min) / params.g_range
        g -= params.rate_neg * (-voltage - v_neg) * dt * scale
    return DeviceState(conductance=min(params.g_max, max(params.g_min, g)))


def apply_voltage_grid(g: np.ndarray, params: DeviceParams, voltages: np.ndarray, dt: float) -> np.ndarray:
    """Vectorized apply_voltage over a conductance grid (same law, all cells at once)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ideal = params.kind is DeviceKind.IDEAL
    if ideal:
        v_neg = np.full_like(g, params.threshold_pos)
        s_pos = 1.0
        s_neg = 1.0
    else:
        frac_from_top = (params.g_max - g) / params.g_range
        v_neg = params.threshold_neg_low + (params.threshold_neg_high - params.threshold_neg_low) * frac_from_top
        s_pos = frac_from_top
        s_neg = (g - params.g_min) / params.g_range
    excess_pos = voltages - params.threshold_pos
    excess_neg = -voltages - v_neg
    dg = np.where(excess_pos > 0, params.rate_pos * excess_pos * dt * s_pos, 0.0)
    dg -= np.where(excess_neg > 0, params.rate_neg * excess_neg * dt * s_neg, 0.0)
    return np.clip(g + dg, params.g_min, params.g_max)


def dc_iv_sweep(
    params: DeviceParams,
    initial_g: float,
    v_min: float,
    v_max: float,
    ramp_rate: float = 0.01,
    dt: float = 0.1,
) -> np.ndarray:
    """Triangular DC sweep 0 -> v_max -> v_min -> 0, recording (V, I, G) each step.

    ramp_rate is |dV/dt| in V/ms. The device state is advanced at each step
    before the current is read, as a real sweep would dwell at each bias.
    Returns an array of shape (n, 3) with columns voltage (V), current (uA),
    conductance (uS).
    """
    if not (v_min < 0 < v_max):
        raise ValueError("need v_min < 0 < v_max")
    if ramp_rate <= 0:
        raise ValueError("ramp_rate must be positive")
    dv = ramp_rate * dt
    up = np.arange(0.0, v_max, dv)
    down = np.arange(v_max, v_min, -dv)
    back = np.arange(v_min, 0.0 + 0.5 * dv, dv)
    voltages = np.concatenate([up, down, back])

    state = DeviceState(conductance=initial_g)
    out = np.empty((voltages.size, 3))
    for i, v in enumerate(voltages):
        state = apply_voltage(state, params, float(v), dt)
        out[i] = (v, read_current(state, float(v)), state.conductance)
    return out
