"""Signal-producing blocks: LIF neuron, alpha-function generator, STDP waveform generator.

All times are in ms, voltages in V, currents in nA, resistances in MOhm and
capacitances in nF, so tau = R*C comes out in ms and I*R*1e-3 in volts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

# nA * MOhm = mV, so scale by 1e-3 to stay in volts.
NA_MOHM_TO_V = 1e-3


@dataclass(frozen=True)
class NeuronParams:
    """Leaky integrate-and-fire neuron constants."""

    membrane_resistance: float = 10.0   # MOhm
    membrane_capacitance: float = 1.0   # nF
    threshold: float = 0.1              # V
    reset_potential: float = 0.0        # V
    refractory_period: float = 5.0      # ms (0 is valid)
    spike_pulse_height: float = 1.0     # V
    spike_pulse_width: float = 1.0      # ms

    def __post_init__(self) -> None:
        if self.membrane_resistance <= 0 or self.membrane_capacitance <= 0:
            raise ValueError("membrane R and C must be positive")
        if self.threshold <= self.reset_potential:
            raise ValueError("threshold must exceed reset potential")
        if self.refractory_period < 0:
            raise ValueError("refractory period must be >= 0")
        if self.spike_pulse_width <= 0:
            raise ValueError("spike pulse width must be positive")

    @property
    def tau_m(self) -> float:
        """Membrane time constant R*C in ms."""
        return self.membrane_resistance * self.membrane_capacitance

    def drive_voltage(self, current_na: float) -> float:
        """Steady-state voltage I*R for a constant current, in volts."""
        return current_na * self.membrane_resistance * NA_MOHM_TO_V


@dataclass
class NeuronState:
    """Mutable per-neuron state. Fresh neurons start at the reset potential."""

    membrane_potential: float = 0.0
    refractory_until: float = 0.0
    last_spike_time: Optional[float] = None


def lif_step(
    state: NeuronState,
    params: NeuronParams,
    input_current: float,
    now: float,
    dt: float,
) -> tuple[NeuronState, bool]:
    """Advance one explicit-Euler step ending at the step labeled `now`.

    During the refractory window the membrane is held at the reset potential
    and ignores the input entirely. A threshold crossing is detected at step
    granularity and the spike is stamped with the step time `now`.
    """
    if not math.isfinite(input_current):
        raise ValueError(f"non-finite input current {input_current!r} (encoder bug?)")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if dt > params.tau_m / 20.0:
        raise ValueError(f"dt={dt} too coarse for tau_m={params.tau_m} (need dt <= tau_m/20)")

    if now < state.refractory_until:
        return replace(state, membrane_potential=params.reset_potential), False

    v = state.membrane_potential
    v += (dt / params.tau_m) * (params.drive_voltage(input_current) - v)
    if v >= params.threshold:
        new = NeuronState(
            membrane_potential=params.reset_potential,
            refractory_until=now + params.refractory_period,
            last_spike_time=now,
        )
        return new, True
    return replace(state, membrane_potential=v), False


@dataclass(frozen=True)
class AlphaParams:
    """Double-exponential synaptic kernel V0*(exp(-t/tau1) - exp(-t/tau2))."""

    v0: float = 1.0      # V
    tau1: float = 10.0   # ms (slow)
    tau2: float = 2.5    # ms (fast)

    def __post_init__(self) -> None:
        if not (self.tau1 > self.tau2 > 0):
            raise ValueError("need tau1 > tau2 > 0")
        if self.v0 <= 0:
            raise ValueError("v0 must be positive")

    @property
    def peak_time(self) -> float:
        """Time of the kernel maximum after a spike."""
        return (self.tau1 * self.tau2 / (self.tau1 - self.tau2)) * math.log(self.tau1 / self.tau2)


def alpha_value(t_since_spike: float, params: AlphaParams) -> float:
    """Unweighted kernel value at a given age; zero at age 0 and as age -> inf."""
    if t_since_spike < 0:
        raise ValueError("t_since_spike must be >= 0")
    return params.v0 * (
        math.exp(-t_since_spike / params.tau1) - math.exp(-t_since_spike / params.tau2)
    )


def alpha_superpose(spike_times: Sequence[float], now: float, params: AlphaParams) -> float:
    """Sum of time-shifted kernels, one per past spike (linear in the train)."""
    total = 0.0
    for t in spike_times:
        if t > now:
            raise ValueError("spike times must not lie in the future")
        total += alpha_value(now - t, params)
    return total


class AlphaAccumulator:
    """O(1)-per-step running form of alpha_superpose.

    Tracks the two exponential sums separately; each step decays them by the
    exact per-dt factor, and each spike adds a unit impulse to both. Values
    agree with alpha_superpose to floating-point accuracy.
    """

    def __init__(self, params: AlphaParams, n: int = 1):
        self.params = params
        self.s1 = np.zeros(n)
        self.s2 = np.zeros(n)

    def decay(self, dt: float) -> None:
        self.s1 *= math.exp(-dt / self.params.tau1)
        self.s2 *= math.exp(-dt / self.params.tau2)

    def add_spikes(self, idx: np.ndarray) -> None:
        self.s1[idx] += 1.0
        self.s2[idx] += 1.0

    def values(self) -> np.ndarray:
        return self.params.v0 * (self.s1 - self.s2)

    def reset(self) -> None:
        self.s1[:] = 0.0
        self.s2[:] = 0.0


@dataclass(frozen=True)
class WaveformParams:
    """Plateau-plus-tail learning waveform shape.

    The plateau is forced for exactly the spike pulse width; the opposite-
    polarity tail then decays exponentially. A lone tail must stay at or
    below the device threshold so a single waveform never programs anything.
    """

    plateau_height: float = 1.0   # V
    tail_amplitude: float = 1.0   # V
    tail_tau: float = 20.0        # ms
    plateau_width: float = 1.0    # ms (must equal the neuron spike pulse width)

    def __post_init__(self) -> None:
        if self.plateau_height <= 0 or self.tail_amplitude <= 0:
            raise ValueError("plateau height and tail amplitude must be positive")
        if self.tail_tau <= 0 or self.plateau_width <= 0:
            raise ValueError("tail tau and plateau width must be positive")


@dataclass
class WaveformState:
    """Only the most recent spike time matters; a new spike overwrites it."""

    last_spike_time: Optional[float] = None

    def trigger(self, t: float) -> None:
        self.last_spike_time = t


def waveform_value(state: WaveformState, params: WaveformParams, now: float) -> float:
    """Waveform voltage at time now: 0 (never spiked), +plateau, or decaying tail."""
    if state.last_spike_time is None:
        return 0.0
    age = now - state.last_spike_time
    if age < 0:
        return 0.0
    if age < params.plateau_width:
        return params.plateau_height
    return -params.tail_amplitude * math.exp(-(age - params.plateau_width) / params.tail_tau)


def waveform_values(last_spike_times: np.ndarray, params: WaveformParams, now: float) -> np.ndarray:
    """Vectorized waveform_value over an array of last-spike times (-inf = never)."""
    age = now - last_spike_times
    tail_age = np.maximum(age, params.plateau_width)  # keep exp args bounded
    tail = -params.tail_amplitude * np.exp(-(tail_age - params.plateau_width) / params.tail_tau)
    out = np.where(age < params.plateau_width, params.plateau_height, tail)
    return np.where((age < 0) | np.isneginf(last_spike_times), 0.0, out)


def lif_isi_constant_current(current_na: float, params: NeuronParams) -> float:
    """Closed-form inter-spike interval for a constant supra-threshold current.

    From reset, V(t) = I*R*(1 - exp(-t/tau)); solving V = V_t and adding the
    refractory period gives ISI = t_ref + tau*ln(IR / (IR - V_t)).
    """
    ir = params.drive_voltage(current_na)
    vt = params.threshold - params.reset_potential
    if ir <= vt:
        raise ValueError("current is sub-threshold; neuron never spikes")
    return params.refractory_period + params.tau_m * math.log(ir / (ir - vt))
