"""STDP: the exponential reference rule and its waveform-superposition realization.

The reference rule maps a pre/post spike-time difference dt = t_post - t_pre
to a weight change +a_plus*exp(-dt/tau_plus) for dt >= 0 and
-a_minus*exp(-|dt|/tau_minus) for dt < 0 (the anti-causal branch decays;
a growing exponential there would be unphysical).

The hardware route never computes dt. Each neuron's spike triggers a
plateau-plus-tail waveform; the voltage across a learn-array device is the
post waveform minus the pre waveform, and only when one side's plateau rides
on the other side's decayed tail does the device see an over-threshold
voltage. Integrating the device rate law over the plateau window yields a
shifted exponential in dt, which synthesize_hardware() calibrates to match
the reference rule amplitude exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dynamics import WaveformParams, WaveformState, waveform_value
from .memristor import DeviceKind, DeviceParams, DeviceState, apply_voltage


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 0.01     # weight change at dt = 0+, fraction of weight range
    a_minus: float = 0.01
    tau_plus: float = 20.0   # ms
    tau_minus: float = 20.0  # ms

    def __post_init__(self) -> None:
        if self.a_plus <= 0 or self.a_minus <= 0:
            raise ValueError("a_plus and a_minus must be positive")
        if self.tau_plus <= 0 or self.tau_minus <= 0:
            raise ValueError("tau_plus and tau_minus must be positive")


def stdp_oracle(delta_t: float, params: StdpParams) -> float:
    """Reference weight change for a single pre/post pair, dt = t_post - t_pre."""
    if not math.isfinite(delta_t):
        raise ValueError("delta_t must be finite")
    if delta_t >= 0:
        return params.a_plus * math.exp(-delta_t / params.tau_plus)
    return -params.a_minus * math.exp(delta_t / params.tau_minus)


def pair_stdp_accumulate(
    pre_spikes: Sequence[float],
    post_spikes: Sequence[float],
    params: StdpParams,
) -> float:
    """Nearest-neighbor pairing over two sorted spike trains.

    Every spike pairs with the most recent spike on the opposite side, the
    same information a plateau riding on the most recent opposite tail sees:
    a post spike pairs with the latest pre at or before it (causal branch,
    inclusive so a simultaneous pair lands on the dt >= 0 branch exactly
    once), a pre spike pairs with the latest post strictly before it.
    """
    if list(pre_spikes) != sorted(pre_spikes) or list(post_spikes) != sorted(post_spikes):
        raise ValueError("spike lists must be sorted ascending")
    total = 0.0
    for t_post in post_spikes:
        prior = [t for t in pre_spikes if t <= t_post]
        if prior:
            total += stdp_oracle(t_post - prior[-1], params)
    for t_pre in pre_spikes:
        prior = [t for t in post_spikes if t < t_pre]
        if prior:
            total += stdp_oracle(prior[-1] - t_pre, params)
    return total


def superposition_voltage(
    pre_state: WaveformState,
    pre_params: WaveformParams,
    post_state: WaveformState,
    post_params: WaveformParams,
    now: float,
) -> float:
    """Instantaneous device voltage: post waveform (column) minus pre waveform (row)."""
    return waveform_value(post_state, post_params, now) - waveform_value(pre_state, pre_params, now)


@dataclass(frozen=True)
class HardwareStdp:
    """Waveform shapes plus device rate constants that realize a given StdpParams."""

    pre: WaveformParams
    post: WaveformParams
    rate_pos: float  # uS/(V*ms)
    rate_neg: float


def synthesize_hardware(
    stdp: StdpParams,
    g_min: float,
    g_max: float,
    threshold: float = 1.0,
    pulse_width: float = 1.0,
) -> HardwareStdp:
    """Pick waveform shapes and device rates so superposition reproduces the rule.

    Both plateaus sit exactly at the device threshold and both tails at the
    threshold magnitude, so no lone waveform and no tail-tail difference can
    ever program a device. The pre tail decays with tau_plus (it is sampled
    by the post plateau for causal pairs) and the post tail with tau_minus.

    Integrating rate*(V - threshold) over a plateau of width w riding on a
    tail of amplitude Vm gives, for a spike separation dt > w:

        dG(dt) = rate * Vm * tau * (1 - exp(-w/tau)) * exp(-(dt - w)/tau)

    so the rate that makes the weight-space amplitude equal a_plus is
    a_plus*(g_max - g_min) / (Vm * tau_plus * (1 - exp(-w/tau_plus))), and
    likewise for the depression side.
    """
    if threshold <= 0 or pulse_width <= 0:
        raise ValueError("threshold and pulse_width must be positive")
    g_range = g_max - g_min
    vm = threshold  # largest tail that still never programs alone
    rate_pos = stdp.a_plus * g_range / (vm * stdp.tau_plus * (1.0 - math.exp(-pulse_width / stdp.tau_plus)))
    rate_neg = stdp.a_minus * g_range / (vm * stdp.tau_minus * (1.0 - math.exp(-pulse_width / stdp.tau_minus)))
    pre = WaveformParams(
        plateau_height=threshold, tail_amplitude=vm, tail_tau=stdp.tau_plus, plateau_width=pulse_width
    )
    post = WaveformParams(
        plateau_height=threshold, tail_amplitude=vm, tail_tau=stdp.tau_minus, plateau_width=pulse_width
    )
    return HardwareStdp(pre=pre, post=post, rate_pos=rate_pos, rate_neg=rate_neg)


def superposed_stdp_response(
    delta_t: float,
    pre_params: WaveformParams,
    post_params: WaveformParams,
    device: DeviceParams,
    dt: float = 0.05,
    initial_g: Optional[float] = None,
) -> float:
    """Net weight change from one pre/post spike pair run through the device.

    Simulates the full episode: one spike each, waveforms superposed, the
    device integrated with apply_voltage at every over-threshold sample, and
    the conductance change mapped back to weight units. Spike times snap to
    the integration grid, as they do in the full network where spikes are
    emitted at step boundaries.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    delta_t = round(delta_t / dt) * dt
    t_pre = 0.0 if delta_t >= 0 else -delta_t
    t_post = delta_t if delta_t >= 0 else 0.0
    horizon = max(t_pre, t_post) + max(pre_params.plateau_width, post_params.plateau_width) \
        + 5.0 * max(pre_params.tail_tau, post_params.tail_tau)
    times = np.arange(0.0, horizon, dt)

    def shape(t: np.ndarray, t_spike: float, p: WaveformParams) -> np.ndarray:
        age = t - t_spike
        tail_age = np.maximum(age, p.plateau_width)
        tail = -p.tail_amplitude * np.exp(-(tail_age - p.plateau_width) / p.tail_tau)
        return np.where(age < 0, 0.0, np.where(age < p.plateau_width, p.plateau_height, tail))

    v_dev = shape(times, t_post, post_params) - shape(times, t_pre, pre_params)
    g0 = device.g_mid if initial_g is None else initial_g
    state = DeviceState(conductance=g0)
    # only over-threshold samples can move the device; the reset threshold is
    # never below threshold_neg_low, so this filter is exact for both kinds
    min_thresh = min(device.threshold_pos, device.threshold_neg_low)
    for i in np.flatnonzero(np.abs(v_dev) > min_thresh):
        state = apply_voltage(state, device, float(v_dev[i]), dt)
    return (state.conductance - g0) / device.g_range


def shifted_oracle(delta_t: float, params: StdpParams, pulse_width: float) -> float:
    """Reference rule evaluated at the plateau-shifted separation.

    The hardware samples the opposite tail only after its own plateau, so its
    response at separation dt matches the rule at sign(dt)*(|dt| - w). Valid
    for |dt| > w; inside the flat-top window the two constructions diverge.
    """
    if abs(delta_t) <= pulse_width:
        raise ValueError("shifted oracle is defined only for |delta_t| > pulse_width")
    shifted = math.copysign(abs(delta_t) - pulse_width, delta_t)
    return stdp_oracle(shifted, params)


def stdp_response_sweep(
    stdp: StdpParams,
    device_kind: DeviceKind = DeviceKind.IDEAL,
    g_min: float = 2.0,
    g_max: float = 50.0,
    n_points: int = 200,
    dt: float = 0.05,
    pulse_width: float = 1.0,
    max_abs_dt: float = 100.0,
    seed: Optional[int] = None,
    neg_low: float = 1.0,
    neg_high: float = 1.8,
    initial_g: Optional[float] = None,
) -> np.ndarray:
    """Sample the hardware response and the shifted oracle over random separations.

    Separations are drawn uniformly from +/-[pulse_width + 1, max_abs_dt] ms
    (the flat-top window is excluded on purpose). Returns (n, 3) columns:
    delta_t, hardware delta_w, oracle delta_w.
    """
    hw = synthesize_hardware(stdp, g_min, g_max, pulse_width=pulse_width)
    device = DeviceParams(
        g_min=g_min, g_max=g_max, threshold_pos=hw.pre.plateau_height,
        threshold_neg_low=neg_low, threshold_neg_high=neg_high,
        rate_pos=hw.rate_pos, rate_neg=hw.rate_neg, kind=device_kind,
    )
    rng = np.random.default_rng(seed)
    mags = rng.uniform(pulse_width + 1.0, max_abs_dt, n_points)
    signs = np.where(rng.uniform(size=n_points) < 0.5, -1.0, 1.0)
    out = np.empty((n_points, 3))
    for i, d in enumerate(mags * signs):
        out[i, 0] = d
        out[i, 1] = superposed_stdp_response(d, hw.pre, hw.post, device, dt=dt, initial_g=initial_g)
        out[i, 2] = shifted_oracle(d, stdp, pulse_width)
    return out
