"""Two-array network: recognize path, learn path, teacher injection, transfers.

The recognize array only ever sees sub-threshold read activity and changes
only when transfer_weights copies the learn array into it. The learn array
only ever changes through waveform superposition (hardware mode) or the
reference STDP rule (reference mode). This module is the step-by-step
reference implementation; the engine runs the same dynamics through a
compiled kernel and is tested against this path.

Column currents are G^T (uS) times alpha voltages (V) = uA; a read gain in
nA/uA converts them into output-neuron input currents, standing in for the
column sense circuit whose magnitude is a free design constant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import (
    AlphaParams,
    NeuronParams,
    NeuronState,
    WaveformParams,
    WaveformState,
    alpha_superpose,
    lif_step,
    waveform_value,
)
from .memristor import DeviceParams, apply_voltage_grid
from .plasticity import StdpParams, stdp_oracle

N_INPUTS = 16
N_OUTPUTS = 3


class UpdateSchedule(enum.Enum):
    IMMEDIATE = "immediate"
    POST_SAMPLE = "post-sample"
    POST_EPOCH = "post-epoch"


class Mode(enum.Enum):
    REFERENCE = "reference"
    HARDWARE = "hardware"


def conductance_to_weight(g: np.ndarray | float, params: DeviceParams) -> np.ndarray | float:
    """Map conductance onto [0, 1]: w = (G - g_min) / (g_max - g_min)."""
    return (g - params.g_min) / params.g_range


def weight_to_conductance(w: np.ndarray | float, params: DeviceParams) -> np.ndarray | float:
    return params.g_min + w * params.g_range


class CrossbarArray:
    """m x n grid of crosspoint conductances sharing one set of device params."""

    def __init__(self, conductance: np.ndarray, device_params: DeviceParams):
        g = np.asarray(conductance, dtype=float)
        if g.ndim != 2:
            raise ValueError("conductance grid must be 2-D")
        if np.any(g < device_params.g_min) or np.any(g > device_params.g_max):
            raise ValueError("initial conductances outside [g_min, g_max]")
        self.conductance = g
        self.device_params = device_params

    @property
    def rows(self) -> int:
        return self.conductance.shape[0]

    @property
    def cols(self) -> int:
        return self.conductance.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return conductance_to_weight(self.conductance, self.device_params)

    def column_currents(self, row_voltages: np.ndarray) -> np.ndarray:
        """Weighted read: (n,) currents in uA from (m,) row voltages in V."""
        return self.conductance.T @ row_voltages

    def apply_voltages(self, voltages: np.ndarray, dt: float) -> None:
        """Program every cell with its own voltage held for dt."""
        self.conductance = apply_voltage_grid(self.conductance, self.device_params, voltages, dt)

    def copy_from(self, other: "CrossbarArray") -> None:
        self.conductance[:] = other.conductance


@dataclass
class TwoArrayNetwork:
    """All state of one 16x3 simulation instance."""

    learn_array: CrossbarArray
    recognize_array: CrossbarArray
    neuron_params: NeuronParams
    alpha_params: AlphaParams
    pre_waveform: WaveformParams
    post_waveform: WaveformParams
    stdp_params: StdpParams
    schedule: UpdateSchedule = UpdateSchedule.IMMEDIATE
    mode: Mode = Mode.HARDWARE
    read_gain: float = 0.1   # nA of neuron drive per uA of column current
    teacher_current: float = 12.0  # nA into the labeled output during training

    input_neurons: list[NeuronState] = field(default_factory=list)
    output_neurons: list[NeuronState] = field(default_factory=list)
    input_waveforms: list[WaveformState] = field(default_factory=list)
    output_waveforms: list[WaveformState] = field(default_factory=list)
    alpha_histories: list[list[float]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.learn_array.conductance.shape != self.recognize_array.conductance.shape:
            raise ValueError("learn and recognize arrays must have equal shape")
        self.reset_transient_state()

    @property
    def n_inputs(self) -> int:
        return self.learn_array.rows

    @property
    def n_outputs(self) -> int:
        return self.learn_array.cols

    def reset_transient_state(self) -> None:
        """Fresh membranes, alpha histories and waveforms (between samples)."""
        reset = self.neuron_params.reset_potential
        self.input_neurons = [NeuronState(membrane_potential=reset) for _ in range(self.n_inputs)]
        self.output_neurons = [NeuronState(membrane_potential=reset) for _ in range(self.n_outputs)]
        self.input_waveforms = [WaveformState() for _ in range(self.n_inputs)]
        self.output_waveforms = [WaveformState() for _ in range(self.n_outputs)]
        self.alpha_histories = [[] for _ in range(self.n_inputs)]


def make_network(
    initial_weights: np.ndarray,
    device_params: DeviceParams,
    neuron_params: NeuronParams,
    alpha_params: AlphaParams,
    pre_waveform: WaveformParams,
    post_waveform: WaveformParams,
    stdp_params: StdpParams,
    schedule: UpdateSchedule = UpdateSchedule.IMMEDIATE,
    mode: Mode = Mode.HARDWARE,
    read_gain: float = 0.1,
    teacher_current: float = 12.0,
) -> TwoArrayNetwork:
    """Build a network with both arrays initialized to the same weights."""
    g0 = weight_to_conductance(np.asarray(initial_weights, dtype=float), device_params)
    return TwoArrayNetwork(
        learn_array=CrossbarArray(g0.copy(), device_params),
        recognize_array=CrossbarArray(g0.copy(), device_params),
        neuron_params=neuron_params,
        alpha_params=alpha_params,
        pre_waveform=pre_waveform,
        post_waveform=post_waveform,
        stdp_params=stdp_params,
        schedule=schedule,
        mode=mode,
        read_gain=read_gain,
        teacher_current=teacher_current,
    )


def recognize_step(
    net: TwoArrayNetwork,
    input_currents: np.ndarray,
    teacher_currents: np.ndarray,
    now: float,
    dt: float,
) -> tuple[list[int], list[int]]:
    """One read-path step: inputs integrate, alpha kernels weigh, outputs integrate.

    Output neuron j is driven by read_gain * sum_i G_rec[i,j] * alpha_i(now)
    plus its teacher current. Returns the ids of input and output neurons
    that spiked at this step.
    """
    alpha_now = np.array(
        [alpha_superpose(h, now, net.alpha_params) for h in net.alpha_histories]
    )
    i_out = net.read_gain * net.recognize_array.column_currents(alpha_now) + teacher_currents

    input_spikes: list[int] = []
    for i in range(net.n_inputs):
        net.input_neurons[i], spiked = lif_step(
            net.input_neurons[i], net.neuron_params, float(input_currents[i]), now, dt
        )
        if spiked:
            input_spikes.append(i)
            net.alpha_histories[i].append(now)

    output_spikes: list[int] = []
    for j in range(net.n_outputs):
        net.output_neurons[j], spiked = lif_step(
            net.output_neurons[j], net.neuron_params, float(i_out[j]), now, dt
        )
        if spiked:
            output_spikes.append(j)
    return input_spikes, output_spikes


def learn_step(
    net: TwoArrayNetwork,
    input_spikes: Sequence[int],
    output_spikes: Sequence[int],
    now: float,
    dt: float,
) -> None:
    """One write-path step, fed by the spikes recognize_step just emitted.

    Hardware mode retriggers the waveform generators, then programs every
    learn-array cell with the superposed voltage held for dt. Reference mode
    applies the STDP rule against the most recent opposite spike instead:
    a new post spike pairs with each row's latest pre spike (simultaneous
    allowed, landing on the causal branch), a new pre spike pairs with each
    column's latest strictly-earlier post spike.
    """
    if net.mode is Mode.REFERENCE:
        _reference_updates(net, input_spikes, output_spikes, now)
        return

    for i in input_spikes:
        net.input_waveforms[i].trigger(now)
    for j in output_spikes:
        net.output_waveforms[j].trigger(now)

    w_pre = np.array(
        [waveform_value(s, net.pre_waveform, now) for s in net.input_waveforms]
    )
    w_post = np.array(
        [waveform_value(s, net.post_waveform, now) for s in net.output_waveforms]
    )
    v_dev = w_post[None, :] - w_pre[:, None]
    net.learn_array.apply_voltages(v_dev, dt)


def _reference_updates(
    net: TwoArrayNetwork,
    input_spikes: Sequence[int],
    output_spikes: Sequence[int],
    now: float,
) -> None:
    params = net.learn_array.device_params
    g = net.learn_array.conductance

    def bump(i: int, j: int, dw: float) -> None:
        g[i, j] = min(params.g_max, max(params.g_min, g[i, j] + dw * params.g_range))

    # depression first: a pre spike pairs with posts strictly before it,
    # so this step's output spikes must not be visible yet
    for i in input_spikes:
        for j in range(net.n_outputs):
            t_post = net.output_waveforms[j].last_spike_time
            if t_post is not None:
                bump(i, j, stdp_oracle(t_post - now, net.stdp_params))
    for i in input_spikes:
        net.input_waveforms[i].trigger(now)
    for j in output_spikes:
        for i in range(net.n_inputs):
            t_pre = net.input_waveforms[i].last_spike_time
            if t_pre is not None:
                bump(i, j, stdp_oracle(now - t_pre, net.stdp_params))
    for j in output_spikes:
        net.output_waveforms[j].trigger(now)


def transfer_weights(net: TwoArrayNetwork) -> None:
    """Copy the learn array into the recognize array (exact, idempotent)."""
    net.recognize_array.copy_from(net.learn_array)


def run_sample(
    net: TwoArrayNetwork,
    input_currents: np.ndarray,
    teacher_class: Optional[int],
    duration: float,
    dt: float,
    learn: bool = True,
) -> np.ndarray:
    """Present one sample for `duration` ms and count output spikes.

    Transient state is reset at the start so nothing leaks across samples.
    With a teacher class set, a constant current is injected into that output
    for the whole presentation. Learning and per-step transfers are skipped
    when learn is False (evaluation).
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    net.reset_transient_state()
    teacher = np.zeros(net.n_outputs)
    if teacher_class is not None:
        teacher[teacher_class] = net.teacher_current
    counts = np.zeros(net.n_outputs, dtype=np.int64)
    n_steps = int(round(duration / dt))
    for k in range(n_steps):
        now = k * dt
        input_spikes, output_spikes = recognize_step(net, input_currents, teacher, now, dt)
        for j in output_spikes:
            counts[j] += 1
        if learn:
            learn_step(net, input_spikes, output_spikes, now, dt)
            if net.schedule is UpdateSchedule.IMMEDIATE or net.mode is Mode.REFERENCE:
                transfer_weights(net)
    return counts


def classify(spike_counts: np.ndarray) -> Optional[int]:
    """Argmax over output spike counts; ties and silence are unclassified (None)."""
    counts = np.asarray(spike_counts)
    top = counts.max()
    if top <= 0 or int((counts == top).sum()) != 1:
        return None
    return int(counts.argmax())
