"""Deterministic simulation engine: configuration, RNG streams, epochs, logging.

A RunConfig is the single source of truth for an experiment. Serialization is
a flat key=value text file with unit-suffixed keys; unknown keys are rejected
so typos fail loudly. Randomness comes from two named child streams of the
run seed (0: weight init, 1: per-epoch shuffle), so runs are reproducible
bit-for-bit across platforms.
"""

from __future__ import annotations

import dataclasses
import hashlib
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernel
from .dynamics import AlphaParams, NeuronParams
from .encoding import EncodedSample, IrisSample, encode_dataset, fit_coder
from .memristor import DeviceKind, DeviceParams
from .network import (
    Mode,
    TwoArrayNetwork,
    UpdateSchedule,
    classify,
    make_network,
    run_sample,
    transfer_weights,
)
from .plasticity import HardwareStdp, StdpParams, synthesize_hardware


@dataclass(frozen=True)
class RunConfig:
    """Every physical constant and simulation control for one experiment."""

    # simulation controls
    dt_ms: float = 0.05
    sample_duration_ms: float = 100.0
    epochs: int = 25
    seed: int = 1
    schedule: str = "immediate"       # immediate | post-sample | post-epoch
    device_model: str = "ideal"       # ideal | realistic
    mode: str = "hardware"            # reference | hardware
    # LIF neuron
    membrane_resistance_mohm: float = 10.0
    membrane_capacitance_nf: float = 1.0
    threshold_v: float = 0.1
    reset_potential_v: float = 0.0
    refractory_period_ms: float = 5.0
    spike_pulse_height_v: float = 1.0
    spike_pulse_width_ms: float = 1.0
    # alpha kernel
    alpha_v0_v: float = 1.0
    alpha_tau1_ms: float = 10.0
    alpha_tau2_ms: float = 2.5
    # STDP rule
    stdp_a_plus: float = 0.01
    stdp_a_minus: float = 0.01
    stdp_tau_plus_ms: float = 20.0
    stdp_tau_minus_ms: float = 20.0
    # RRAM device
    g_min_us: float = 2.0
    g_max_us: float = 50.0
    device_threshold_v: float = 1.0
    reset_threshold_low_v: float = 1.0
    reset_threshold_high_v: float = 1.8
    # recognize-path scaling and supervision
    read_gain_na_per_ua: float = 0.1
    teacher_current_na: float = 12.0
    input_current_max_na: float = 20.0
    # weight initialization (fraction of weight range)
    weight_init_low: float = 0.3
    weight_init_high: float = 0.7

    def __post_init__(self) -> None:
        if self.dt_ms <= 0:
            raise ValueError("dt_ms must be positive")
        if self.sample_duration_ms < 0:
            raise ValueError("sample_duration_ms must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.schedule not in ("immediate", "post-sample", "post-epoch"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        if self.device_model not in ("ideal", "realistic"):
            raise ValueError(f"unknown device_model {self.device_model!r}")
        if self.mode not in ("reference", "hardware"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (0.0 <= self.weight_init_low <= self.weight_init_high <= 1.0):
            raise ValueError("weight init range must satisfy 0 <= low <= high <= 1")
        # constructing the parameter bundles runs their own validity checks
        self.neuron_params()
        self.alpha_params()
        self.stdp_params()
        self.device_params()

    # ---- parameter bundles ----

    def neuron_params(self) -> NeuronParams:
        return NeuronParams(
            membrane_resistance=self.membrane_resistance_mohm,
            membrane_capacitance=self.membrane_capacitance_nf,
            threshold=self.threshold_v,
            reset_potential=self.reset_potential_v,
            refractory_period=self.refractory_period_ms,
            spike_pulse_height=self.spike_pulse_height_v,
            spike_pulse_width=self.spike_pulse_width_ms,
        )

    def alpha_params(self) -> AlphaParams:
        return AlphaParams(v0=self.alpha_v0_v, tau1=self.alpha_tau1_ms, tau2=self.alpha_tau2_ms)

    def stdp_params(self) -> StdpParams:
        return StdpParams(
            a_plus=self.stdp_a_plus,
            a_minus=self.stdp_a_minus,
            tau_plus=self.stdp_tau_plus_ms,
            tau_minus=self.stdp_tau_minus_ms,
        )

    def hardware_stdp(self) -> HardwareStdp:
        return synthesize_hardware(
            self.stdp_params(),
            g_min=self.g_min_us,
            g_max=self.g_max_us,
            threshold=self.device_threshold_v,
            pulse_width=self.spike_pulse_width_ms,
        )

    def device_params(self) -> DeviceParams:
        hw = self.hardware_stdp()
        kind = DeviceKind.IDEAL if self.device_model == "ideal" else DeviceKind.REALISTIC
        return DeviceParams(
            g_min=self.g_min_us,
            g_max=self.g_max_us,
            threshold_pos=self.device_threshold_v,
            threshold_neg_low=self.reset_threshold_low_v,
            threshold_neg_high=self.reset_threshold_high_v,
            rate_pos=hw.rate_pos,
            rate_neg=hw.rate_neg,
            kind=kind,
        )

    def update_schedule(self) -> UpdateSchedule:
        return UpdateSchedule(self.schedule)

    def run_mode(self) -> Mode:
        return Mode(self.mode)

    # ---- RNG streams ----

    def rng_streams(self) -> tuple[np.random.Generator, np.random.Generator]:
        """(weight-init stream, shuffle stream), both children of the run seed."""
        children = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.default_rng(children[0]), np.random.default_rng(children[1])

    # ---- serialization ----

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            lines.append(f"{f.name}={getattr(self, f.name)}")
        return "\n".join(lines) + "\n"

    def save(self, path: Path | str) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def from_text(cls, text: str, **overrides) -> "RunConfig":
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        values: dict[str, object] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"line {lineno}: unknown config key {key!r}")
            if key in values:
                raise ValueError(f"line {lineno}: duplicate config key {key!r}")
            values[key] = val.strip()
        for key, val in values.items():
            current = getattr(cls, key)  # dataclass default carries the type
            if isinstance(current, bool):
                values[key] = val in ("1", "true", "True")
            elif isinstance(current, int):
                values[key] = int(val)
            elif isinstance(current, float):
                values[key] = float(val)
        values.update(overrides)
        return cls(**values)  # type: ignore[arg-type]

    @classmethod
    def from_file(cls, path: Path | str, **overrides) -> "RunConfig":
        return cls.from_text(Path(path).read_text(), **overrides)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


@dataclass
class EventLog:
    """Append-only record of everything a run emitted, timestamps non-decreasing."""

    spikes: list[tuple[float, str, int]] = field(default_factory=list)       # (t_ms, kind, id)
    transfers: list[float] = field(default_factory=list)                     # t_ms
    snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)    # (epoch, weights)
    accuracies: list[tuple[int, float]] = field(default_factory=list)        # (epoch, pct)

    def log_spikes(self, times: np.ndarray, ids: np.ndarray, t_offset: float, n_inputs: int) -> None:
        for t, nid in zip(times, ids):
            if nid < n_inputs:
                self.spikes.append((t + t_offset, "input", int(nid)))
            else:
                self.spikes.append((t + t_offset, "output", int(nid - n_inputs)))

    def spike_times_non_decreasing(self) -> bool:
        times = [t for t, _, _ in self.spikes]
        return all(a <= b for a, b in zip(times, times[1:]))


def initial_weights(config: RunConfig, shape: tuple[int, int] = (16, 3)) -> np.ndarray:
    rng, _ = config.rng_streams()
    return rng.uniform(config.weight_init_low, config.weight_init_high, shape)


def build_network(config: RunConfig, weights: Optional[np.ndarray] = None) -> TwoArrayNetwork:
    hw = config.hardware_stdp()
    return make_network(
        initial_weights=initial_weights(config) if weights is None else weights,
        device_params=config.device_params(),
        neuron_params=config.neuron_params(),
        alpha_params=config.alpha_params(),
        pre_waveform=hw.pre,
        post_waveform=hw.post,
        stdp_params=config.stdp_params(),
        schedule=config.update_schedule(),
        mode=config.run_mode(),
        read_gain=config.read_gain_na_per_ua,
        teacher_current=config.teacher_current_na,
    )


def run_sample_kernel(
    net: TwoArrayNetwork,
    input_currents: np.ndarray,
    teacher_class: Optional[int],
    duration: float,
    dt: float,
    learn: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Kernel-backed run_sample; returns (counts, spike_times, spike_ids)."""
    teacher = np.zeros(net.n_outputs)
    if teacher_class is not None:
        teacher[teacher_class] = net.teacher_current
    p = net.neuron_params
    a = net.alpha_params
    d = net.learn_array.device_params
    pre, post = net.pre_waveform, net.post_waveform
    s = net.stdp_params
    reference = net.mode is Mode.REFERENCE
    counts, times, ids = _kernel.run_sample_kernel(
        net.learn_array.conductance,
        net.recognize_array.conductance,
        np.asarray(input_currents, dtype=float),
        teacher,
        int(round(duration / dt)),
        dt,
        p.tau_m, p.membrane_resistance, p.threshold, p.reset_potential, p.refractory_period,
        a.v0, a.tau1, a.tau2,
        net.read_gain,
        pre.plateau_width, pre.plateau_height,
        pre.tail_amplitude, pre.tail_tau, post.tail_amplitude, post.tail_tau,
        d.g_min, d.g_max, d.threshold_pos, d.threshold_neg_low, d.threshold_neg_high,
        d.rate_pos, d.rate_neg, d.kind is DeviceKind.REALISTIC,
        s.a_plus, s.a_minus, s.tau_plus, s.tau_minus,
        reference, learn,
        reference or net.schedule is UpdateSchedule.IMMEDIATE,
    )
    return counts, times, ids


def present_sample(
    net: TwoArrayNetwork,
    sample: EncodedSample,
    config: RunConfig,
    teacher_on: bool,
    learn: bool,
    backend: str = "kernel",
    log: Optional[EventLog] = None,
    t_offset: float = 0.0,
) -> np.ndarray:
    """Drive one sample through either backend and return output spike counts."""
    teacher_class = sample.label if teacher_on else None
    if backend == "kernel":
        counts, times, ids = run_sample_kernel(
            net, sample.input_currents, teacher_class,
            config.sample_duration_ms, config.dt_ms, learn=learn,
        )
        if log is not None:
            log.log_spikes(times, ids, t_offset, net.n_inputs)
        return counts
    if backend == "pure":
        return run_sample(
            net, sample.input_currents, teacher_class,
            config.sample_duration_ms, config.dt_ms, learn=learn,
        )
    raise ValueError(f"unknown backend {backend!r}")


def simulate_epoch(
    net: TwoArrayNetwork,
    dataset: Sequence[EncodedSample],
    config: RunConfig,
    rng: np.random.Generator,
    log: Optional[EventLog] = None,
    epoch_index: int = 0,
    backend: str = "kernel",
) -> list[np.ndarray]:
    """Present every sample once, shuffled, teacher on, transfers per schedule."""
    schedule = config.update_schedule()
    duration = config.sample_duration_ms
    order = rng.permutation(len(dataset))
    results = []
    for pos, idx in enumerate(order):
        t_offset = (epoch_index * len(dataset) + pos) * duration
        counts = present_sample(
            net, dataset[idx], config, teacher_on=True, learn=True,
            backend=backend, log=log, t_offset=t_offset,
        )
        results.append(counts)
        if schedule is UpdateSchedule.POST_SAMPLE and net.mode is Mode.HARDWARE:
            transfer_weights(net)
            if log is not None:
                log.transfers.append(t_offset + duration)
    if schedule is UpdateSchedule.POST_EPOCH and net.mode is Mode.HARDWARE:
        transfer_weights(net)
        if log is not None:
            log.transfers.append((epoch_index + 1) * len(dataset) * duration)
    return results


def evaluate(
    net: TwoArrayNetwork,
    dataset: Sequence[EncodedSample],
    config: RunConfig,
    backend: str = "kernel",
) -> float:
    """Accuracy in percent with teacher off and learning disabled.

    Conductances are left bit-identical: the learn path and all transfers are
    suppressed, so recognition cannot write anything.
    """
    if len(dataset) == 0:
        warnings.warn("evaluating on an empty dataset; reporting 0%", stacklevel=2)
        return 0.0
    correct = 0
    for sample in dataset:
        counts = present_sample(net, sample, config, teacher_on=False, learn=False, backend=backend)
        if classify(counts) == sample.label:
            correct += 1
    return 100.0 * correct / len(dataset)


@dataclass
class TrainResult:
    config: RunConfig
    accuracy_per_epoch: list[float]
    snapshots: dict[int, np.ndarray]       # epoch -> (16,3) recognize-array weights
    final_weights: np.ndarray
    log: EventLog

    @property
    def max_accuracy(self) -> float:
        return max(self.accuracy_per_epoch)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracy_per_epoch))


SNAPSHOT_EPOCHS = (0, 10, 23)


def train_run(
    config: RunConfig,
    dataset: Optional[Sequence[IrisSample]] = None,
    backend: str = "kernel",
    log_spikes: bool = False,
) -> TrainResult:
    """Full training protocol: epochs of teacher-on presentation, eval after each.

    Weight snapshots are taken at epoch 0 (initial) and after epochs 10 and 23,
    plus the final epoch. Evaluation runs teacher-off on the full dataset.
    """
    from .encoding import load_iris  # deferred so engine import stays light

    samples = load_iris() if dataset is None else list(dataset)
    coder = fit_coder(samples, i_max=config.input_current_max_na)
    encoded = encode_dataset(samples, coder)

    net = build_network(config)
    _, shuffle_rng = config.rng_streams()
    log = EventLog()
    snapshots = {0: net.recognize_array.weights.copy()}
    accuracy: list[float] = []
    for epoch in range(1, config.epochs + 1):
        simulate_epoch(
            net, encoded, config, shuffle_rng,
            log=log if log_spikes else None, epoch_index=epoch - 1, backend=backend,
        )
        acc = evaluate(net, encoded, config, backend=backend)
        accuracy.append(acc)
        log.accuracies.append((epoch, acc))
        if epoch in SNAPSHOT_EPOCHS:
            snapshots[epoch] = net.recognize_array.weights.copy()
    return TrainResult(
        config=config,
        accuracy_per_epoch=accuracy,
        snapshots=snapshots,
        final_weights=net.recognize_array.weights.copy(),
        log=log,
    )
