"""Validation and experiment harness behind the CLI.

Each command returns a plain result object and can write its delimited
outputs (CSV) plus a JSON summary into an output directory; figure rendering
lives in plots.py and is layered on top by the CLI.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernel
from .encoding import encode_dataset, fit_coder, load_iris
from .engine import RunConfig, TrainResult, train_run
from .memristor import DeviceKind, DeviceParams, dc_iv_sweep
from .plasticity import stdp_response_sweep


@dataclass
class AccuracyCurve:
    """Per-epoch recognition accuracy plus its max/mean summary."""

    per_epoch: list[float]

    @property
    def max(self) -> float:
        return max(self.per_epoch)

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_epoch))


@dataclass
class EquivalenceReport:
    """Hardware-vs-reference agreement statistics."""

    r_squared: Optional[float] = None
    spike_offset_mean_ms: Optional[float] = None
    spike_offset_std_ms: Optional[float] = None
    missing_spike_rate: Optional[float] = None
    stdp_match_error: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


def weight_scatter_r2(w_a: np.ndarray, w_b: np.ndarray) -> float:
    """Squared Pearson correlation between two flattened weight matrices.

    Identical inputs give exactly 1.0 even when one has zero variance.
    """
    a = np.asarray(w_a).ravel()
    b = np.asarray(w_b).ravel()
    if a.shape != b.shape:
        raise ValueError("weight matrices must have equal shape")
    if np.array_equal(a, b):
        return 1.0
    sa, sb = a.std(), b.std()
    if sa == 0 or sb == 0:
        return 0.0
    r = float(np.corrcoef(a, b)[0, 1])
    return r * r


def align_columns_r2(w_a: np.ndarray, w_b: np.ndarray) -> float:
    """Best R^2 over column permutations of w_b (class-label alignment)."""
    from itertools import permutations

    n = w_a.shape[1]
    return max(weight_scatter_r2(w_a, w_b[:, list(p)]) for p in permutations(range(n)))


def match_spike_trains(
    reference: np.ndarray, test: np.ndarray, window: float
) -> tuple[np.ndarray, int]:
    """Greedily pair each reference spike with the nearest unused test spike.

    Pairs further apart than `window` stay unmatched; unmatched reference
    spikes count as missing. Returns (offsets test-ref for matched pairs,
    number of missing reference spikes).
    """
    used = np.zeros(len(test), dtype=bool)
    offsets = []
    missing = 0
    j = 0
    for t_ref in reference:
        while j < len(test) and test[j] < t_ref - window:
            j += 1
        best = -1
        best_d = window
        for k in range(j, len(test)):
            if test[k] > t_ref + window:
                break
            if used[k]:
                continue
            d = abs(test[k] - t_ref)
            if d <= best_d:
                best_d = d
                best = k
        if best < 0:
            missing += 1
        else:
            used[best] = True
            offsets.append(test[best] - t_ref)
    return np.array(offsets), missing


@dataclass
class NeuronValidation:
    refractory_ms: float
    mean_isi_ms: float
    offset_mean_ms: float
    offset_std_ms: float
    missing_rate: float
    n_reference_spikes: int


def cmd_validate_neuron(
    config: RunConfig,
    window_ms: float = 10_000.0,
    segment_ms: float = 1.0,
    fine_factor: int = 10,
) -> tuple[list[NeuronValidation], np.ndarray]:
    """Coarse-vs-fine-dt LIF check under a random piecewise-constant current.

    One seeded current trace (uniform 0..i_max, resampled every segment_ms)
    drives the same neuron at dt and at dt/fine_factor, for refractory
    periods of 0 and the configured value. Spikes are matched greedily
    within half the mean ISI. Returns the per-refractory stats and the
    matched offsets for the configured refractory.
    """
    p = config.neuron_params()
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(3)[2])
    n_segments = int(round(window_ms / segment_ms))
    seg_currents = rng.uniform(0.0, config.input_current_max_na, n_segments)

    dt_coarse = config.dt_ms
    dt_fine = dt_coarse / fine_factor
    steps_per_seg_c = int(round(segment_ms / dt_coarse))
    steps_per_seg_f = int(round(segment_ms / dt_fine))
    coarse_current = np.repeat(seg_currents, steps_per_seg_c)
    fine_current = np.repeat(seg_currents, steps_per_seg_f)

    reports = []
    kept_offsets = np.array([])
    for t_ref in (0.0, p.refractory_period):
        coarse = _kernel.lif_spike_times_kernel(
            coarse_current, p.tau_m, p.membrane_resistance,
            p.threshold, p.reset_potential, t_ref, dt_coarse,
        )
        fine = _kernel.lif_spike_times_kernel(
            fine_current, p.tau_m, p.membrane_resistance,
            p.threshold, p.reset_potential, t_ref, dt_fine,
        )
        mean_isi = float(np.diff(fine).mean()) if len(fine) > 1 else float("nan")
        offsets, missing = match_spike_trains(fine, coarse, window=mean_isi / 2.0)
        reports.append(NeuronValidation(
            refractory_ms=t_ref,
            mean_isi_ms=mean_isi,
            offset_mean_ms=float(offsets.mean()) if offsets.size else 0.0,
            offset_std_ms=float(offsets.std()) if offsets.size else 0.0,
            missing_rate=missing / max(len(fine), 1),
            n_reference_spikes=len(fine),
        ))
        if t_ref == p.refractory_period:
            kept_offsets = offsets
    return reports, kept_offsets


def cmd_validate_stdp(config: RunConfig, n_points: int = 200) -> tuple[np.ndarray, float]:
    """Hardware-vs-oracle STDP sweep; returns (delta_t, dw_hw, dw_oracle) and max error.

    The error is the worst |hardware - shifted oracle| relative to a_plus.
    """
    kind = DeviceKind.IDEAL if config.device_model == "ideal" else DeviceKind.REALISTIC
    sweep = stdp_response_sweep(
        config.stdp_params(),
        device_kind=kind,
        g_min=config.g_min_us,
        g_max=config.g_max_us,
        n_points=n_points,
        dt=config.dt_ms,
        pulse_width=config.spike_pulse_width_ms,
        seed=config.seed,
        neg_low=config.reset_threshold_low_v,
        neg_high=config.reset_threshold_high_v,
    )
    max_err = float(np.abs(sweep[:, 1] - sweep[:, 2]).max() / config.stdp_a_plus)
    return sweep, max_err


@dataclass
class TrainReport:
    result: TrainResult
    curve: AccuracyCurve
    equivalence: EquivalenceReport = field(default_factory=EquivalenceReport)


def cmd_train(
    config: RunConfig,
    iris_path: Optional[Path | str] = None,
    paired_reference: bool = False,
) -> TrainReport:
    """Full training run; optionally pairs it with a same-seed reference run.

    With paired_reference set (and a hardware-mode config), a reference-mode
    run from the identical seed is trained too and the weight-scatter R^2 at
    the epoch-10 and epoch-23 checkpoints is reported.
    """
    dataset = load_iris(iris_path)
    result = train_run(config, dataset=dataset)
    report = TrainReport(result=result, curve=AccuracyCurve(result.accuracy_per_epoch))
    if paired_reference and config.mode == "hardware":
        ref_cfg = RunConfig(**{**_config_dict(config), "mode": "reference"})
        ref = train_run(ref_cfg, dataset=dataset)
        r2 = [
            weight_scatter_r2(result.snapshots[e], ref.snapshots[e])
            for e in (10, 23)
            if e in result.snapshots and e in ref.snapshots
        ]
        report.equivalence.r_squared = min(r2) if r2 else None
    return report


def cmd_sweep_schedules(
    config: RunConfig, iris_path: Optional[Path | str] = None
) -> dict[str, AccuracyCurve]:
    """Immediate / post-sample / post-epoch runs from identical initial weights."""
    dataset = load_iris(iris_path)
    curves = {}
    for schedule in ("immediate", "post-sample", "post-epoch"):
        cfg = RunConfig(**{**_config_dict(config), "schedule": schedule, "mode": "hardware"})
        res = train_run(cfg, dataset=dataset)
        curves[schedule] = AccuracyCurve(res.accuracy_per_epoch)
    return curves


def cmd_rram_iv(
    config: RunConfig,
    v_max: float = 2.5,
    v_min: float = -2.5,
    ramp_rate: float = 0.01,
) -> dict[str, np.ndarray]:
    """DC-IV sweeps of both device models, ready to plot against bench curves."""
    out = {}
    for name, kind in (("ideal", DeviceKind.IDEAL), ("realistic", DeviceKind.REALISTIC)):
        hw = config.hardware_stdp()
        params = DeviceParams(
            g_min=config.g_min_us,
            g_max=config.g_max_us,
            threshold_pos=config.device_threshold_v,
            threshold_neg_low=config.reset_threshold_low_v,
            threshold_neg_high=config.reset_threshold_high_v,
            rate_pos=hw.rate_pos,
            rate_neg=hw.rate_neg,
            kind=kind,
        )
        out[name] = dc_iv_sweep(params, initial_g=config.g_min_us, v_min=v_min,
                                v_max=v_max, ramp_rate=ramp_rate, dt=0.1)
    return out


# ---- output writers ----


def _config_dict(config: RunConfig) -> dict:
    import dataclasses

    return dataclasses.asdict(config)


def write_csv(path: Path, header: Sequence[str], rows: np.ndarray) -> None:
    np.savetxt(path, np.atleast_2d(rows), delimiter=",", header=",".join(header), comments="")


def write_summary(path: Path, config: RunConfig, payload: dict) -> None:
    body = {"config_hash": config.config_hash(), **payload}
    Path(path).write_text(json.dumps(body, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_accuracy_csv(path: Path, curve: AccuracyCurve) -> None:
    rows = np.column_stack([np.arange(1, len(curve.per_epoch) + 1), curve.per_epoch])
    write_csv(path, ["epoch", "accuracy_pct"], rows)


def write_weights_csv(path: Path, weights: np.ndarray) -> None:
    np.savetxt(path, weights, delimiter=",")


def write_spike_log_csv(path: Path, spikes: list[tuple[float, str, int]]) -> None:
    with open(path, "w") as f:
        f.write("time_ms,neuron_kind,neuron_id\n")
        for t, kind, nid in spikes:
            f.write(f"{t:.6g},{kind},{nid}\n")


def write_iv_csv(path: Path, trace: np.ndarray) -> None:
    si = trace.copy()
    si[:, 1] *= 1e-6  # uA -> A
    si[:, 2] *= 1e-6  # uS -> S
    write_csv(path, ["voltage_V", "current_A", "conductance_S"], si)


def write_stdp_csv(path: Path, sweep: np.ndarray) -> None:
    order = np.argsort(sweep[:, 0])
    write_csv(path, ["delta_t_ms", "delta_w_hardware", "delta_w_oracle"], sweep[order])
