"""Figure rendering for command outputs. Every function saves a PNG and returns its path."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_accuracy(per_epoch: Sequence[float], path: Path, label: str = "recognition") -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = np.arange(1, len(per_epoch) + 1)
    ax.plot(epochs, per_epoch, "o-", label=label)
    ax.set_xlabel("epoch")
    ax.set_ylabel("recognition (%)")
    ax.set_ylim(0, 100)
    ax.grid(alpha=0.3)
    ax.legend()
    return _save(fig, path)


def plot_schedule_curves(curves: dict[str, Sequence[float]], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, acc in curves.items():
        ax.plot(np.arange(1, len(acc) + 1), acc, "o-", label=name, markersize=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("recognition (%)")
    ax.set_ylim(0, 100)
    ax.grid(alpha=0.3)
    ax.legend(title="update scheme")
    return _save(fig, path)


def plot_weight_maps(snapshots: dict[int, np.ndarray], path: Path) -> Path:
    """Side-by-side weight heatmaps at the checkpoint epochs."""
    epochs = sorted(snapshots)
    fig, axes = plt.subplots(1, len(epochs), figsize=(3.2 * len(epochs), 3.5))
    if len(epochs) == 1:
        axes = [axes]
    for ax, e in zip(axes, epochs):
        im = ax.imshow(snapshots[e], aspect="auto", vmin=0, vmax=1, cmap="viridis")
        ax.set_title(f"epoch {e}")
        ax.set_xlabel("output")
        ax.set_ylabel("input")
    fig.colorbar(im, ax=axes, shrink=0.8, label="weight")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_weight_scatter(w_ref: np.ndarray, w_hw: np.ndarray, r2: float, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    ax.plot([0, 1], [0, 1], "k--", lw=1, label="1:1")
    ax.plot(w_ref.ravel(), w_hw.ravel(), "o", ms=4, alpha=0.7)
    ax.set_xlabel("reference weight")
    ax.set_ylabel("hardware weight")
    ax.set_title(f"$R^2$ = {r2:.3f}")
    ax.legend()
    return _save(fig, path)


def plot_stdp_sweep(sweep: np.ndarray, path: Path) -> Path:
    """Hardware response and shifted oracle vs spike separation."""
    order = np.argsort(sweep[:, 0])
    s = sweep[order]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(s[:, 0], s[:, 2], "-", color="gray", lw=1, label="reference rule")
    ax.plot(s[:, 0], s[:, 1], "o", ms=3, label="waveform superposition")
    ax.axhline(0, color="k", lw=0.5)
    ax.axvline(0, color="k", lw=0.5)
    ax.set_xlabel(r"$\Delta t$ (ms)")
    ax.set_ylabel(r"$\Delta w$")
    ax.legend()
    return _save(fig, path)


def plot_offset_histogram(offsets: np.ndarray, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    if offsets.size:
        ax.hist(offsets, bins=40)
    ax.set_xlabel("spike-time offset, coarse - fine (ms)")
    ax.set_ylabel("count")
    return _save(fig, path)


def plot_isi_histogram(spike_times: np.ndarray, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    if len(spike_times) > 1:
        ax.hist(np.diff(spike_times), bins=40)
    ax.set_xlabel("inter-spike interval (ms)")
    ax.set_ylabel("count")
    return _save(fig, path)


def plot_iv_curves(traces: dict[str, np.ndarray], path: Path) -> Path:
    fig, axes = plt.subplots(1, len(traces), figsize=(5 * len(traces), 4))
    if len(traces) == 1:
        axes = [axes]
    for ax, (name, t) in zip(axes, traces.items()):
        ax.plot(t[:, 0], t[:, 1], lw=1)
        ax.set_title(f"{name} device")
        ax.set_xlabel("voltage (V)")
        ax.set_ylabel(r"current ($\mu$A)")
        ax.grid(alpha=0.3)
    return _save(fig, path)
