"""Fisher Iris ingestion and population coding into input-neuron currents.

Each of the four features drives a group of four level-tuned neurons with
Gaussian tuning curves, 4 features x 4 levels = 16 input currents in
[0, i_max] nA. Neuron (f, l) lives at flat index 4f + l.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

CLASS_NAMES = ("setosa", "versicolor", "virginica")
N_FEATURES = 4
N_LEVELS = 4
N_INPUTS = N_FEATURES * N_LEVELS


@dataclass(frozen=True)
class IrisSample:
    features: tuple[float, float, float, float]
    label: int  # 0 setosa, 1 versicolor, 2 virginica


@dataclass(frozen=True)
class EncodedSample:
    input_currents: np.ndarray  # (16,) nA
    label: int


@dataclass(frozen=True)
class PopulationCoder:
    """Per-feature level centers and tuning width fitted to a dataset."""

    feature_min: np.ndarray  # (4,)
    feature_max: np.ndarray  # (4,)
    i_max: float = 20.0      # nA
    levels: int = N_LEVELS

    @property
    def centers(self) -> np.ndarray:
        """(4, levels) level centers, equally spaced across each feature range."""
        width = (self.feature_max - self.feature_min) / self.levels
        offsets = (np.arange(self.levels) + 0.5)
        return self.feature_min[:, None] + offsets[None, :] * width[:, None]

    @property
    def sigma(self) -> np.ndarray:
        """(4,) Gaussian tuning width, one level-spacing per feature."""
        return (self.feature_max - self.feature_min) / self.levels


def fit_coder(dataset: Sequence[IrisSample], i_max: float = 20.0) -> PopulationCoder:
    """Calibrate level centers to the dataset's per-feature min/max."""
    if not dataset:
        raise ValueError("cannot fit a coder to an empty dataset")
    feats = np.array([s.features for s in dataset])
    lo, hi = feats.min(axis=0), feats.max(axis=0)
    degenerate = np.flatnonzero(hi <= lo)
    if degenerate.size:
        raise ValueError(f"degenerate feature column(s) {degenerate.tolist()} (min == max)")
    return PopulationCoder(feature_min=lo, feature_max=hi, i_max=i_max)


def encode(sample: IrisSample, coder: PopulationCoder) -> EncodedSample:
    """Gaussian tuning-curve currents, peak i_max at each level center."""
    x = np.asarray(sample.features)
    d = x[:, None] - coder.centers
    currents = coder.i_max * np.exp(-(d ** 2) / (2.0 * coder.sigma[:, None] ** 2))
    return EncodedSample(input_currents=currents.ravel(), label=sample.label)


def _parse_label(text: str) -> int:
    t = text.strip().lower()
    for i, name in enumerate(CLASS_NAMES):
        if name in t:
            return i
    try:
        value = int(t)
    except ValueError:
        raise ValueError(f"unknown class label {text!r}")
    if value not in (0, 1, 2):
        raise ValueError(f"class id {value} out of range 0..2")
    return value


def bundled_iris_path() -> Path:
    """Location of the packaged copy of the 150-sample dataset."""
    return Path(str(resources.files("memsnn").joinpath("data/iris.csv")))


def load_iris(path: Optional[Path | str] = None) -> list[IrisSample]:
    """Parse an iris CSV (5 columns, optional header) into samples.

    A first row whose leading field is non-numeric is treated as a header.
    Malformed rows raise with their line number; an unexpected sample count
    only warns, so subset files still load.
    """
    path = bundled_iris_path() if path is None else Path(path)
    if not path.exists():
        raise FileNotFoundError(f"iris dataset not found at {path}")
    samples: list[IrisSample] = []
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header
            if len(row) != 5:
                raise ValueError(f"line {lineno}: expected 5 fields, got {len(row)}")
            try:
                feats = tuple(float(v) for v in row[:4])
                label = _parse_label(row[4])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
            if any(v <= 0 for v in feats):
                raise ValueError(f"line {lineno}: features must be positive, got {feats}")
            samples.append(IrisSample(features=feats, label=label))
    if not samples:
        raise ValueError(f"{path} contains no samples")
    counts = np.bincount([s.label for s in samples], minlength=3)
    if len(samples) != 150 or any(c != 50 for c in counts):
        warnings.warn(
            f"expected 150 samples (50 per class), got {len(samples)} with counts {counts.tolist()}",
            stacklevel=2,
        )
    return samples


def encode_dataset(dataset: Sequence[IrisSample], coder: PopulationCoder) -> list[EncodedSample]:
    return [encode(s, coder) for s in dataset]
