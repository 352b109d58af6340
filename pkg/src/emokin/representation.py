"""Fixed-length gesture representation: concatenated per-feature histograms.

Each of the 25 feature series is summarized by a 30-bin histogram over a
range fitted on training data; out-of-range values clamp into the first or
last bin so no mass is ever lost.  Blocks are L1-normalized by the series
length, which makes the vector invariant to segment length and to any
reordering of frames.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, IncompleteFeatureSet, UnknownFeature
from .features import FeatureId, FeatureSeries, FeatureSet, N_FEATURES

BINS = 30
VECTOR_LENGTH = N_FEATURES * BINS

PERCENTILE_POLICY = "p1-p99"


@dataclass(frozen=True)
class BinningSpec:
    """Per-feature histogram ranges, frozen into the trained model."""

    ranges: dict[FeatureId, tuple[float, float]]
    fitted_on: str = ""
    policy: str = PERCENTILE_POLICY
    bins: int = BINS

    def __post_init__(self):
        for fid, (lo, hi) in self.ranges.items():
            if not lo < hi:
                raise UnknownFeature(f"bad range for {fid.name}: [{lo}, {hi}]")

    def to_dict(self) -> dict:
        return {
            "bins": self.bins,
            "policy": self.policy,
            "fitted_on": self.fitted_on,
            "ranges": {fid.name.lower(): list(self.ranges[fid]) for fid in FeatureId},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BinningSpec":
        ranges = {}
        for fid in FeatureId:
            lo, hi = d["ranges"][fid.name.lower()]
            ranges[fid] = (float(lo), float(hi))
        return cls(
            ranges=ranges,
            fitted_on=d.get("fitted_on", ""),
            policy=d.get("policy", PERCENTILE_POLICY),
            bins=int(d.get("bins", BINS)),
        )


def fit_binning(training: list[FeatureSet]) -> BinningSpec:
    """Fit per-feature ranges at the 1st/99th percentile of pooled values."""
    if not training:
        raise EmptyDataset("cannot fit binning on an empty collection")
    ranges: dict[FeatureId, tuple[float, float]] = {}
    hasher = hashlib.sha256()
    for fid in FeatureId:
        pooled = np.concatenate([fs[fid].values for fs in training])
        hasher.update(pooled.tobytes())
        lo, hi = np.percentile(pooled, [1.0, 99.0])
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        ranges[fid] = (float(lo), float(hi))
    return BinningSpec(ranges=ranges, fitted_on=hasher.hexdigest()[:16])


def histogram(series: FeatureSeries, spec: BinningSpec) -> np.ndarray:
    """L1-normalized 30-bin histogram with clamping at both ends."""
    if series.id not in spec.ranges:
        raise UnknownFeature(f"binning spec does not cover {series.id.name}")
    lo, hi = spec.ranges[series.id]
    values = series.values
    if len(values) == 0:
        raise EmptyDataset("cannot histogram an empty series")
    width = (hi - lo) / spec.bins
    idx = np.floor((values - lo) / width).astype(np.int64)
    idx = np.clip(idx, 0, spec.bins - 1)
    counts = np.bincount(idx, minlength=spec.bins).astype(np.float64)
    return counts / len(values)


def assemble(fs: FeatureSet, spec: BinningSpec) -> np.ndarray:
    """Concatenate all feature histograms in FeatureId order (length 750)."""
    if len(fs) != N_FEATURES:
        raise IncompleteFeatureSet(f"feature set has {len(fs)} of {N_FEATURES} series")
    blocks = [histogram(fs[fid], spec) for fid in FeatureId]
    return np.concatenate(blocks)


def class_histograms(
    feature_sets: list[FeatureSet],
    labels: list,
    fid: FeatureId,
    spec: BinningSpec,
) -> dict:
    """Pooled per-class histograms of one feature, for inspection plots."""
    by_class: dict = {}
    for fs, label in zip(feature_sets, labels):
        by_class.setdefault(label, []).append(fs[fid].values)
    out = {}
    for label, chunks in by_class.items():
        pooled = FeatureSeries(fid, np.concatenate(chunks))
        out[label] = histogram(pooled, spec)
    return out
