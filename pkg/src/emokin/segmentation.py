"""Gesture segmentation by kinetic-energy hysteresis.

A segment opens when energy reaches tau_on and closes after `hold`
consecutive frames below tau_off; the emitted span runs from the first
activation to the last frame at or above tau_off, padded by `pad` frames of
context on both sides.  Two thresholds plus the hold suppress chatter on
noisy energy traces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, InvalidSpec
from .features import kinetic_energy
from .skeleton import Dataset, SkeletonClip


@dataclass(frozen=True)
class SegmenterParams:
    tau_on: float
    tau_off: float
    hold: int = 15
    min_len: int = 30
    pad: int = 5

    def __post_init__(self):
        if self.tau_off > self.tau_on:
            raise InvalidSpec("tau_off must not exceed tau_on")
        if self.tau_on < 0 or self.tau_off < 0:
            raise InvalidSpec("thresholds must be non-negative")
        if self.hold < 0 or self.pad < 0:
            raise InvalidSpec("hold and pad must be non-negative")
        if self.min_len < 2:
            raise InvalidSpec("min_len must be at least 2")


@dataclass(frozen=True)
class GestureSegment:
    """Inclusive frame range of one expressive gesture within a clip."""

    start_frame: int
    end_frame: int
    peak_energy: float

    @property
    def n_frames(self) -> int:
        return self.end_frame - self.start_frame + 1

    def extract(self, clip: SkeletonClip) -> SkeletonClip:
        return clip.subclip(self.start_frame, self.end_frame)


class HysteresisSegmenter:
    """Incremental state machine over an energy series.

    Feed energy values with push(); closed (start, end) core spans come back
    as they are decided.  finish() flushes a segment left open at the end of
    the data.
    """

    def __init__(self, params: SegmenterParams):
        self.params = params
        self.reset()

    def reset(self) -> None:
        self._i = -1
        self._active = False
        self._start = 0
        self._last_above_off = 0
        self._below = 0
        self._peak = 0.0

    def push(self, energy: float) -> tuple[int, int, float] | None:
        p = self.params
        self._i += 1
        i = self._i
        if not self._active:
            if energy >= p.tau_on:
                self._active = True
                self._start = i
                self._last_above_off = i
                self._below = 0
                self._peak = energy
            return None
        self._peak = max(self._peak, energy)
        if energy >= p.tau_off:
            self._last_above_off = i
            self._below = 0
            return None
        self._below += 1
        if self._below >= p.hold:
            core = (self._start, self._last_above_off, self._peak)
            self._active = False
            return core
        return None

    def finish(self) -> tuple[int, int, float] | None:
        if self._active:
            core = (self._start, self._last_above_off, self._peak)
            self._active = False
            return core
        return None


def _pad_and_filter(
    cores: list[tuple[int, int, float]], n_frames: int, params: SegmenterParams
) -> list[GestureSegment]:
    segments = []
    for k, (start, end, peak) in enumerate(cores):
        if end - start + 1 < params.min_len:
            continue
        lo = max(0, start - params.pad)
        hi = min(n_frames - 1, end + params.pad)
        # overlapping pads truncate at the midpoint between adjacent cores
        if k > 0:
            prev_end = cores[k - 1][1]
            lo = max(lo, (prev_end + start) // 2 + 1)
        if k + 1 < len(cores):
            next_start = cores[k + 1][0]
            hi = min(hi, (end + next_start) // 2)
        segments.append(GestureSegment(lo, hi, peak))
    return segments


def segment(clip: SkeletonClip, params: SegmenterParams) -> list[GestureSegment]:
    """Split a clip into disjoint, ordered gesture segments."""
    energy = kinetic_energy(clip).values
    machine = HysteresisSegmenter(params)
    cores = []
    for e in energy:
        core = machine.push(float(e))
        if core is not None:
            cores.append(core)
    tail = machine.finish()
    if tail is not None:
        cores.append(tail)
    return _pad_and_filter(cores, clip.n_frames, params)


def auto_params(dataset: Dataset, rate: float | None = None) -> SegmenterParams:
    """Derive thresholds from the corpus: a fifth of the low-quartile peak energy."""
    if not dataset.clips:
        raise EmptyDataset("cannot derive segmenter parameters from an empty dataset")
    peaks = [float(np.max(kinetic_energy(c).values)) for c in dataset.clips]
    tau_on = float(np.percentile(peaks, 25)) * 0.2
    if rate is None:
        rate = float(np.median([c.nominal_rate for c in dataset.clips]))
    return SegmenterParams(
        tau_on=tau_on,
        tau_off=tau_on / 2.0,
        hold=max(1, int(round(0.5 * rate))),
        min_len=max(2, int(round(1.0 * rate))),
        pad=5,
    )
