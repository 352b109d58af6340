import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emokin.errors import EmptyDataset, InvalidSpec
from emokin.segmentation import (
    HysteresisSegmenter,
    SegmenterParams,
    _pad_and_filter,
    auto_params,
    segment,
)
from emokin.skeleton import Dataset, JointId, preprocess

from conftest import make_clip, moving_joint_clip


def run_machine(energy, params):
    machine = HysteresisSegmenter(params)
    cores = [c for c in (machine.push(float(e)) for e in energy) if c is not None]
    tail = machine.finish()
    if tail is not None:
        cores.append(tail)
    return cores


def segments_of(energy, params):
    return _pad_and_filter(run_machine(energy, params), len(energy), params)


PARAMS = SegmenterParams(tau_on=0.5, tau_off=0.25, hold=3, min_len=5, pad=2)


class TestStateMachine:
    def test_zero_energy_never_activates(self):
        assert segments_of(np.zeros(100), PARAMS) == []

    def test_rectangular_burst_hand_traced(self):
        # burst on frames 10..40: opens at 10, last frame >= tau_off is 40,
        # closes after 3 frames below tau_off, pad 2 -> [8, 42]
        energy = np.zeros(60)
        energy[10:41] = 1.0
        segs = segments_of(energy, PARAMS)
        assert len(segs) == 1
        assert (segs[0].start_frame, segs[0].end_frame) == (8, 42)
        assert segs[0].peak_energy == 1.0

    def test_two_bursts_with_long_gap(self):
        energy = np.zeros(80)
        energy[10:21] = 1.0
        energy[50:61] = 1.0
        segs = segments_of(energy, PARAMS)
        assert len(segs) == 2
        assert segs[0].end_frame < segs[1].start_frame

    def test_brief_dip_below_off_does_not_close(self):
        energy = np.zeros(60)
        energy[10:41] = 1.0
        energy[20:22] = 0.0  # dip shorter than hold=3
        segs = segments_of(energy, PARAMS)
        assert len(segs) == 1
        assert (segs[0].start_frame, segs[0].end_frame) == (8, 42)

    def test_short_core_dropped_by_min_len(self):
        energy = np.zeros(40)
        energy[10:13] = 1.0  # 3-frame core < min_len 5
        assert segments_of(energy, PARAMS) == []

    def test_open_segment_flushed_at_end(self):
        energy = np.zeros(30)
        energy[20:] = 1.0
        segs = segments_of(energy, PARAMS)
        assert len(segs) == 1
        assert segs[0].end_frame == 29

    def test_pad_overlap_truncates_at_midpoint(self):
        params = SegmenterParams(tau_on=0.5, tau_off=0.25, hold=3, min_len=4, pad=10)
        energy = np.zeros(60)
        energy[10:20] = 1.0
        energy[26:36] = 1.0
        segs = segments_of(energy, params)
        assert len(segs) == 2
        assert segs[0].end_frame < segs[1].start_frame
        # midpoint between core end 19 and core start 26
        assert segs[0].end_frame == 22
        assert segs[1].start_frame == 23


class TestClipSegmentation:
    def test_stationary_clip_yields_nothing(self):
        clip = make_clip(n_frames=80)
        assert segment(clip, PARAMS) == []

    def test_moving_clip_yields_one_segment(self):
        clip = moving_joint_clip(
            JointId.HAND_L, lambda t: [0.4 * np.sin(2 * np.pi * 1.5 * t), 0, 0], n_frames=90
        )
        params = SegmenterParams(tau_on=0.2, tau_off=0.1, hold=5, min_len=10, pad=3)
        segs = segment(clip, params)
        assert len(segs) == 1
        assert segs[0].n_frames >= 10

    def test_determinism(self):
        clip = moving_joint_clip(
            JointId.HAND_R, lambda t: [0.3 * np.sin(4 * t), 0, 0], n_frames=100
        )
        a = segment(clip, PARAMS)
        b = segment(clip, PARAMS)
        assert a == b

    def test_segment_extract_subclip(self):
        clip = moving_joint_clip(
            JointId.HAND_L, lambda t: [0.4 * np.sin(9 * t), 0, 0], n_frames=90
        )
        params = SegmenterParams(tau_on=0.2, tau_off=0.1, hold=5, min_len=10, pad=3)
        seg = segment(clip, params)[0]
        sub = seg.extract(clip)
        assert sub.n_frames == seg.n_frames
        assert sub.times[0] == clip.times[seg.start_frame]


class TestParams:
    def test_tau_off_cannot_exceed_tau_on(self):
        with pytest.raises(InvalidSpec):
            SegmenterParams(tau_on=0.1, tau_off=0.2)

    def test_min_len_floor(self):
        with pytest.raises(InvalidSpec):
            SegmenterParams(tau_on=0.1, tau_off=0.05, min_len=1)


class TestAutoParams:
    def test_deterministic_on_identical_clips(self):
        clip = moving_joint_clip(JointId.HAND_L, lambda t: [0.3 * np.sin(5 * t), 0, 0], n_frames=60)
        ds = Dataset([clip, clip, clip])
        a = auto_params(ds)
        b = auto_params(ds)
        assert a == b
        assert a.tau_off == a.tau_on / 2

    def test_synthetic_corpus_yield(self, bench_corpus):
        pres = [preprocess(c) for c in bench_corpus.clips]
        params = auto_params(Dataset(pres))
        with_segment = sum(1 for p in pres if len(segment(p, params)) >= 1)
        assert with_segment / len(pres) >= 0.95

    def test_all_stationary_gives_zero_threshold(self):
        # documented edge: tau_on = 0, so the segmenter opens on any motion
        ds = Dataset([make_clip(n_frames=40), make_clip(n_frames=50)])
        params = auto_params(ds)
        assert params.tau_on == 0.0

    def test_empty_dataset(self):
        with pytest.raises(EmptyDataset):
            auto_params(Dataset([]))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**31),
    tau_lo=st.floats(min_value=0.05, max_value=1.0),
    bump=st.floats(min_value=0.01, max_value=1.0),
)
def test_raising_tau_on_never_adds_segments(seed, tau_lo, bump):
    rng = np.random.default_rng(seed)
    energy = np.abs(np.cumsum(rng.normal(0, 0.3, size=150)))
    lo = SegmenterParams(tau_on=tau_lo, tau_off=tau_lo / 2, hold=4, min_len=4, pad=2)
    hi = SegmenterParams(tau_on=tau_lo + bump, tau_off=tau_lo / 2, hold=4, min_len=4, pad=2)
    assert len(segments_of(energy, hi)) <= len(segments_of(energy, lo))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31))
def test_segments_disjoint_and_ordered(seed):
    rng = np.random.default_rng(seed)
    energy = np.abs(rng.normal(0, 0.6, size=200))
    params = SegmenterParams(tau_on=0.5, tau_off=0.25, hold=3, min_len=3, pad=6)
    segs = segments_of(energy, params)
    for a, b in zip(segs, segs[1:]):
        assert a.end_frame < b.start_frame
    for s in segs:
        assert s.start_frame <= s.end_frame
