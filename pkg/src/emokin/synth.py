"""Synthetic gesture generator with per-emotion kinematic archetypes.

Each emotion maps to a motion signature (energy level, openness, hand
elevation, tempo, lean, burstiness) grounded in the usual body-language
stereotypes.  Joy, anger, and sadness stay clearly apart (open/upward and
springy, fast/forward and punchy, slow/low and closed), while fear,
disgust, and surprise share one guarded raised-hands template and differ
only in degree, which makes them genuinely confusable across subjects the
way the hard triple is for human observers.

Every subject carries a persistent style (amplitude/tempo/openness
multipliers plus posture offsets) and a persistent per-emotion
idiosyncrasy, so holding a subject out is strictly harder than a random
split.  Generation is fully deterministic in (spec, seed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpec
from .skeleton import (
    ClassSet,
    Dataset,
    EmotionLabel,
    JointId,
    SIX_CLASSES,
    SkeletonClip,
)

# neutral standing pose, meters; rows in JointId order
BASE_POSE = np.array(
    [
        [0.00, 1.60, 0.00],  # head
        [0.20, 1.45, 0.00],  # shoulder_l
        [-0.20, 1.45, 0.00],  # shoulder_r
        [0.30, 1.15, 0.04],  # elbow_l
        [-0.30, 1.15, 0.04],  # elbow_r
        [0.34, 0.95, 0.10],  # hand_l
        [-0.34, 0.95, 0.10],  # hand_r
        [0.00, 1.20, 0.00],  # torso
    ]
)

SENSOR_NOISE = 0.0015  # m, measurement jitter on every joint


@dataclass(frozen=True)
class MotionArchetype:
    amp: float  # hand oscillation amplitude, m
    tempo: float  # dominant rhythm, Hz
    hand_lift: float  # hand rest-height offset, m
    spread: float  # lateral openness multiplier for the arm chain
    forward: float  # hand rest sagittal offset, m
    lean: float  # torso/head sagittal lean, m (+ toward sensor)
    head_drop: float  # head rest-height offset, m
    vertical: float  # share of oscillation on the vertical axis
    jitter: float  # arm noise amplitude, m
    tremor_amp: float = 0.0
    tremor_freq: float = 0.0
    envelope: str = "sustained"  # sustained | pulses | burst
    burst_floor: float = 0.0  # residual oscillation after a burst settles
    side_bias: float = 0.0  # 0 = bilateral, 1 = fully one-sided
    mirror_phase: float = 0.3  # L/R phase offset, rad
    bounce: float = 0.0  # whole-body vertical oscillation, m
    drift: tuple[float, float, float] = (0.0, 0.0, 0.0)  # body drift velocity, m/s


ARCHETYPES: dict[EmotionLabel, MotionArchetype] = {
    EmotionLabel.HAPPINESS: MotionArchetype(
        amp=0.27,
        tempo=1.4,
        hand_lift=0.40,
        spread=1.50,
        forward=0.04,
        lean=0.02,
        head_drop=0.02,
        vertical=0.68,
        jitter=0.004,
        bounce=0.045,
        drift=(0.0, 0.012, 0.008),
    ),
    EmotionLabel.ANGER: MotionArchetype(
        amp=0.36,
        tempo=2.5,
        hand_lift=0.08,
        spread=1.00,
        forward=0.28,
        lean=0.12,
        head_drop=-0.02,
        vertical=0.22,
        jitter=0.010,
        envelope="pulses",
        mirror_phase=2.6,
        drift=(0.0, 0.0, 0.02),
    ),
    EmotionLabel.SADNESS: MotionArchetype(
        amp=0.095,
        tempo=0.60,
        hand_lift=-0.26,
        spread=0.78,
        forward=-0.04,
        lean=-0.03,
        head_drop=-0.10,
        vertical=0.50,
        jitter=0.002,
        mirror_phase=0.15,
        drift=(0.0, -0.008, -0.004),
    ),
    # fear / disgust / surprise form the confusable triple: identical motion
    # structure (envelope, tremor, asymmetry, drift), differing only in degree
    # along the dimensions subject style also perturbs (amplitude, tempo,
    # hand height, openness, lean), so held-out subjects genuinely confuse
    # them the way human observers do
    EmotionLabel.FEAR: MotionArchetype(
        amp=0.085,
        tempo=1.70,
        hand_lift=0.19,
        spread=0.65,
        forward=0.0,
        lean=-0.080,
        head_drop=-0.01,
        vertical=0.45,
        jitter=0.008,
        tremor_amp=0.006,
        tremor_freq=4.8,
        side_bias=0.20,
        mirror_phase=0.5,
        drift=(0.0, 0.0, -0.008),
    ),
    EmotionLabel.DISGUST: MotionArchetype(
        amp=0.120,
        tempo=1.15,
        hand_lift=0.17,
        spread=0.95,
        forward=0.0,
        lean=-0.035,
        head_drop=-0.01,
        vertical=0.45,
        jitter=0.008,
        tremor_amp=0.006,
        tremor_freq=4.8,
        side_bias=0.20,
        mirror_phase=0.5,
        drift=(0.0, 0.0, -0.008),
    ),
    EmotionLabel.SURPRISE: MotionArchetype(
        amp=0.145,
        tempo=1.60,
        hand_lift=0.33,
        spread=1.08,
        forward=0.0,
        lean=-0.055,
        head_drop=-0.01,
        vertical=0.45,
        jitter=0.008,
        tremor_amp=0.006,
        tremor_freq=4.8,
        side_bias=0.20,
        mirror_phase=0.5,
        drift=(0.0, 0.0, -0.008),
    ),
}


@dataclass(frozen=True)
class SubjectStyle:
    amp_mult: float
    tempo_mult: float
    spread_mult: float
    lift_offset: float
    lean_offset: float


def _draw_style(rng: np.random.Generator, scale: float) -> SubjectStyle:
    return SubjectStyle(
        amp_mult=float(np.exp(rng.normal(0.0, 0.23 * scale))),
        tempo_mult=float(np.exp(rng.normal(0.0, 0.16 * scale))),
        spread_mult=float(np.exp(rng.normal(0.0, 0.14 * scale))),
        lift_offset=float(rng.normal(0.0, 0.05 * scale)),
        lean_offset=float(rng.normal(0.0, 0.038 * scale)),
    )


def _compose(a: SubjectStyle, b: SubjectStyle) -> SubjectStyle:
    return SubjectStyle(
        amp_mult=a.amp_mult * b.amp_mult,
        tempo_mult=a.tempo_mult * b.tempo_mult,
        spread_mult=a.spread_mult * b.spread_mult,
        lift_offset=a.lift_offset + b.lift_offset,
        lean_offset=a.lean_offset + b.lean_offset,
    )


@dataclass(frozen=True)
class GeneratorSpec:
    class_set: ClassSet = SIX_CLASSES
    subjects: int = 12
    clips_per_class: int = 5
    rate: float = 30.0
    duration_range: tuple[float, float] = (2.5, 4.0)

    def __post_init__(self):
        if not self.class_set or len(set(self.class_set)) != len(self.class_set):
            raise InvalidSpec("class_set must be non-empty and unique")
        if self.subjects < 1 or self.clips_per_class < 1:
            raise InvalidSpec("subjects and clips_per_class must be >= 1")
        if self.rate <= 0:
            raise InvalidSpec("rate must be positive")
        lo, hi = self.duration_range
        if not (0 < lo <= hi):
            raise InvalidSpec("bad duration range")


def _smoothstep(u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _envelope(
    kind: str, t: np.ndarray, tempo: float, floor: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """(pose_env, osc_env): how far the rest pose and the oscillation are
    engaged over the clip.  Pose transitions are slow smoothsteps so the
    gesture itself, not the lead-in, carries the energy peak."""
    dur = t[-1] if len(t) else 1.0
    ramp = _smoothstep(t / 1.2) * _smoothstep((dur - t) / 1.2)
    if kind == "sustained":
        return ramp, ramp
    if kind == "pulses":
        phase = rng.uniform(0, 2 * math.pi)
        pulses = 0.25 + 0.75 * np.abs(np.sin(math.pi * 0.5 * tempo * t + phase)) ** 4
        return ramp, ramp * pulses
    if kind == "burst":
        t0 = rng.uniform(0.35, 0.3 * dur + 0.35)
        rise = 1.0 / (1.0 + np.exp(-(t - t0) / 0.05))
        settle = floor + (1.0 - floor) * np.exp(-np.maximum(t - t0 - 0.45, 0.0) / 0.35)
        return rise * _smoothstep((dur - t) / 0.5), rise * settle
    raise InvalidSpec(f"unknown envelope {kind!r}")


def _smooth_noise(rng: np.random.Generator, n: int, amp: float) -> np.ndarray:
    noise = rng.normal(0.0, amp, size=(n, 3))
    if n >= 3:
        kernel = np.ones(3) / 3.0
        for k in range(3):
            noise[:, k] = np.convolve(noise[:, k], kernel, mode="same")
    return noise


def synth_clip(
    label: EmotionLabel,
    style: SubjectStyle,
    rng: np.random.Generator,
    rate: float,
    duration_range: tuple[float, float],
    subject_id: str = "anonymous",
) -> SkeletonClip:
    """One gesture clip for one emotion, deterministic in the rng state."""
    arch = ARCHETYPES[label]
    duration = rng.uniform(*duration_range)
    n = int(round(duration * rate)) + 1
    t = np.arange(n) / rate

    # per-clip execution jitter on top of the persistent subject style
    amp = arch.amp * style.amp_mult * float(np.exp(rng.normal(0.0, 0.12)))
    tempo = arch.tempo * style.tempo_mult * float(np.exp(rng.normal(0.0, 0.10)))
    spread = arch.spread * style.spread_mult * float(np.exp(rng.normal(0.0, 0.06)))
    lift = arch.hand_lift + style.lift_offset + float(rng.normal(0.0, 0.02))
    lean = arch.lean + style.lean_offset + float(rng.normal(0.0, 0.015))

    pose_env, osc_env = _envelope(arch.envelope, t, tempo, arch.burst_floor, rng)
    w = 2 * math.pi * tempo
    biased_side = 1 if rng.random() < 0.5 else -1

    positions = np.empty((n, len(JointId), 3))
    body = np.zeros((n, 3))
    body[:, 0] = 0.15 * arch.bounce * np.sin(0.5 * w * t + rng.uniform(0, 2 * math.pi))
    body[:, 1] = arch.bounce * pose_env * np.sin(w * t + rng.uniform(0, 2 * math.pi))
    body += np.asarray(arch.drift) * (t - t.mean())[:, None] * pose_env[:, None]

    hand_offsets = {}
    for side, jid in ((+1, JointId.HAND_L), (-1, JointId.HAND_R)):
        side_amp = amp * (1.0 + arch.side_bias * (1 if side == biased_side else -1))
        phase = side * arch.mirror_phase
        px = rng.uniform(0, 2 * math.pi)
        py = rng.uniform(0, 2 * math.pi)
        pz = rng.uniform(0, 2 * math.pi)
        horiz = 1.0 - arch.vertical
        osc = np.stack(
            [
                side * horiz * np.sin(w * t + px + phase),
                arch.vertical * np.sin(w * t + py + phase * 0.5),
                0.65 * horiz * np.cos(w * t + pz + phase),
            ],
            axis=1,
        )
        # incommensurate second harmonic keeps the velocity from collapsing
        # to zero mid-gesture, as real movement never does
        p2 = rng.uniform(0, 2 * math.pi, size=3)
        osc += 0.4 * np.stack(
            [
                side * horiz * np.sin(1.61 * w * t + p2[0]),
                arch.vertical * np.sin(1.61 * w * t + p2[1]),
                0.65 * horiz * np.cos(1.61 * w * t + p2[2]),
            ],
            axis=1,
        )
        rest = BASE_POSE[jid].copy()
        rest[0] *= spread
        rest[1] += lift
        rest[2] += arch.forward + lean * 0.6
        rest_offset = rest - BASE_POSE[jid]
        offset = pose_env[:, None] * rest_offset + side_amp * osc_env[:, None] * osc
        if arch.tremor_amp > 0:
            wt = 2 * math.pi * arch.tremor_freq
            tp = rng.uniform(0, 2 * math.pi, size=3)
            offset += arch.tremor_amp * pose_env[:, None] * np.stack(
                [np.sin(wt * t + tp[0]), np.sin(wt * t + tp[1]), np.sin(wt * t + tp[2])],
                axis=1,
            )
        offset += _smooth_noise(rng, n, arch.jitter)
        hand_offsets[side] = offset
        positions[:, jid] = BASE_POSE[jid] + offset

    for side, hand_jid, elbow_jid, sho_jid in (
        (+1, JointId.HAND_L, JointId.ELBOW_L, JointId.SHOULDER_L),
        (-1, JointId.HAND_R, JointId.ELBOW_R, JointId.SHOULDER_R),
    ):
        elbow_rest = BASE_POSE[elbow_jid].copy()
        elbow_rest[0] *= 0.5 * (1.0 + spread)
        elbow_rest[1] += 0.5 * lift
        elbow_rest[2] += 0.5 * (arch.forward + lean * 0.6)
        elbow_offset = pose_env[:, None] * (elbow_rest - BASE_POSE[elbow_jid])
        elbow_offset += 0.55 * hand_offsets[side]
        elbow_offset += _smooth_noise(rng, n, arch.jitter * 0.7)
        positions[:, elbow_jid] = BASE_POSE[elbow_jid] + elbow_offset
        positions[:, sho_jid] = BASE_POSE[sho_jid] + 0.16 * hand_offsets[side]

    head_osc = 0.035 * amp / (arch.amp + 1e-9) * np.sin(w * t + rng.uniform(0, 2 * math.pi))
    head_offset = np.zeros((n, 3))
    head_offset[:, 1] = pose_env * arch.head_drop + head_osc
    head_offset[:, 2] = pose_env * lean
    positions[:, JointId.HEAD] = BASE_POSE[JointId.HEAD] + head_offset

    torso_offset = np.zeros((n, 3))
    torso_offset[:, 2] = pose_env * lean * 0.7
    positions[:, JointId.TORSO] = BASE_POSE[JointId.TORSO] + torso_offset

    positions += body[:, None, :]
    positions += rng.normal(0.0, SENSOR_NOISE, size=positions.shape)

    return SkeletonClip(
        times=t,
        positions=positions,
        subject_id=subject_id,
        label=label,
        source="synthetic",
        nominal_rate=rate,
    )


def synth_dataset(spec: GeneratorSpec, seed: int) -> Dataset:
    """Deterministic corpus: subjects x classes x clips_per_class clips.

    Each subject carries a persistent overall style plus a persistent
    per-emotion idiosyncrasy (an actor's personal reading of each emotion),
    both invisible to a random split but costly under LOSO.
    """
    clips = []
    for s in range(spec.subjects):
        subject_id = f"s{s + 1:02d}"
        subject_style = _draw_style(np.random.default_rng([seed, 1000, s]), 1.0)
        for c, label in enumerate(spec.class_set):
            class_quirk = _draw_style(np.random.default_rng([seed, 2000, s, c]), 0.6)
            style = _compose(subject_style, class_quirk)
            for r in range(spec.clips_per_class):
                rng = np.random.default_rng([seed, s, c, r])
                clips.append(
                    synth_clip(label, style, rng, spec.rate, spec.duration_range, subject_id)
                )
    return Dataset(clips)
