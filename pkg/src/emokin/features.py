"""Per-frame expressive feature series computed from a skeleton clip.

Every operation returns one scalar per input frame.  Derivatives use central
differences with one-sided endpoints; sliding-window features emit one value
per window center and replicate the first/last center value at the edges, so
all 25 series share the clip's length and feed identical histogram machinery.

Singularities are guarded (value 0, or a documented substitute) so that every
series is total and NaN/Inf-free for any clip that passed validation.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterator

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import (
    DegenerateFrame,
    IncompleteFeatureSet,
    InvalidSpec,
    NonFinite,
    NotUniform,
    TooShort,
)
from .skeleton import JointId, SkeletonClip

SPEED_EPS = 1e-4  # m/s below which direction/curvature are undefined
PATH_EPS = 1e-4  # m of path length below which dimensionless jerk is undefined
STAT_EPS = 1e-9  # denominator guard for cv and impulsiveness ratios
VAR_EPS = 1e-12  # variance below which a window counts as constant

DEFAULT_STAT_WINDOW = 15  # 0.5 s at 30 Hz: smoothness, fluidity, impulsiveness
DEFAULT_PERIOD_WINDOW = 60  # 2 s at 30 Hz
PERIOD_MIN_LAG = 5


class FeatureId(IntEnum):
    """The 25 series, in the fixed block order of the feature vector."""

    KINETIC_ENERGY = 0
    CONTRACTION_INDEX = 1
    GLOBAL_DIRECTION_AZIMUTH = 2
    GLOBAL_DIRECTION_ELEVATION = 3
    OVERALL_SYMMETRY = 4
    WHOLE_BODY_PERIODICITY = 5
    HEAD_SPEED = 6
    HEAD_ACCEL = 7
    HEAD_JERK = 8
    HEAD_LEANING_POS = 9
    HEAD_LEANING_SPEED = 10
    HEAD_SYMMETRY_HANDS = 11
    HEAD_SYMMETRY_SHOULDERS = 12
    TORSO_LEANING_POS = 13
    TORSO_LEANING_SPEED = 14
    HANDS_DISTANCE = 15
    HAND_SPEED = 16
    HAND_ACCEL = 17
    HAND_JERK = 18
    HAND_CURVATURE = 19
    HAND_SMOOTHNESS = 20
    HAND_FLUIDITY = 21
    HAND_IMPULSIVENESS = 22
    HAND_DIST_TORSO = 23
    HAND_DIST_HEAD = 24


N_FEATURES = len(FeatureId)

FEATURE_UNITS: dict[FeatureId, str] = {
    FeatureId.KINETIC_ENERGY: "J/kg",
    FeatureId.CONTRACTION_INDEX: "1",
    FeatureId.GLOBAL_DIRECTION_AZIMUTH: "rad",
    FeatureId.GLOBAL_DIRECTION_ELEVATION: "rad",
    FeatureId.OVERALL_SYMMETRY: "1",
    FeatureId.WHOLE_BODY_PERIODICITY: "1",
    FeatureId.HEAD_SPEED: "m/s",
    FeatureId.HEAD_ACCEL: "m/s^2",
    FeatureId.HEAD_JERK: "m/s^3",
    FeatureId.HEAD_LEANING_POS: "1",
    FeatureId.HEAD_LEANING_SPEED: "1/s",
    FeatureId.HEAD_SYMMETRY_HANDS: "1",
    FeatureId.HEAD_SYMMETRY_SHOULDERS: "1",
    FeatureId.TORSO_LEANING_POS: "1",
    FeatureId.TORSO_LEANING_SPEED: "1/s",
    FeatureId.HANDS_DISTANCE: "1",
    FeatureId.HAND_SPEED: "m/s",
    FeatureId.HAND_ACCEL: "m/s^2",
    FeatureId.HAND_JERK: "m/s^3",
    FeatureId.HAND_CURVATURE: "1/m",
    FeatureId.HAND_SMOOTHNESS: "1",
    FeatureId.HAND_FLUIDITY: "1",
    FeatureId.HAND_IMPULSIVENESS: "1",
    FeatureId.HAND_DIST_TORSO: "1",
    FeatureId.HAND_DIST_HEAD: "1",
}

FEATURE_GROUPS: dict[FeatureId, str] = {}
for _f in FeatureId:
    _name = _f.name
    if _name.startswith("HEAD"):
        FEATURE_GROUPS[_f] = "head"
    elif _name.startswith("TORSO"):
        FEATURE_GROUPS[_f] = "torso"
    elif _name.startswith("HAND"):
        FEATURE_GROUPS[_f] = "hand"
    else:
        FEATURE_GROUPS[_f] = "whole-body"


@dataclass(frozen=True)
class FeatureSeries:
    id: FeatureId
    values: np.ndarray
    unit: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if not self.unit:
            object.__setattr__(self, "unit", FEATURE_UNITS[self.id])

    def __len__(self) -> int:
        return len(self.values)


class FeatureSet:
    """All 25 series for one segment, keyed by FeatureId."""

    def __init__(self, series: dict[FeatureId, FeatureSeries]):
        missing = [f.name for f in FeatureId if f not in series]
        if missing:
            raise IncompleteFeatureSet(f"missing features: {', '.join(missing)}")
        self._series = dict(series)

    def __getitem__(self, fid: FeatureId) -> FeatureSeries:
        return self._series[fid]

    def __iter__(self) -> Iterator[FeatureId]:
        return iter(FeatureId)

    def __len__(self) -> int:
        return len(self._series)

    def n_frames(self) -> int:
        return len(self._series[FeatureId.KINETIC_ENERGY])


# ---------------------------------------------------------------------------
# shared numerics


def _derive(x: np.ndarray, dt: float) -> np.ndarray:
    """Central difference along axis 0, one-sided at the endpoints."""
    return np.gradient(x, dt, axis=0, edge_order=1)


def _require_uniform(clip: SkeletonClip, min_frames: int = 2) -> float:
    if not clip.is_uniform():
        raise NotUniform("feature extraction requires a uniform clip")
    if clip.n_frames < min_frames:
        raise TooShort(f"need >= {min_frames} frames, got {clip.n_frames}")
    return float(clip.times[1] - clip.times[0])


def reference_scale(clip: SkeletonClip) -> float:
    """Clip-median shoulder width; the length unit for normalized features."""
    s = float(np.median(clip.shoulder_width()))
    if s <= 0:
        raise DegenerateFrame("median shoulder width is zero")
    return s


def _velocities(clip: SkeletonClip, dt: float) -> np.ndarray:
    return _derive(clip.positions, dt)


def _replicate_centers(values: np.ndarray, n: int, start: int) -> np.ndarray:
    """Place window-center values at [start, start+len) and pad the edges."""
    out = np.empty(n, dtype=np.float64)
    end = start + len(values)
    out[start:end] = values
    out[:start] = values[0]
    out[end:] = values[-1]
    return out


def _window_bounds(n: int, window: int) -> tuple[int, int]:
    """Effective full width and center offset for an n-frame clip."""
    w = min(window, n)
    if w % 2 == 0:
        w -= 1
    return w, w // 2


# ---------------------------------------------------------------------------
# kinematics


def kinematics(
    clip: SkeletonClip, joint: JointId
) -> tuple[FeatureSeries, FeatureSeries, FeatureSeries]:
    """Speed, acceleration, and jerk magnitudes for one joint."""
    dt = _require_uniform(clip, min_frames=4)
    p = clip.joint(joint)
    v = _derive(p, dt)
    a = _derive(v, dt)
    j = _derive(a, dt)
    ids = {
        JointId.HEAD: (FeatureId.HEAD_SPEED, FeatureId.HEAD_ACCEL, FeatureId.HEAD_JERK),
    }.get(joint, (FeatureId.HAND_SPEED, FeatureId.HAND_ACCEL, FeatureId.HAND_JERK))
    return (
        FeatureSeries(ids[0], np.linalg.norm(v, axis=1)),
        FeatureSeries(ids[1], np.linalg.norm(a, axis=1)),
        FeatureSeries(ids[2], np.linalg.norm(j, axis=1)),
    )


def kinetic_energy(clip: SkeletonClip) -> FeatureSeries:
    """E(t) = 1/2 sum over joints of squared joint speed, unit masses."""
    dt = _require_uniform(clip)
    v = _velocities(clip, dt)
    e = 0.5 * np.sum(v * v, axis=(1, 2))
    return FeatureSeries(FeatureId.KINETIC_ENERGY, e)


def contraction_index(clip: SkeletonClip) -> FeatureSeries:
    """Mean distance of joints from their centroid, in shoulder widths."""
    _require_uniform(clip)
    s_ref = reference_scale(clip)
    c = clip.positions.mean(axis=1, keepdims=True)
    d = np.linalg.norm(clip.positions - c, axis=2).mean(axis=1)
    return FeatureSeries(FeatureId.CONTRACTION_INDEX, d / s_ref)


def global_direction(clip: SkeletonClip) -> tuple[FeatureSeries, FeatureSeries]:
    """Azimuth/elevation of the centroid velocity; 0 when nearly still."""
    dt = _require_uniform(clip)
    vc = _derive(clip.positions.mean(axis=1), dt)
    speed = np.linalg.norm(vc, axis=1)
    moving = speed >= SPEED_EPS
    az = np.zeros(len(vc))
    el = np.zeros(len(vc))
    az[moving] = np.arctan2(vc[moving, 0], vc[moving, 2])
    el[moving] = np.arcsin(np.clip(vc[moving, 1] / speed[moving], -1.0, 1.0))
    return (
        FeatureSeries(FeatureId.GLOBAL_DIRECTION_AZIMUTH, az),
        FeatureSeries(FeatureId.GLOBAL_DIRECTION_ELEVATION, el),
    )


_MIRROR_PAIRS = (
    (JointId.SHOULDER_L, JointId.SHOULDER_R),
    (JointId.ELBOW_L, JointId.ELBOW_R),
    (JointId.HAND_L, JointId.HAND_R),
)


def _shoulder_axis(clip: SkeletonClip) -> np.ndarray:
    n = clip.joint(JointId.SHOULDER_L) - clip.joint(JointId.SHOULDER_R)
    return n / np.linalg.norm(n, axis=1, keepdims=True)


def overall_symmetry(clip: SkeletonClip) -> FeatureSeries:
    """1 minus the mean mirror error of the L/R pairs across the mid-plane.

    The mid-plane passes through the torso joint with the shoulder axis as
    normal; 1 = perfectly mirror-symmetric pose.
    """
    _require_uniform(clip)
    s_ref = reference_scale(clip)
    n = _shoulder_axis(clip)
    torso = clip.joint(JointId.TORSO)
    dsum = np.zeros(clip.n_frames)
    for jl, jr in _MIRROR_PAIRS:
        right = clip.joint(jr)
        proj = np.sum((right - torso) * n, axis=1, keepdims=True)
        reflected = right - 2.0 * proj * n
        dsum += np.linalg.norm(clip.joint(jl) - reflected, axis=1)
    sym = np.maximum(0.0, 1.0 - (dsum / len(_MIRROR_PAIRS)) / s_ref)
    return FeatureSeries(FeatureId.OVERALL_SYMMETRY, sym)


def head_symmetry(clip: SkeletonClip, reference: str) -> FeatureSeries:
    """Head centering over the hand or shoulder midpoint along the shoulder axis."""
    _require_uniform(clip)
    s_ref = reference_scale(clip)
    if reference == "hands":
        pair = (JointId.HAND_L, JointId.HAND_R)
        fid = FeatureId.HEAD_SYMMETRY_HANDS
    elif reference == "shoulders":
        pair = (JointId.SHOULDER_L, JointId.SHOULDER_R)
        fid = FeatureId.HEAD_SYMMETRY_SHOULDERS
    else:
        raise ValueError(f"reference must be 'hands' or 'shoulders', got {reference!r}")
    m = 0.5 * (clip.joint(pair[0]) + clip.joint(pair[1]))
    n = _shoulder_axis(clip)
    u = np.sum((clip.joint(JointId.HEAD) - m) * n, axis=1) / s_ref
    return FeatureSeries(fid, np.maximum(0.0, 1.0 - np.abs(u)))


def leaning(clip: SkeletonClip, joint: JointId) -> tuple[FeatureSeries, FeatureSeries]:
    """Sagittal offset from the clip-median rest position, and its rate."""
    dt = _require_uniform(clip)
    s_ref = reference_scale(clip)
    z = clip.joint(joint)[:, 2]
    pos = (z - np.median(z)) / s_ref
    spd = _derive(pos, dt)
    if joint == JointId.HEAD:
        ids = (FeatureId.HEAD_LEANING_POS, FeatureId.HEAD_LEANING_SPEED)
    elif joint == JointId.TORSO:
        ids = (FeatureId.TORSO_LEANING_POS, FeatureId.TORSO_LEANING_SPEED)
    else:
        raise ValueError("leaning is defined for the head and torso joints")
    return FeatureSeries(ids[0], pos), FeatureSeries(ids[1], spd)


def pair_distance(clip: SkeletonClip, a: JointId, b: JointId, fid: FeatureId) -> FeatureSeries:
    _require_uniform(clip)
    s_ref = reference_scale(clip)
    d = np.linalg.norm(clip.joint(a) - clip.joint(b), axis=1) / s_ref
    return FeatureSeries(fid, d)


def curvature(clip: SkeletonClip, joint: JointId) -> FeatureSeries:
    """Trajectory curvature |v x a| / |v|^3; 0 when the joint is nearly still."""
    dt = _require_uniform(clip, min_frames=4)
    p = clip.joint(joint)
    v = _derive(p, dt)
    a = _derive(v, dt)
    speed = np.linalg.norm(v, axis=1)
    cross = np.linalg.norm(np.cross(v, a), axis=1)
    out = np.zeros(len(p))
    moving = speed >= SPEED_EPS
    out[moving] = cross[moving] / speed[moving] ** 3
    return FeatureSeries(FeatureId.HAND_CURVATURE, out)


# ---------------------------------------------------------------------------
# sliding-window features


def _windowed_sums(x: np.ndarray, w: int) -> np.ndarray:
    """Sums of every length-w window of x."""
    css = np.concatenate([[0.0], np.cumsum(x)])
    return css[w:] - css[:-w]


def dimensionless_jerk_profile(
    positions: np.ndarray, dt: float, window: int
) -> np.ndarray:
    """Negative-log dimensionless jerk per frame for one joint trajectory.

    DJ over a window = duration^5 / path_length^2 * integral of |jerk|^2.
    Windows whose path length is below PATH_EPS emit the running minimum of
    the values produced so far (0 if none yet).
    """
    n = len(positions)
    w, h = _window_bounds(n, window)
    v = _derive(positions, dt)
    a = _derive(v, dt)
    j = _derive(a, dt)
    jsq = np.sum(j * j, axis=1)
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    # trapezoid integral of |j|^2 over each window
    frame_sums = _windowed_sums(jsq, w)
    integ = dt * (frame_sums - 0.5 * (jsq[: n - w + 1] + jsq[w - 1 :]))
    path = _windowed_sums(steps, w - 1) if w > 1 else np.zeros(n)
    duration = (w - 1) * dt
    centers = np.empty(len(integ))
    running_min = 0.0
    have_value = False
    for i in range(len(integ)):
        if path[i] < PATH_EPS:
            centers[i] = running_min if have_value else 0.0
        else:
            dj = duration**5 / path[i] ** 2 * max(integ[i], 0.0)
            val = -np.log(max(dj, 1e-300))
            centers[i] = val
            running_min = min(running_min, val) if have_value else val
            have_value = True
    return _replicate_centers(centers, n, h)


def _require_window(window: int, minimum: int = 8) -> None:
    if window < minimum:
        raise InvalidSpec(f"window must cover >= {minimum} frames, got {window}")


def smoothness(clip: SkeletonClip, joint: JointId, window: int = DEFAULT_STAT_WINDOW) -> FeatureSeries:
    _require_window(window)
    dt = _require_uniform(clip, min_frames=4)
    vals = dimensionless_jerk_profile(clip.joint(joint), dt, window)
    return FeatureSeries(FeatureId.HAND_SMOOTHNESS, vals)


def speed_evenness_profile(speed: np.ndarray, window: int) -> np.ndarray:
    """1/(1+cv^2) of the speed over sliding windows; 1 = perfectly even tempo."""
    n = len(speed)
    w, h = _window_bounds(n, window)
    mean = _windowed_sums(speed, w) / w
    sq = _windowed_sums(speed * speed, w) / w
    var = np.maximum(sq - mean * mean, 0.0)
    cv = np.sqrt(var) / (mean + STAT_EPS)
    return _replicate_centers(1.0 / (1.0 + cv * cv), n, h)


def fluidity(clip: SkeletonClip, joint: JointId, window: int = DEFAULT_STAT_WINDOW) -> FeatureSeries:
    _require_window(window)
    dt = _require_uniform(clip, min_frames=4)
    speed = np.linalg.norm(_derive(clip.joint(joint), dt), axis=1)
    return FeatureSeries(FeatureId.HAND_FLUIDITY, speed_evenness_profile(speed, window))


def burst_ratio_profile(accel_mag: np.ndarray, window: int) -> np.ndarray:
    """max|a| / (mean|a| + eps) over sliding windows; high = isolated bursts."""
    n = len(accel_mag)
    w, h = _window_bounds(n, window)
    mx = sliding_window_view(accel_mag, w).max(axis=1)
    mean = _windowed_sums(accel_mag, w) / w
    return _replicate_centers(mx / (mean + STAT_EPS), n, h)


def impulsiveness(clip: SkeletonClip, joint: JointId, window: int = DEFAULT_STAT_WINDOW) -> FeatureSeries:
    _require_window(window)
    dt = _require_uniform(clip, min_frames=4)
    v = _derive(clip.joint(joint), dt)
    amag = np.linalg.norm(_derive(v, dt), axis=1)
    return FeatureSeries(FeatureId.HAND_IMPULSIVENESS, burst_ratio_profile(amag, window))


def periodicity_profile(series: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame periodicity score and best lag of a scalar series.

    Score = max over lags in [PERIOD_MIN_LAG, w/2] of the mean-removed,
    count-normalized autocorrelation, clamped to [0, 1].  Near-constant
    windows score 0 (lag 0).
    """
    n = len(series)
    w, h = _window_bounds(n, window)
    max_lag = w // 2
    if max_lag < PERIOD_MIN_LAG:
        return np.zeros(n), np.zeros(n, dtype=int)
    wins = sliding_window_view(series, w).astype(np.float64)
    wins = wins - wins.mean(axis=1, keepdims=True)
    var = np.mean(wins * wins, axis=1)
    lags = np.arange(PERIOD_MIN_LAG, max_lag + 1)
    rho = np.empty((len(wins), len(lags)))
    for k, lag in enumerate(lags):
        # count-normalized so a pure cycle scores ~1 regardless of lag
        rho[:, k] = np.mean(wins[:, : w - lag] * wins[:, lag:], axis=1)
    ok = var >= VAR_EPS
    rho[ok] /= var[ok, None]
    rho[~ok] = 0.0
    best = rho.argmax(axis=1)
    scores = np.clip(rho[np.arange(len(wins)), best], 0.0, 1.0)
    scores[~ok] = 0.0
    best_lags = lags[best]
    best_lags[~ok] = 0
    return (
        _replicate_centers(scores, n, h),
        _replicate_centers(best_lags.astype(float), n, h).astype(int),
    )


def periodicity(clip: SkeletonClip, window: int = DEFAULT_PERIOD_WINDOW) -> FeatureSeries:
    """Whole-body rhythm: periodicity of the kinetic-energy series."""
    rate = 1.0 / clip.dt()
    _require_window(window, minimum=int(round(2.0 * rate)))
    energy = kinetic_energy(clip).values
    scores, _ = periodicity_profile(energy, window)
    return FeatureSeries(FeatureId.WHOLE_BODY_PERIODICITY, scores)


# ---------------------------------------------------------------------------
# full extraction


def _avg(fid: FeatureId, left: FeatureSeries, right: FeatureSeries) -> FeatureSeries:
    return FeatureSeries(fid, 0.5 * (left.values + right.values))


def extract_all(
    segment: SkeletonClip,
    stat_window: int = DEFAULT_STAT_WINDOW,
    period_window: int = DEFAULT_PERIOD_WINDOW,
) -> FeatureSet:
    """All 25 series with default windows; L/R-paired features averaged."""
    series: dict[FeatureId, FeatureSeries] = {}

    series[FeatureId.KINETIC_ENERGY] = kinetic_energy(segment)
    series[FeatureId.CONTRACTION_INDEX] = contraction_index(segment)
    az, el = global_direction(segment)
    series[FeatureId.GLOBAL_DIRECTION_AZIMUTH] = az
    series[FeatureId.GLOBAL_DIRECTION_ELEVATION] = el
    series[FeatureId.OVERALL_SYMMETRY] = overall_symmetry(segment)
    series[FeatureId.WHOLE_BODY_PERIODICITY] = periodicity(segment, period_window)

    hs, ha, hj = kinematics(segment, JointId.HEAD)
    series[FeatureId.HEAD_SPEED] = hs
    series[FeatureId.HEAD_ACCEL] = ha
    series[FeatureId.HEAD_JERK] = hj
    pos, spd = leaning(segment, JointId.HEAD)
    series[FeatureId.HEAD_LEANING_POS] = pos
    series[FeatureId.HEAD_LEANING_SPEED] = spd
    series[FeatureId.HEAD_SYMMETRY_HANDS] = head_symmetry(segment, "hands")
    series[FeatureId.HEAD_SYMMETRY_SHOULDERS] = head_symmetry(segment, "shoulders")

    pos, spd = leaning(segment, JointId.TORSO)
    series[FeatureId.TORSO_LEANING_POS] = pos
    series[FeatureId.TORSO_LEANING_SPEED] = spd

    series[FeatureId.HANDS_DISTANCE] = pair_distance(
        segment, JointId.HAND_L, JointId.HAND_R, FeatureId.HANDS_DISTANCE
    )
    ls, la, lj = kinematics(segment, JointId.HAND_L)
    rs, ra, rj = kinematics(segment, JointId.HAND_R)
    series[FeatureId.HAND_SPEED] = _avg(FeatureId.HAND_SPEED, ls, rs)
    series[FeatureId.HAND_ACCEL] = _avg(FeatureId.HAND_ACCEL, la, ra)
    series[FeatureId.HAND_JERK] = _avg(FeatureId.HAND_JERK, lj, rj)
    series[FeatureId.HAND_CURVATURE] = _avg(
        FeatureId.HAND_CURVATURE,
        curvature(segment, JointId.HAND_L),
        curvature(segment, JointId.HAND_R),
    )
    series[FeatureId.HAND_SMOOTHNESS] = _avg(
        FeatureId.HAND_SMOOTHNESS,
        smoothness(segment, JointId.HAND_L, stat_window),
        smoothness(segment, JointId.HAND_R, stat_window),
    )
    series[FeatureId.HAND_FLUIDITY] = _avg(
        FeatureId.HAND_FLUIDITY,
        fluidity(segment, JointId.HAND_L, stat_window),
        fluidity(segment, JointId.HAND_R, stat_window),
    )
    series[FeatureId.HAND_IMPULSIVENESS] = _avg(
        FeatureId.HAND_IMPULSIVENESS,
        impulsiveness(segment, JointId.HAND_L, stat_window),
        impulsiveness(segment, JointId.HAND_R, stat_window),
    )
    series[FeatureId.HAND_DIST_TORSO] = _avg(
        FeatureId.HAND_DIST_TORSO,
        pair_distance(segment, JointId.HAND_L, JointId.TORSO, FeatureId.HAND_DIST_TORSO),
        pair_distance(segment, JointId.HAND_R, JointId.TORSO, FeatureId.HAND_DIST_TORSO),
    )
    series[FeatureId.HAND_DIST_HEAD] = _avg(
        FeatureId.HAND_DIST_HEAD,
        pair_distance(segment, JointId.HAND_L, JointId.HEAD, FeatureId.HAND_DIST_HEAD),
        pair_distance(segment, JointId.HAND_R, JointId.HEAD, FeatureId.HAND_DIST_HEAD),
    )

    fs = FeatureSet(series)
    for fid in fs:
        if not np.all(np.isfinite(fs[fid].values)):
            raise NonFinite(f"feature {fid.name} produced a non-finite value")
    return fs
