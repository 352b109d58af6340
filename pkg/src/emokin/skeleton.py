"""Skeleton data model, clip file I/O, and preprocessing.

A clip is a time-ordered sequence of frames, each carrying the 3D positions
of 8 upper-body joints.  Coordinates are meters with x = lateral (subject's
left positive), y = vertical up, z = sagittal (toward the sensor positive).
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    DegenerateFrame,
    EmptyDataset,
    InvalidSpec,
    NotUniform,
    ParseError,
    SchemaError,
    TooShort,
)


class JointId(IntEnum):
    """The eight tracked joints, in canonical column order."""

    HEAD = 0
    SHOULDER_L = 1
    SHOULDER_R = 2
    ELBOW_L = 3
    ELBOW_R = 4
    HAND_L = 5
    HAND_R = 6
    TORSO = 7


N_JOINTS = len(JointId)

JOINT_KEYS: dict[JointId, str] = {
    JointId.HEAD: "head",
    JointId.SHOULDER_L: "shoulder_l",
    JointId.SHOULDER_R: "shoulder_r",
    JointId.ELBOW_L: "elbow_l",
    JointId.ELBOW_R: "elbow_r",
    JointId.HAND_L: "hand_l",
    JointId.HAND_R: "hand_r",
    JointId.TORSO: "torso",
}

KEY_TO_JOINT = {k: j for j, k in JOINT_KEYS.items()}

SOURCES = ("qualisys", "kinect", "synthetic", "stream")


class EmotionLabel(str, Enum):
    ANGER = "anger"
    DISGUST = "disgust"
    FEAR = "fear"
    HAPPINESS = "happiness"
    SADNESS = "sadness"
    SURPRISE = "surprise"


ClassSet = tuple[EmotionLabel, ...]

# Class sets are alphabetical so model indices stay stable across runs.
SIX_CLASSES: ClassSet = (
    EmotionLabel.ANGER,
    EmotionLabel.DISGUST,
    EmotionLabel.FEAR,
    EmotionLabel.HAPPINESS,
    EmotionLabel.SADNESS,
    EmotionLabel.SURPRISE,
)
FOUR_CLASSES: ClassSet = (
    EmotionLabel.ANGER,
    EmotionLabel.FEAR,
    EmotionLabel.HAPPINESS,
    EmotionLabel.SADNESS,
)


def class_set_for(n: int) -> ClassSet:
    if n == 4:
        return FOUR_CLASSES
    if n == 6:
        return SIX_CLASSES
    raise InvalidSpec(f"class set size must be 4 or 6, got {n}")


def parse_label(text: str | None) -> Optional[EmotionLabel]:
    if text is None or text == "" or text == "null":
        return None
    try:
        return EmotionLabel(text.lower())
    except ValueError:
        raise SchemaError(f"unknown emotion label {text!r}") from None


@dataclass(frozen=True)
class SkeletonClip:
    """Immutable time series of skeleton frames.

    times: (T,) seconds, strictly increasing, non-negative.
    positions: (T, 8, 3) meters, joint order = JointId.
    """

    times: np.ndarray
    positions: np.ndarray
    subject_id: str = "anonymous"
    label: Optional[EmotionLabel] = None
    source: str = "stream"
    nominal_rate: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=np.float64)
        positions = np.asarray(self.positions, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        if times.ndim != 1 or positions.shape != (len(times), N_JOINTS, 3):
            raise SchemaError(
                f"positions shape {positions.shape} does not match "
                f"{len(times)} frames x {N_JOINTS} joints x 3"
            )
        if len(times) < 2:
            raise TooShort(f"clip needs at least 2 frames, got {len(times)}")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(positions)):
            raise SchemaError("non-finite value in clip")
        if times[0] < 0:
            raise SchemaError(f"negative timestamp {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise SchemaError("timestamps not strictly increasing")
        sho = positions[:, JointId.SHOULDER_L] - positions[:, JointId.SHOULDER_R]
        dist = np.linalg.norm(sho, axis=1)
        if np.any(dist <= 0):
            bad = int(np.argmin(dist))
            raise DegenerateFrame(f"zero shoulder distance at frame {bad}")
        times.flags.writeable = False
        positions.flags.writeable = False

    @property
    def n_frames(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def joint(self, j: JointId) -> np.ndarray:
        return self.positions[:, int(j)]

    def dt(self) -> float:
        """Median inter-frame spacing."""
        return float(np.median(np.diff(self.times)))

    def is_uniform(self, tol: float = 1e-9) -> bool:
        d = np.diff(self.times)
        return bool(np.ptp(d) <= tol)

    def shoulder_width(self) -> np.ndarray:
        sho = self.positions[:, JointId.SHOULDER_L] - self.positions[:, JointId.SHOULDER_R]
        return np.linalg.norm(sho, axis=1)

    def subclip(self, start: int, end: int) -> "SkeletonClip":
        """Frames start..end inclusive, metadata preserved."""
        return replace(
            self,
            times=self.times[start : end + 1].copy(),
            positions=self.positions[start : end + 1].copy(),
        )

    def frame_dict(self, i: int) -> dict:
        d: dict = {"t": float(self.times[i])}
        for j in JointId:
            d[JOINT_KEYS[j]] = [float(v) for v in self.positions[i, int(j)]]
        return d


def frame_from_dict(obj: dict, where: str = "frame") -> tuple[float, np.ndarray]:
    """Parse one wire/JSONL frame object into (t, (8,3) positions)."""
    if "t" not in obj:
        raise SchemaError(f"{where}: missing 't'")
    try:
        t = float(obj["t"])
    except (TypeError, ValueError):
        raise SchemaError(f"{where}: bad timestamp {obj['t']!r}") from None
    pos = np.empty((N_JOINTS, 3), dtype=np.float64)
    for j in JointId:
        key = JOINT_KEYS[j]
        if key not in obj:
            raise SchemaError(f"{where}: missing joint {key!r}")
        xyz = obj[key]
        if not isinstance(xyz, (list, tuple)) or len(xyz) != 3:
            raise SchemaError(f"{where}: joint {key!r} is not a 3-vector")
        pos[int(j)] = xyz
    if not np.all(np.isfinite(pos)):
        raise SchemaError(f"{where}: non-finite coordinate")
    return t, pos


def _dedupe_sorted(times: np.ndarray, positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Stable sort by t, then collapse duplicate timestamps keeping the first."""
    order = np.argsort(times, kind="stable")
    times = times[order]
    positions = positions[order]
    keep = np.concatenate([[True], np.diff(times) > 0])
    return times[keep], positions[keep]


def _build_clip(times, positions, meta: dict) -> SkeletonClip:
    times = np.asarray(times, dtype=np.float64)
    positions = np.asarray(positions, dtype=np.float64)
    if len(times) < 2:
        raise TooShort(f"clip has {len(times)} frames after dedup, need >= 2")
    times, positions = _dedupe_sorted(times, positions)
    if len(times) < 2:
        raise TooShort(f"clip has {len(times)} frames after dedup, need >= 2")
    rate = meta.get("rate")
    if rate is None:
        rate = 1.0 / float(np.median(np.diff(times)))
    return SkeletonClip(
        times=times,
        positions=positions,
        subject_id=str(meta.get("subject", "anonymous")),
        label=parse_label(meta.get("label")),
        source=str(meta.get("source", "stream")),
        nominal_rate=float(rate),
    )


def load_clip(path: str | Path, format: str | None = None) -> SkeletonClip:
    """Load a clip from JSONL (header line + frame lines) or CSV + sidecar."""
    path = Path(path)
    fmt = format or ("csv" if path.suffix.lower() == ".csv" else "jsonl")
    if fmt == "jsonl":
        return _load_jsonl(path)
    if fmt == "csv":
        return _load_csv(path)
    raise InvalidSpec(f"unknown clip format {fmt!r}")


def _load_jsonl(path: Path) -> SkeletonClip:
    meta: dict = {}
    times: list[float] = []
    positions: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc.msg}") from None
            if not isinstance(obj, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            if not times and not meta and "t" not in obj:
                meta = obj
                continue
            try:
                t, pos = frame_from_dict(obj, where=f"{path}:{lineno}")
            except SchemaError:
                raise
            times.append(t)
            positions.append(pos)
    return _build_clip(times, positions, meta)


CSV_COLUMNS = ["t"] + [f"{JOINT_KEYS[j]}_{ax}" for j in JointId for ax in "xyz"]


def _load_csv(path: Path) -> SkeletonClip:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}:1: empty file") from None
        if [h.strip() for h in header] != CSV_COLUMNS:
            raise SchemaError(f"{path}:1: header must be {','.join(CSV_COLUMNS)}")
        times = []
        positions = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_COLUMNS):
                raise ParseError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} columns")
            try:
                vals = [float(v) for v in row]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value") from None
            times.append(vals[0])
            positions.append(np.array(vals[1:], dtype=np.float64).reshape(N_JOINTS, 3))
    meta_path = path.with_suffix(".meta.json")
    meta = {}
    if meta_path.exists():
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{meta_path}: {exc.msg}") from None
    return _build_clip(times, positions, meta)


def save_clip(clip: SkeletonClip, path: str | Path, format: str | None = None) -> None:
    path = Path(path)
    fmt = format or ("csv" if path.suffix.lower() == ".csv" else "jsonl")
    meta = {
        "subject": clip.subject_id,
        "label": clip.label.value if clip.label is not None else None,
        "source": clip.source,
        "rate": clip.nominal_rate,
    }
    if fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(meta) + "\n")
            for i in range(clip.n_frames):
                fh.write(json.dumps(clip.frame_dict(i)) + "\n")
    elif fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for i in range(clip.n_frames):
                row = [repr(float(clip.times[i]))]
                row += [repr(float(v)) for v in clip.positions[i].ravel()]
                writer.writerow(row)
        path.with_suffix(".meta.json").write_text(json.dumps(meta), encoding="utf-8")
    else:
        raise InvalidSpec(f"unknown clip format {fmt!r}")


def resample(clip: SkeletonClip, rate: float) -> SkeletonClip:
    """Linear interpolation onto a uniform grid from first to last timestamp."""
    if rate <= 0:
        raise InvalidSpec(f"rate must be positive, got {rate}")
    duration = clip.duration
    if duration < 2.0 / rate:
        raise TooShort(f"duration {duration:.4f}s too short to resample at {rate} Hz")
    n = int(math.floor(duration * rate + 1e-9)) + 1
    new_t = clip.times[0] + np.arange(n, dtype=np.float64) / rate
    flat = clip.positions.reshape(clip.n_frames, -1)
    out = np.empty((n, flat.shape[1]), dtype=np.float64)
    for k in range(flat.shape[1]):
        out[:, k] = np.interp(new_t, clip.times, flat[:, k])
    return replace(
        clip,
        times=new_t,
        positions=out.reshape(n, N_JOINTS, 3),
        nominal_rate=float(rate),
    )


def smooth(clip: SkeletonClip, window: int) -> SkeletonClip:
    """Centered moving average; edges shrink to symmetric sub-windows."""
    if window < 1 or window % 2 == 0:
        raise InvalidSpec(f"window must be odd and >= 1, got {window}")
    if window == 1:
        return clip
    if not clip.is_uniform():
        raise NotUniform("smoothing requires a uniformly resampled clip")
    n = clip.n_frames
    h = window // 2
    idx = np.arange(n)
    half = np.minimum(h, np.minimum(idx, n - 1 - idx))
    flat = clip.positions.reshape(n, -1)
    css = np.vstack([np.zeros((1, flat.shape[1])), np.cumsum(flat, axis=0)])
    out = (css[idx + half + 1] - css[idx - half]) / (2 * half + 1)[:, None]
    return replace(clip, times=clip.times.copy(), positions=out.reshape(n, N_JOINTS, 3))


DEFAULT_RATE = 30.0
DEFAULT_SMOOTH_WINDOW = 5


def preprocess(
    clip: SkeletonClip,
    rate: float = DEFAULT_RATE,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
) -> SkeletonClip:
    """Canonical ingest: resample to the internal rate, then denoise."""
    return smooth(resample(clip, rate), smooth_window)


@dataclass
class Dataset:
    """A labeled collection of clips from one or more subjects."""

    clips: list[SkeletonClip] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.clips)

    def subjects(self) -> list[str]:
        return sorted({c.subject_id for c in self.clips})

    def labels(self) -> list[EmotionLabel]:
        return [c.label for c in self.clips]  # type: ignore[misc]

    def validate(self, class_set: ClassSet) -> None:
        if not self.clips:
            raise EmptyDataset("dataset has no clips")
        allowed = set(class_set)
        for c in self.clips:
            if c.label is None:
                raise SchemaError(f"unlabeled clip from subject {c.subject_id}")
            if c.label not in allowed:
                raise SchemaError(f"label {c.label.value!r} not in the active class set")

    def filter_classes(self, class_set: ClassSet) -> "Dataset":
        allowed = set(class_set)
        return Dataset([c for c in self.clips if c.label in allowed])


def write_dataset(dataset: Dataset, out_dir: str | Path) -> Path:
    """Write one JSONL per clip plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = []
    counters: dict[tuple[str, str], int] = {}
    for clip in dataset.clips:
        label = clip.label.value if clip.label is not None else "unlabeled"
        key = (clip.subject_id, label)
        k = counters.get(key, 0)
        counters[key] = k + 1
        name = f"{clip.subject_id}_{label}_{k:03d}.jsonl"
        save_clip(clip, out_dir / name)
        manifest.append({"path": name, "subject": clip.subject_id, "label": label})
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1), encoding="utf-8")
    return manifest_path


def load_dataset(path: str | Path) -> Dataset:
    """Load a dataset directory (manifest.json if present, else *.jsonl glob)."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    clips = []
    if manifest_path.exists():
        try:
            entries = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{manifest_path}: {exc.msg}") from None
        for e in entries:
            clips.append(load_clip(path / e["path"]))
    else:
        for f in sorted(path.glob("*.jsonl")):
            clips.append(load_clip(f))
    if not clips:
        raise EmptyDataset(f"no clips found under {path}")
    return Dataset(clips)
