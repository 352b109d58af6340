"""Evaluation protocols: repeated stratified random split and
leave-one-subject-out, with paper-style per-class recall tables.

Both protocols fit the histogram binning and the classifier inside each
train partition only, so a held-out subject can never influence the model
that scores it.  A trainer callable can be injected for protocol tests.
"""
from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .classify import model_to_json, predict, train_model
from .errors import EmptyClass, EmptyDataset, InvalidSpec, SingleSubject
from .features import FeatureSet, extract_all
from .representation import assemble, fit_binning
from .skeleton import (
    ClassSet,
    Dataset,
    DEFAULT_RATE,
    DEFAULT_SMOOTH_WINDOW,
    EmotionLabel,
    FOUR_CLASSES,
    SIX_CLASSES,
    preprocess,
)

# Reference accuracy of 60 human observers on skeleton stimuli (percent),
# shown alongside machine results as a difficulty yardstick.
HUMAN_REFERENCE_6 = {
    EmotionLabel.HAPPINESS: 81.3,
    EmotionLabel.FEAR: 48.5,
    EmotionLabel.DISGUST: 37.2,
    EmotionLabel.SADNESS: 86.7,
    EmotionLabel.ANGER: 73.9,
    EmotionLabel.SURPRISE: 35.2,
}
HUMAN_REFERENCE_6_AVERAGE = 61.9
HUMAN_REFERENCE_4 = {
    EmotionLabel.HAPPINESS: 87.5,
    EmotionLabel.FEAR: 81.2,
    EmotionLabel.SADNESS: 94.9,
    EmotionLabel.ANGER: 82.0,
}
HUMAN_REFERENCE_4_AVERAGE = 85.2


@dataclass(frozen=True)
class EvalItem:
    subject: str
    label: EmotionLabel
    features: FeatureSet


def extract_items(
    dataset: Dataset,
    rate: float = DEFAULT_RATE,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    jobs: int = 1,
) -> list[EvalItem]:
    """Preprocess every clip and extract its feature set once (whole clip =
    one segment; corpora of this kind ship pre-segmented).

    Extraction is pure per clip, so `jobs` threads change the wall time but
    never the result; outputs keep dataset order regardless of jobs.
    """
    for clip in dataset.clips:
        if clip.label is None:
            raise EmptyClass(f"unlabeled clip from subject {clip.subject_id}")

    def one(clip) -> EvalItem:
        pre = preprocess(clip, rate, smooth_window)
        return EvalItem(clip.subject_id, clip.label, extract_all(pre))

    if jobs <= 1:
        return [one(clip) for clip in dataset.clips]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, dataset.clips))


PredictFn = Callable[[EvalItem], EmotionLabel]
Trainer = Callable[[list[EvalItem], ClassSet, int], tuple[PredictFn, Optional[str]]]


def default_trainer(C: float = 1.0, tol: float = 1e-4) -> Trainer:
    """Binning + OvO/ECOC pipeline; fingerprint = sha256 of the model JSON."""

    def train(train_items: list[EvalItem], class_set: ClassSet, seed: int):
        binning = fit_binning([it.features for it in train_items])
        data = [(assemble(it.features, binning), it.label) for it in train_items]
        model = train_model(data, class_set, C=C, tol=tol, binning=binning, seed=seed)
        fingerprint = hashlib.sha256(model_to_json(model).encode()).hexdigest()

        def predict_item(item: EvalItem) -> EmotionLabel:
            return predict(model, assemble(item.features, binning)).label

        return predict_item, fingerprint

    return train


@dataclass
class Report:
    protocol: str
    class_set: ClassSet
    confusion: np.ndarray  # rows = true class, columns = predicted
    per_class_recall: dict[EmotionLabel, float]
    total_accuracy: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "classes": [c.value for c in self.class_set],
            "confusion": self.confusion.tolist(),
            "per_class_recall": {c.value: self.per_class_recall[c] for c in self.class_set},
            "total_accuracy": self.total_accuracy,
            "metadata": self.metadata,
        }


def _score(
    true_idx: list[int], pred_idx: list[int], k: int
) -> tuple[np.ndarray, np.ndarray, float]:
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(true_idx, pred_idx):
        confusion[t, p] += 1
    row = confusion.sum(axis=1)
    recalls = np.divide(
        np.diag(confusion), row, out=np.zeros(k, dtype=np.float64), where=row > 0
    )
    accuracy = float(np.trace(confusion)) / max(1, confusion.sum())
    return confusion, recalls, accuracy


def split_eval(
    dataset: Dataset | list[EvalItem],
    ratio: float = 0.7,
    repeats: int = 50,
    seed: int = 0,
    class_set: ClassSet = SIX_CLASSES,
    trainer: Trainer | None = None,
) -> Report:
    """Stratified random split by clip, repeated; metrics averaged over repeats."""
    if not 0 < ratio < 1:
        raise InvalidSpec(f"split ratio must be in (0, 1), got {ratio}")
    items = dataset if isinstance(dataset, list) else extract_items(dataset)
    items = [it for it in items if it.label in set(class_set)]
    trainer = trainer or default_trainer()
    index = {c: k for k, c in enumerate(class_set)}
    by_class: dict[int, list[int]] = {k: [] for k in range(len(class_set))}
    for i, it in enumerate(items):
        by_class[index[it.label]].append(i)
    for c, k in index.items():
        if len(by_class[k]) < 2:
            raise EmptyClass(f"class {c.value!r} has {len(by_class[k])} clips, need >= 2")

    k = len(class_set)
    confusion = np.zeros((k, k), dtype=np.int64)
    recall_sum = np.zeros(k)
    acc_sum = 0.0
    for r in range(repeats):
        rng = np.random.default_rng([seed, r])
        train_ids: list[int] = []
        test_ids: list[int] = []
        for cls in range(k):
            ids = np.array(by_class[cls])
            rng.shuffle(ids)
            n_train = int(round(ratio * len(ids)))
            n_train = min(len(ids) - 1, max(1, n_train))
            train_ids.extend(ids[:n_train])
            test_ids.extend(ids[n_train:])
        predict_fn, _ = trainer([items[i] for i in train_ids], class_set, seed + r)
        true_idx = [index[items[i].label] for i in test_ids]
        pred_idx = [index[predict_fn(items[i])] for i in test_ids]
        conf_r, recalls_r, acc_r = _score(true_idx, pred_idx, k)
        confusion += conf_r
        recall_sum += recalls_r
        acc_sum += acc_r

    return Report(
        protocol="split",
        class_set=class_set,
        confusion=confusion,
        per_class_recall={c: float(recall_sum[index[c]] / repeats) for c in class_set},
        total_accuracy=acc_sum / repeats,
        metadata={"ratio": ratio, "repeats": repeats, "seed": seed},
    )


def loso_eval(
    dataset: Dataset | list[EvalItem],
    class_set: ClassSet = SIX_CLASSES,
    seed: int = 0,
    trainer: Trainer | None = None,
) -> Report:
    """One fold per subject; confusion aggregated across folds."""
    items = dataset if isinstance(dataset, list) else extract_items(dataset)
    items = [it for it in items if it.label in set(class_set)]
    if not items:
        raise EmptyDataset("no clips in the active class set")
    trainer = trainer or default_trainer()
    subjects = sorted({it.subject for it in items})
    if len(subjects) < 2:
        raise SingleSubject(f"LOSO needs >= 2 subjects, got {len(subjects)}")
    index = {c: k for k, c in enumerate(class_set)}

    k = len(class_set)
    true_idx: list[int] = []
    pred_idx: list[int] = []
    fold_fingerprints: dict[str, str | None] = {}
    for f, held_out in enumerate(subjects):
        train_items = [it for it in items if it.subject != held_out]
        test_items = [it for it in items if it.subject == held_out]
        predict_fn, fingerprint = trainer(train_items, class_set, seed + f)
        fold_fingerprints[held_out] = fingerprint
        for it in test_items:
            true_idx.append(index[it.label])
            pred_idx.append(index[predict_fn(it)])

    confusion, recalls, accuracy = _score(true_idx, pred_idx, k)
    return Report(
        protocol="loso",
        class_set=class_set,
        confusion=confusion,
        per_class_recall={c: float(recalls[index[c]]) for c in class_set},
        total_accuracy=accuracy,
        metadata={
            "folds": len(subjects),
            "seed": seed,
            "fold_fingerprints": fold_fingerprints,
        },
    )


def _human_reference(class_set: ClassSet) -> tuple[dict[EmotionLabel, float], float] | None:
    if tuple(class_set) == SIX_CLASSES:
        return HUMAN_REFERENCE_6, HUMAN_REFERENCE_6_AVERAGE
    if tuple(class_set) == FOUR_CLASSES:
        return HUMAN_REFERENCE_4, HUMAN_REFERENCE_4_AVERAGE
    return None


def render_report(
    reports: Report | list[Report],
    style: str = "paper-table",
    human_reference: bool = False,
) -> str:
    """Render one or more protocol runs as a table (one column per protocol)."""
    if isinstance(reports, Report):
        reports = [reports]
    if not reports:
        raise EmptyDataset("nothing to render")
    class_set = reports[0].class_set
    for r in reports[1:]:
        if r.class_set != class_set:
            raise InvalidSpec("reports use different class sets")

    human = _human_reference(class_set) if human_reference else None
    headers = ["class"] + [r.protocol for r in reports] + (["human"] if human else [])
    rows: list[list[str]] = []
    for c in class_set:
        row = [c.value] + [f"{100 * r.per_class_recall[c]:.1f}%" for r in reports]
        if human:
            row.append(f"{human[0][c]:.1f}%")
        rows.append(row)
    total = ["total"] + [f"{100 * r.total_accuracy:.1f}%" for r in reports]
    if human:
        total.append(f"{human[1]:.1f}%")
    rows.append(total)

    if style == "paper-table":
        widths = [max(len(h), *(len(r[k]) for r in rows)) for k, h in enumerate(headers)]
        lines = ["  ".join(h.ljust(widths[k]) for k, h in enumerate(headers))]
        for row in rows:
            lines.append("  ".join(v.ljust(widths[k]) for k, v in enumerate(row)))
        return "\n".join(lines) + "\n"
    if style == "csv":
        out = io.StringIO()
        out.write(",".join(headers) + "\n")
        for row in rows:
            out.write(",".join(v.rstrip("%") for v in row) + "\n")
        return out.getvalue()
    if style == "json":
        doc = {"reports": [r.to_dict() for r in reports]}
        if human:
            doc["human_reference"] = {
                "per_class": {c.value: human[0][c] for c in class_set},
                "average": human[1],
            }
        return json.dumps(doc, indent=1) + "\n"
    raise InvalidSpec(f"unknown report style {style!r}")
