"""One-vs-one SVM bank with error-correcting output decoding.

K classes give K(K-1)/2 binary machines, one per ordered pair (i, j) with
i < j, trained with class i mapped to +1 and class j to -1.  The code matrix
has one row per class and one column per machine (+1/-1 for the pair's two
classes, 0 elsewhere); decoding picks the class whose row minimizes the total
hinge loss against the observed margins, which degrades gracefully to
majority voting when every machine is confident.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    InsufficientClassData,
    ParseError,
    VersionMismatch,
)
from .representation import BinningSpec
from .skeleton import ClassSet, EmotionLabel
from .svm import BinarySvm, train_binary

MODEL_VERSION = "1"


def class_pairs(n_classes: int) -> list[tuple[int, int]]:
    return list(combinations(range(n_classes), 2))


def code_matrix(n_classes: int) -> np.ndarray:
    """K x K(K-1)/2 matrix over {+1, -1, 0}; one column per machine."""
    pairs = class_pairs(n_classes)
    M = np.zeros((n_classes, len(pairs)), dtype=np.int8)
    for s, (i, j) in enumerate(pairs):
        M[i, s] = 1
        M[j, s] = -1
    return M


def ecoc_decode(margins: np.ndarray, M: np.ndarray) -> tuple[int, np.ndarray]:
    """Loss-based decoding with hinge loss over the active code entries.

    Ties on the loss break toward the larger code-weighted margin sum, then
    toward the lower class index.
    """
    margins = np.asarray(margins, dtype=np.float64)
    hinge = np.maximum(0.0, 1.0 - M * margins[None, :])
    losses = np.where(M != 0, hinge, 0.0).sum(axis=1)
    candidates = np.flatnonzero(losses == losses.min())
    if len(candidates) > 1:
        scores = (M[candidates] * margins[None, :]).sum(axis=1)
        candidates = candidates[scores == scores.max()]
    return int(candidates[0]), losses


@dataclass
class Prediction:
    label: EmotionLabel
    losses: np.ndarray  # per class, decoding order = class_set order
    margins: np.ndarray  # per machine, pair order

    def losses_by_label(self, class_set: ClassSet) -> dict[str, float]:
        return {c.value: float(v) for c, v in zip(class_set, self.losses)}


@dataclass
class OvoEcocModel:
    class_set: ClassSet
    machines: list[BinarySvm]
    binning: BinningSpec | None = None
    trained_on: dict = field(default_factory=dict)
    version: str = MODEL_VERSION

    def __post_init__(self):
        expected = len(class_pairs(len(self.class_set)))
        if len(self.machines) != expected:
            raise InsufficientClassData(
                f"{len(self.class_set)} classes need {expected} machines, "
                f"got {len(self.machines)}"
            )

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return class_pairs(len(self.class_set))

    @property
    def code(self) -> np.ndarray:
        return code_matrix(len(self.class_set))

    @property
    def dim(self) -> int:
        return len(self.machines[0].w)

    def margins(self, fv: np.ndarray) -> np.ndarray:
        fv = np.asarray(fv, dtype=np.float64)
        if fv.shape != (self.dim,):
            raise DimensionMismatch(f"expected vector of length {self.dim}, got {fv.shape}")
        return np.array([m.decision(fv[None, :])[0] for m in self.machines])


def train_model(
    data: list[tuple[np.ndarray, EmotionLabel]],
    class_set: ClassSet,
    C: float = 1.0,
    tol: float = 1e-4,
    binning: BinningSpec | None = None,
    seed: int = 0,
) -> OvoEcocModel:
    """Train the full pairwise machine bank over the given class set."""
    index = {c: k for k, c in enumerate(class_set)}
    by_class: dict[int, list[np.ndarray]] = {k: [] for k in range(len(class_set))}
    for fv, label in data:
        if label not in index:
            continue
        by_class[index[label]].append(np.asarray(fv, dtype=np.float64))
    for c, k in index.items():
        if len(by_class[k]) < 2:
            raise InsufficientClassData(
                f"class {c.value!r} has {len(by_class[k])} examples, need >= 2"
            )
    machines = []
    for i, j in class_pairs(len(class_set)):
        X = np.vstack(by_class[i] + by_class[j])
        y = np.concatenate([np.ones(len(by_class[i])), -np.ones(len(by_class[j]))])
        machines.append(train_binary(X, y, C=C, tol=tol, seed=seed))
    trained_on = {
        "examples": sum(len(v) for v in by_class.values()),
        "per_class": {c.value: len(by_class[index[c]]) for c in class_set},
    }
    return OvoEcocModel(
        class_set=class_set, machines=machines, binning=binning, trained_on=trained_on
    )


def predict(model: OvoEcocModel, fv: np.ndarray) -> Prediction:
    margins = model.margins(fv)
    idx, losses = ecoc_decode(margins, model.code)
    return Prediction(label=model.class_set[idx], losses=losses, margins=margins)


def model_to_json(model: OvoEcocModel) -> str:
    doc = {
        "version": model.version,
        "class_set": [c.value for c in model.class_set],
        "binning": model.binning.to_dict() if model.binning is not None else None,
        "machines": [
            {"pair": list(pair), "w": [float(v) for v in m.w], "b": float(m.b)}
            for pair, m in zip(model.pairs, model.machines)
        ],
        "trained_on": model.trained_on,
    }
    return json.dumps(doc)


def save_model(model: OvoEcocModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(model), encoding="utf-8")


def model_from_json(text: str) -> OvoEcocModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model file: {exc.msg}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise ParseError("model file: missing version field")
    if doc["version"] != MODEL_VERSION:
        raise VersionMismatch(
            f"model version {doc['version']!r} not supported (expected {MODEL_VERSION!r})"
        )
    try:
        class_set = tuple(EmotionLabel(c) for c in doc["class_set"])
        binning = BinningSpec.from_dict(doc["binning"]) if doc["binning"] else None
        expected_pairs = class_pairs(len(class_set))
        machines = []
        for entry, expected in zip(doc["machines"], expected_pairs):
            if tuple(entry["pair"]) != expected:
                raise ParseError(f"model file: machine pair order broken at {entry['pair']}")
            machines.append(
                BinarySvm(w=np.array(entry["w"], dtype=np.float64), b=float(entry["b"]), C=0.0)
            )
        model = OvoEcocModel(
            class_set=class_set,
            machines=machines,
            binning=binning,
            trained_on=doc.get("trained_on", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"model file: {exc}") from None
    return model


def load_model(path: str | Path) -> OvoEcocModel:
    return model_from_json(Path(path).read_text(encoding="utf-8"))
