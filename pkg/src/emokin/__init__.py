"""Real-time emotion recognition from 3D body-skeleton motion."""

from .skeleton import (
    ClassSet,
    Dataset,
    EmotionLabel,
    FOUR_CLASSES,
    JointId,
    SIX_CLASSES,
    SkeletonClip,
    load_clip,
    load_dataset,
    preprocess,
    resample,
    save_clip,
    smooth,
    write_dataset,
)
from .features import FeatureId, FeatureSeries, FeatureSet, extract_all
from .segmentation import GestureSegment, SegmenterParams, auto_params, segment
from .representation import BinningSpec, assemble, fit_binning, histogram
from .svm import BinarySvm, train_binary
from .classify import (
    OvoEcocModel,
    Prediction,
    ecoc_decode,
    load_model,
    predict,
    save_model,
    train_model,
)
from .evaluate import Report, loso_eval, render_report, split_eval
from .synth import GeneratorSpec, synth_dataset

__version__ = "0.1.0"

__all__ = [
    "BinarySvm",
    "BinningSpec",
    "ClassSet",
    "Dataset",
    "EmotionLabel",
    "FOUR_CLASSES",
    "FeatureId",
    "FeatureSeries",
    "FeatureSet",
    "GeneratorSpec",
    "GestureSegment",
    "JointId",
    "OvoEcocModel",
    "Prediction",
    "Report",
    "SIX_CLASSES",
    "SegmenterParams",
    "SkeletonClip",
    "assemble",
    "auto_params",
    "ecoc_decode",
    "extract_all",
    "fit_binning",
    "histogram",
    "load_clip",
    "load_dataset",
    "load_model",
    "loso_eval",
    "predict",
    "preprocess",
    "render_report",
    "resample",
    "save_clip",
    "save_model",
    "segment",
    "smooth",
    "split_eval",
    "synth_dataset",
    "train_binary",
    "train_model",
    "write_dataset",
]
