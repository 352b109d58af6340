"""Command-line entry point for the batch pipeline.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Subcommand output on stdout is machine-parseable (JSON or CSV); diagnostics
go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import classify, evaluate, representation, segmentation
from .errors import DataError
from .features import FeatureId, extract_all
from .skeleton import (
    DEFAULT_RATE,
    DEFAULT_SMOOTH_WINDOW,
    Dataset,
    class_set_for,
    load_clip,
    load_dataset,
    preprocess,
    save_clip,
    write_dataset,
)
from .synth import GeneratorSpec, synth_dataset

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we map usage errors to 1
        raise UsageError(message)


def _segment_flags(p):
    p.add_argument("--segment-gestures", dest="segment_gestures", action="store_true",
                   help="run the energy segmenter and use extracted gestures")
    p.add_argument("--no-segment", dest="segment_gestures", action="store_false",
                   help="treat each clip as one pre-segmented gesture (default)")
    p.set_defaults(segment_gestures=False)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="emokin", description=__doc__)
    parser.add_argument("--rate", type=float, default=DEFAULT_RATE, help="internal resample rate (Hz)")
    parser.add_argument("--smooth-window", type=int, default=DEFAULT_SMOOTH_WINDOW)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=0,
                        help="threads for batch feature extraction (0 = all cores)")
    parser.add_argument("--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--subjects", type=int, default=12)
    p.add_argument("--per-class", type=int, default=5)
    p.add_argument("--classes", type=int, choices=(4, 6), default=6)
    p.add_argument("--duration-min", type=float, default=2.5)
    p.add_argument("--duration-max", type=float, default=4.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("extract", help="dump the 25 feature series of a clip as CSV")
    p.add_argument("--clip", required=True)

    p = sub.add_parser("segment", help="split a clip into gesture segments")
    p.add_argument("--clip", required=True)
    p.add_argument("--tau-on", type=float, default=None)
    p.add_argument("--tau-off", type=float, default=None)
    p.add_argument("--hold", type=int, default=None)
    p.add_argument("--min-len", type=int, default=None)
    p.add_argument("--pad", type=int, default=5)
    p.add_argument("--emit-clips", default=None, metavar="DIR")

    p = sub.add_parser("train", help="train a model on a dataset directory")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, choices=(4, 6), default=6)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-4)
    _segment_flags(p)

    p = sub.add_parser("predict", help="classify one clip with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--clip", required=True)

    p = sub.add_parser("evaluate", help="run an evaluation protocol")
    p.add_argument("--data", required=True)
    p.add_argument("--protocol", choices=("split", "loso", "both"), default="split")
    p.add_argument("--classes", type=int, choices=(4, 6), default=6)
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--ratio", type=float, default=0.7)
    p.add_argument("--style", choices=("paper-table", "json", "csv"), default="paper-table")
    p.add_argument("--human-reference", action="store_true")
    p.add_argument("--C", type=float, default=1.0)
    _segment_flags(p)

    p = sub.add_parser("inspect", help="per-class cumulative feature histograms as CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--feature", required=True,
                   help="feature name, e.g. kinetic_energy or contraction_index")
    p.add_argument("--classes", type=int, choices=(4, 6), default=6)

    p = sub.add_parser("serve", help="start the HTTP classification/game service")
    p.add_argument("--model", required=True)
    p.add_argument("--clips", default=None, metavar="DIR")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_synth(args) -> int:
    spec = GeneratorSpec(
        class_set=class_set_for(args.classes),
        subjects=args.subjects,
        clips_per_class=args.per_class,
        rate=args.rate,
        duration_range=(args.duration_min, args.duration_max),
    )
    dataset = synth_dataset(spec, args.seed)
    manifest = write_dataset(dataset, args.out)
    print(json.dumps({
        "clips": len(dataset),
        "subjects": len(dataset.subjects()),
        "classes": args.classes,
        "manifest": str(manifest),
    }))
    return EXIT_OK


def _cmd_extract(args) -> int:
    clip = preprocess(load_clip(args.clip), args.rate, args.smooth_window)
    fs = extract_all(clip)
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["t"] + [f.name.lower() for f in FeatureId])
    for i in range(fs.n_frames()):
        writer.writerow([f"{clip.times[i]:.6f}"] + [repr(float(fs[f].values[i])) for f in FeatureId])
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def _cmd_segment(args) -> int:
    clip = preprocess(load_clip(args.clip), args.rate, args.smooth_window)
    if args.tau_on is None:
        params = segmentation.auto_params(Dataset([clip]), rate=args.rate)
        if args.tau_off is not None or args.hold is not None or args.min_len is not None:
            raise UsageError("--tau-off/--hold/--min-len require --tau-on")
    else:
        tau_off = args.tau_off if args.tau_off is not None else args.tau_on / 2.0
        params = segmentation.SegmenterParams(
            tau_on=args.tau_on,
            tau_off=tau_off,
            hold=args.hold if args.hold is not None else max(1, int(round(0.5 * args.rate))),
            min_len=args.min_len if args.min_len is not None else max(2, int(round(args.rate))),
            pad=args.pad,
        )
    segments = segmentation.segment(clip, params)
    if args.emit_clips:
        out_dir = Path(args.emit_clips)
        out_dir.mkdir(parents=True, exist_ok=True)
        for k, seg in enumerate(segments):
            save_clip(seg.extract(clip), out_dir / f"{Path(args.clip).stem}_seg{k:02d}.jsonl")
    print(json.dumps({
        "params": {
            "tau_on": params.tau_on, "tau_off": params.tau_off,
            "hold": params.hold, "min_len": params.min_len, "pad": params.pad,
        },
        "segments": [
            {
                "start_frame": s.start_frame,
                "end_frame": s.end_frame,
                "start_t": float(clip.times[s.start_frame]),
                "end_t": float(clip.times[s.end_frame]),
                "peak_energy": s.peak_energy,
            }
            for s in segments
        ],
    }))
    return EXIT_OK


def _load_items(args, class_set):
    dataset = load_dataset(args.data).filter_classes(class_set)
    dataset.validate(class_set)
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    if not getattr(args, "segment_gestures", False):
        return evaluate.extract_items(dataset, args.rate, args.smooth_window, jobs=jobs)
    pres = [preprocess(c, args.rate, args.smooth_window) for c in dataset.clips]
    params = segmentation.auto_params(Dataset(pres), rate=args.rate)
    items = []
    for clip, pre in zip(dataset.clips, pres):
        for seg in segmentation.segment(pre, params):
            items.append(evaluate.EvalItem(
                clip.subject_id, clip.label, extract_all(seg.extract(pre))
            ))
    if not items:
        raise DataError("the segmenter produced no gestures; try --no-segment")
    return items


def _cmd_train(args) -> int:
    class_set = class_set_for(args.classes)
    items = _load_items(args, class_set)
    binning = representation.fit_binning([it.features for it in items])
    data = [(representation.assemble(it.features, binning), it.label) for it in items]
    model = classify.train_model(data, class_set, C=args.C, tol=args.tol,
                                 binning=binning, seed=args.seed)
    classify.save_model(model, args.out)
    print(json.dumps({
        "model": args.out,
        "classes": [c.value for c in class_set],
        "machines": len(model.machines),
        "examples": model.trained_on.get("examples"),
    }))
    return EXIT_OK


def _cmd_predict(args) -> int:
    model = classify.load_model(args.model)
    if model.binning is None:
        raise DataError("model file carries no binning spec; cannot featurize")
    clip = preprocess(load_clip(args.clip), args.rate, args.smooth_window)
    fv = representation.assemble(extract_all(clip), model.binning)
    pred = classify.predict(model, fv)
    print(json.dumps({
        "label": pred.label.value,
        "losses": pred.losses_by_label(model.class_set),
    }))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    class_set = class_set_for(args.classes)
    items = _load_items(args, class_set)
    trainer = evaluate.default_trainer(C=args.C)
    reports = []
    if args.protocol in ("split", "both"):
        reports.append(evaluate.split_eval(
            items, ratio=args.ratio, repeats=args.repeats, seed=args.seed,
            class_set=class_set, trainer=trainer,
        ))
    if args.protocol in ("loso", "both"):
        reports.append(evaluate.loso_eval(items, class_set=class_set, seed=args.seed,
                                          trainer=trainer))
    sys.stdout.write(evaluate.render_report(reports, style=args.style,
                                            human_reference=args.human_reference))
    return EXIT_OK


def _cmd_inspect(args) -> int:
    class_set = class_set_for(args.classes)
    items = _load_items(args, class_set)
    try:
        fid = FeatureId[args.feature.upper()]
    except KeyError:
        raise UsageError(f"unknown feature {args.feature!r}") from None
    binning = representation.fit_binning([it.features for it in items])
    hists = representation.class_histograms(
        [it.features for it in items], [it.label for it in items], fid, binning
    )
    lo, hi = binning.ranges[fid]
    width = (hi - lo) / binning.bins
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["bin", "lo", "hi"] + [c.value for c in class_set])
    for b in range(binning.bins):
        row = [b, f"{lo + b * width:.6g}", f"{lo + (b + 1) * width:.6g}"]
        row += [f"{hists[c][b]:.6f}" if c in hists else "" for c in class_set]
        writer.writerow(row)
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = classify.load_model(args.model)
    app = create_app(
        model,
        clips_dir=args.clips,
        rate=args.rate,
        smooth_window=args.smooth_window,
        seed=args.seed,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "extract": _cmd_extract,
    "segment": _cmd_segment,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "evaluate": _cmd_evaluate,
    "inspect": _cmd_inspect,
    "serve": _cmd_serve,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        if getattr(args, "verbose", False):
            import traceback

            traceback.print_exc()
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
