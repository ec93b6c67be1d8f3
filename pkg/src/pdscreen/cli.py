"""Command-line interface.

Subcommands:

* ``serve`` — run the HTTP API
* ``analyze <session-dir>`` — analyze an on-disk session, print the report
* ``features <task> <file>`` — extract one task's feature vector
* ``train <modality> <csv> --out <bundle>`` — train/update a model bundle
* ``eval <modality> <csv> --model <bundle>`` — AUC or MAE+Pearson
* ``cohort <modality> --out <csv>`` — generate a synthetic training CSV
"""
from __future__ import annotations

import argparse
import csv as csv_mod
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import cohort as cohort_mod
from .bundle import ModelBundle, load_bundle, save_bundle
from .core import FACE_TASKS, TaskKind
from .dataset import TaskType, dataset_from_csv, dataset_to_csv
from .face import FACE_SCHEMA_ID, extract_face_features
from .gbdt import GbdtParams, predict_gbdt_batch, train_gbdt
from .ingest import TrackKind, gap_fill, parse_track, parse_wav
from .metrics import auc, mae_pearson
from .motor import MOTOR_SCHEMA_ID, aperture, detect_taps, extract_motor_features
from .pipeline import analyze_directory
from .screening import load_resource_directory
from .service import ServiceConfig, serve
from .speech import SPEECH_SCHEMA_ID, extract_speech_features
from .svm import train_svm_ensemble

MODALITY_SCHEMAS = {
    "speech": (SPEECH_SCHEMA_ID, TaskType.BINARY_CLASS),
    "face": (FACE_SCHEMA_ID, TaskType.BINARY_CLASS),
    "motor": (MOTOR_SCHEMA_ID, TaskType.REGRESSION),
}


def _fv_as_csv(fv) -> str:
    buf = io.StringIO()
    writer = csv_mod.writer(buf, lineterminator="\n")
    writer.writerow(fv.names)
    writer.writerow([repr(v) for v in fv.values])
    return buf.getvalue()


def cmd_features(args) -> int:
    task = TaskKind(args.task)
    data = Path(args.file).read_bytes()
    if task == TaskKind.SPEECH:
        fv = extract_speech_features(parse_wav(data))
        extras = {}
    elif task in FACE_TASKS:
        track = gap_fill(parse_track(data.decode("utf-8"), TrackKind.FACE))
        fv = extract_face_features({task: track})
        extras = {}
    else:
        track = gap_fill(parse_track(data.decode("utf-8"), TrackKind.HAND))
        sig = aperture(track)
        taps = detect_taps(sig)
        fv = extract_motor_features(sig, taps)
        extras = {
            "tap_events": [
                {
                    "t_peak": e.t_peak,
                    "amplitude": e.amplitude,
                    "rise_speed": e.rise_speed,
                    "fall_speed": e.fall_speed,
                }
                for e in taps
            ]
        }
    if args.json:
        print(json.dumps({**fv.as_dict(), **extras}, indent=1))
    else:
        print(_fv_as_csv(fv), end="")
    return 0


def cmd_train(args) -> int:
    schema_id, task_type = MODALITY_SCHEMAS[args.modality]
    data = dataset_from_csv(
        Path(args.csv).read_text(encoding="utf-8"), schema_id, task_type
    )
    out = Path(args.out)
    bundle = load_bundle(out) if out.exists() else ModelBundle()
    if args.modality == "face":
        bundle.face_model = train_svm_ensemble(
            data, c=args.svm_c, gamma=args.svm_gamma, seed=args.seed
        )
    else:
        params = GbdtParams(
            n_trees=args.n_trees,
            max_depth=args.max_depth,
            learning_rate=args.learning_rate,
            min_leaf=args.min_leaf,
            reg_lambda=args.reg_lambda,
        )
        model = train_gbdt(data, params, seed=args.seed)
        if args.modality == "speech":
            bundle.speech_model = model
        else:
            bundle.motor_model = model
    save_bundle(bundle, out)
    print(f"trained {args.modality} model on {len(data.x)} rows -> {out}")
    return 0


def cmd_eval(args) -> int:
    schema_id, task_type = MODALITY_SCHEMAS[args.modality]
    data = dataset_from_csv(
        Path(args.csv).read_text(encoding="utf-8"), schema_id, task_type
    )
    bundle = load_bundle(args.model)
    if args.modality == "speech":
        model = bundle.speech_model
    elif args.modality == "motor":
        model = bundle.motor_model
    else:
        model = bundle.face_model
    if model is None:
        print(f"bundle has no {args.modality} model", file=sys.stderr)
        return 1

    if args.modality == "face":
        from .core import FeatureVector
        from .svm import predict_svm_ensemble

        preds = np.array(
            [
                predict_svm_ensemble(
                    model,
                    FeatureVector(schema_id, data.feature_names, tuple(row)),
                )
                for row in data.x
            ]
        )
    else:
        preds = predict_gbdt_batch(model, data.x)

    if task_type == TaskType.BINARY_CLASS:
        value = auc(preds, data.y)
        if args.json:
            print(json.dumps({"auc": value}))
        else:
            print(f"AUC: {value:.4f}")
    else:
        mae, r = mae_pearson(preds, data.y)
        if args.json:
            print(json.dumps({"mae": mae, "pearson_r": r}))
        else:
            print(f"MAE: {mae:.4f}  Pearson r: {r:.4f}")
    return 0


def cmd_cohort(args) -> int:
    builders = {
        "speech": cohort_mod.build_speech_cohort,
        "face": cohort_mod.build_face_cohort,
        "motor": cohort_mod.build_motor_cohort,
    }
    data = builders[args.modality](args.n, args.seed)
    Path(args.out).write_text(dataset_to_csv(data), encoding="utf-8")
    print(f"wrote {len(data.x)} rows to {args.out}")
    return 0


def cmd_analyze(args) -> int:
    bundle = load_bundle(args.bundle)
    directory = load_resource_directory(args.resources or None)
    data = analyze_directory(args.session_dir, bundle, directory)
    sys.stdout.write(data.decode("utf-8"))
    return 0


def cmd_serve(args) -> int:
    config = ServiceConfig.load(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.store:
        config.store_root = args.store
    if args.bundle:
        config.bundle_path = args.bundle
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdscreen",
        description="Multimodal Parkinson's screening pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--store", help="session store root")
    p.add_argument("--bundle", help="model bundle path")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("analyze", help="analyze one on-disk session directory")
    p.add_argument("session_dir")
    p.add_argument("--bundle", required=True, help="model bundle path")
    p.add_argument("--resources", default="", help="resource directory JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("features", help="extract a task's feature vector")
    p.add_argument("task", choices=[t.value for t in TaskKind])
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="JSON instead of CSV")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train one modality model into a bundle")
    p.add_argument("modality", choices=["speech", "face", "motor"])
    p.add_argument("csv")
    p.add_argument("--out", required=True, help="bundle path (created or updated)")
    p.add_argument("--n-trees", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=4)
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--reg-lambda", type=float, default=1.0)
    p.add_argument("--svm-c", type=float, default=1.0)
    p.add_argument("--svm-gamma", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a bundle on a labelled CSV")
    p.add_argument("modality", choices=["speech", "face", "motor"])
    p.add_argument("csv")
    p.add_argument("--model", required=True, help="bundle path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("cohort", help="generate a synthetic labelled CSV")
    p.add_argument("modality", choices=["speech", "face", "motor"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cohort)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
