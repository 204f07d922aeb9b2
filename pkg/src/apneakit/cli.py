"""Command-line pipeline orchestrator.

Exit codes: 0 success, 1 data/format error, 2 usage error. Every randomized
subcommand requires an explicit --seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import balancing, evaluation, knn, pipeline, preprocess, synth, windowing
from .errors import ApneaKitError
from .signal_io import (
    read_annotations,
    read_record,
    read_tensor,
    write_annotations,
    write_record,
    write_tensor,
)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    text = Path(path).read_text()
    if path.endswith(".toml"):
        try:
            import tomllib  # py311+
        except ImportError:
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _extract_config(args, overrides: dict) -> pipeline.ExtractConfig:
    rejection = windowing.RejectionConfig(
        **{
            k: overrides[k]
            for k in ("min_pulses", "ppi_min_s", "ppi_max_s", "max_bad_ppi_frac")
            if k in overrides
        }
    )
    return pipeline.ExtractConfig(
        hp_cutoff_hz=args.hp_cutoff,
        hp_atten_db=args.hp_atten,
        ma_width=args.ma_width,
        min_separation=overrides.get("min_separation", 30),
        rejection=rejection,
    )


def _cmd_synth(args):
    config = synth.SynthConfig(
        duration_s=args.duration,
        fs=args.fs,
        hr_bpm=args.hr,
        apnea_events_per_hour=args.events_per_hour,
        pwa_drop_frac=args.pwa_drop,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    record, events, _ = synth.generate(config)
    if args.subject_id:
        record = dataclasses.replace(record, subject_id=args.subject_id)
    out_dir = Path(args.out_dir)
    write_record(record, out_dir)
    write_annotations(events, out_dir / f"{record.subject_id}.events.csv")
    print(f"wrote {record.subject_id} ({record.duration_s:.0f} s, {len(events)} events)")
    return 0


def _cmd_segment(args):
    record = read_record(args.ppg)
    events, skipped = read_annotations(args.events) if args.events else ([], 0)
    windows = windowing.annotate_all(windowing.segment(record), events)
    if skipped:
        print(f"skipped {skipped} unknown event rows", file=sys.stderr)
    samples = np.stack([w.samples for w in windows]) if windows else np.zeros((0, 0))
    labels = np.array([w.label for w in windows])
    write_tensor(f"{args.out_prefix}.windows.apsn", samples.shape, samples)
    write_tensor(f"{args.out_prefix}.labels.apsn", labels.shape, labels)
    manifest = {
        "subject_id": record.subject_id,
        "fs_hz": record.fs,
        "n_windows": len(windows),
        "starts_s": [w.start_s for w in windows],
    }
    Path(f"{args.out_prefix}.manifest.json").write_text(json.dumps(manifest))
    print(f"{len(windows)} windows")
    return 0


def _cmd_extract(args):
    overrides = _load_config(args.config)
    record = read_record(args.ppg)
    events, _ = read_annotations(args.events) if args.events else ([], 0)
    result = pipeline.extract_subject(record, events, _extract_config(args, overrides))
    write_tensor(
        f"{args.out_prefix}.features.apsn", result.features.shape, result.features
    )
    write_tensor(f"{args.out_prefix}.labels.apsn", result.labels.shape, result.labels)
    manifest = {
        "subject_id": result.subject_id,
        "kept_indices": result.kept_indices.tolist(),
        "rejected": result.rejected,
    }
    Path(f"{args.out_prefix}.manifest.json").write_text(json.dumps(manifest))
    print(f"{len(result.labels)} windows kept, {len(result.rejected)} rejected")
    return 0


def _cmd_balance(args):
    overrides = _load_config(args.aug_config)
    config = balancing.AugmentConfig(
        **{
            k: overrides[k]
            for k in overrides
            if k in {f.name for f in dataclasses.fields(balancing.AugmentConfig)}
        }
    )
    _, windows = read_tensor(args.windows)
    _, labels = read_tensor(args.labels)
    labels = np.rint(labels).astype(np.int64)
    aug_w, aug_l = balancing.augment_minority(list(windows), labels, args.seed, config)
    bal_w, bal_l = balancing.undersample_majority(aug_w, aug_l, args.seed)
    stacked = np.stack(bal_w)
    write_tensor(f"{args.out_prefix}.windows.apsn", stacked.shape, stacked)
    write_tensor(f"{args.out_prefix}.labels.apsn", bal_l.shape, bal_l)
    print(f"{int((bal_l == 1).sum())} positive / {int((bal_l == 0).sum())} negative")
    return 0


def _cmd_split(args):
    subjects = json.loads(Path(args.subjects).read_text())
    plan = evaluation.make_splits(
        [(s["subject_id"], s["ahi"]) for s in subjects], seed=args.seed
    )
    out = {
        "seed": plan.seed,
        "outer_folds": [
            {
                "development": list(f.development),
                "test": list(f.test),
                "inner": [
                    {"train": [list(w) for w in tr], "validation": [list(w) for w in va]}
                    for tr, va in f.inner
                ],
            }
            for f in plan.outer_folds
        ],
    }
    Path(args.out).write_text(json.dumps(out, indent=2))
    print(f"{len(plan.outer_folds)} outer folds -> {args.out}")
    return 0


def _cmd_knn_build(args):
    _, vectors = read_tensor(args.vectors)
    _, labels = read_tensor(args.labels)
    space = knn.build_reference(
        vectors.astype(np.float64), np.rint(labels).astype(np.int64)
    )
    knn.save_reference(space, args.out_prefix)
    print(f"reference space: {space.n_vectors} x {space.dim} ({knn.BACKEND} backend)")
    return 0


def _cmd_knn_predict(args):
    space = knn.load_reference(args.ref_prefix)
    _, queries = read_tensor(args.queries)
    if queries.ndim != 2 or queries.shape[1] != space.dim:
        raise ApneaKitError(
            f"query dims {queries.shape} do not match reference dimension {space.dim}"
        )
    predictions = knn.predict_batch(space, queries.astype(np.float64), k=args.k)
    write_tensor(args.out, predictions.shape, predictions)
    print(f"{len(predictions)} predictions -> {args.out}")
    return 0


def _cmd_ahi(args):
    _, labels = read_tensor(args.labels)
    labels = np.rint(labels).astype(np.int64)
    report = {"sahi": evaluation.sahi(labels)}
    if args.predictions:
        _, preds = read_tensor(args.predictions)
        report["pahi"] = evaluation.pahi(np.rint(preds).astype(np.int64))
    print(json.dumps(report))
    return 0


def _cmd_snr(args):
    record = read_record(args.ppg)
    windows = windowing.segment(record)
    rows = [
        {"index": w.index, "start_s": w.start_s, "snr_db": preprocess.snr_db(w.samples, record.fs)}
        for w in windows
    ]
    print(json.dumps(rows))
    return 0


def _cmd_evaluate(args):
    subjects = json.loads(Path(args.subjects).read_text())
    summaries = []
    per_subject = {}
    for s in subjects:
        _, labels = read_tensor(s["labels"])
        _, preds = read_tensor(s["predictions"])
        labels = np.rint(labels).astype(np.int64)
        preds = np.rint(preds).astype(np.int64)
        per_subject[s["subject_id"]] = (labels, preds)
        summaries.append(
            evaluation.summarize_subject(
                s["subject_id"], labels, preds, s.get("ahi")
            )
        )

    if args.splits:
        plan = json.loads(Path(args.splits).read_text())
        fold_metrics = []
        for fold in plan["outer_folds"]:
            labels = np.concatenate([per_subject[s][0] for s in fold["test"]])
            preds = np.concatenate([per_subject[s][1] for s in fold["test"]])
            fold_metrics.append(evaluation.compute_metrics(preds, labels))
        aggregate = {
            name: {"mean": round(m, 2), "std": round(s_, 2)}
            for name, (m, s_) in evaluation.aggregate_folds(fold_metrics).items()
        }
    else:
        labels = np.concatenate([v[0] for v in per_subject.values()])
        preds = np.concatenate([v[1] for v in per_subject.values()])
        fold_metrics = [evaluation.compute_metrics(preds, labels)]
        aggregate = None

    sahis = [s.sahi for s in summaries]
    pahis = [s.pahi for s in summaries]
    refs = [s.ahi_reference for s in summaries]
    report = {
        "folds": [m.as_dict() for m in fold_metrics],
        "aggregate": aggregate,
        "subjects": [s.as_dict() for s in summaries],
        "pearson_sahi_pahi": evaluation.pearson(sahis, pahis) if len(sahis) >= 2 else None,
        "pearson_ref_sahi": (
            evaluation.pearson([r for r in refs if r is not None],
                               [s_ for r, s_ in zip(refs, sahis) if r is not None])
            if sum(r is not None for r in refs) >= 2
            else None
        ),
    }
    out_text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(out_text)
    print(out_text)
    if args.csv:
        lines = ["subject_id,ahi_reference,sahi,pahi"]
        for s in summaries:
            ref = "" if s.ahi_reference is None else repr(s.ahi_reference)
            lines.append(f"{s.subject_id},{ref},{s.sahi!r},{s.pahi!r}")
        Path(args.csv).write_text("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apneakit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic subject")
    p.add_argument("--duration", type=float, default=3600.0)
    p.add_argument("--fs", type=float, default=64.0)
    p.add_argument("--hr", type=float, default=60.0)
    p.add_argument("--events-per-hour", type=float, default=0.0)
    p.add_argument("--pwa-drop", type=float, default=0.5)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--subject-id", default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("segment", help="segment a record into labeled windows")
    p.add_argument("--ppg", required=True)
    p.add_argument("--events", default=None)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("extract", help="extract 7x60 feature tensors")
    p.add_argument("--ppg", required=True)
    p.add_argument("--events", default=None)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--hp-cutoff", type=float, default=20.0)
    p.add_argument("--hp-atten", type=float, default=40.0)
    p.add_argument("--ma-width", type=int, default=64)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("balance", help="augment minority + undersample majority")
    p.add_argument("--windows", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--aug-config", default=None)
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser("split", help="build the nested cross-validation plan")
    p.add_argument("--subjects", required=True, help="JSON list of {subject_id, ahi}")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("knn-build", help="build and store a reference space")
    p.add_argument("--vectors", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_knn_build)

    p = sub.add_parser("knn-predict", help="5-NN majority vote predictions")
    p.add_argument("--ref-prefix", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=knn.DEFAULT_K)
    p.set_defaults(func=_cmd_knn_predict)

    p = sub.add_parser("ahi", help="sampled / predicted AHI from label tensors")
    p.add_argument("--labels", required=True)
    p.add_argument("--predictions", default=None)
    p.set_defaults(func=_cmd_ahi)

    p = sub.add_parser("snr", help="per-window SNR of a record")
    p.add_argument("--ppg", required=True)
    p.set_defaults(func=_cmd_snr)

    p = sub.add_parser("evaluate", help="metrics + AHI report")
    p.add_argument(
        "--subjects",
        required=True,
        help="JSON list of {subject_id, ahi, labels, predictions}",
    )
    p.add_argument("--splits", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ApneaKitError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
