"""Command-line orchestration of the pipeline.

Subcommands: synth, segment, extract, augment, train, evaluate, cv,
importance, embed. Stages communicate through files only. Exit codes:
0 success, 1 runtime/contract failure, 2 flag-parse error.
"""

import argparse
import json
import os
import sys

from . import augment as augment_mod
from . import dataset, evaluation, features, models, plots
from ._util import atomic_write_text, sha256_file
from .errors import ChitinError
from .features import MfccConfig

ALL_FAMILIES = list(models.FAMILIES)


def _parse_stats(text):
    stats = tuple(s.strip() for s in text.split(","))
    return stats


def _parse_families(text):
    if text == "all":
        return ALL_FAMILIES
    fams = [f.strip() for f in text.split(",")]
    unknown = set(fams) - set(ALL_FAMILIES)
    if unknown:
        raise ChitinError(f"unknown model families: {sorted(unknown)}; "
                          f"choose from {ALL_FAMILIES}")
    return fams


def _run_config(args, extra=None):
    cfg = {k: v for k, v in vars(args).items()
           if k not in ("func",) and not k.startswith("_")}
    if extra:
        cfg.update(extra)
    return cfg


def _write_json(path, doc):
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def cmd_synth(args):
    spec = dataset.SynthSpec(clips_per_class=args.clips,
                             clip_duration=args.duration,
                             sample_rate=args.sample_rate,
                             seed=args.seed,
                             window_seconds=args.window)
    dataset.synth_generate(spec, args.out)
    manifest_path = os.path.join(args.out, "manifest.json")
    _write_json(os.path.join(args.out, "run_config.json"),
                _run_config(args, {"command": "synth"}))
    print(manifest_path)


def cmd_segment(args):
    manifest = dataset.load_manifest(os.path.join(args.data, "manifest.json"),
                                     check_files=False)
    out = dataset.segment_manifest(manifest, args.data,
                                   window_seconds=args.window)
    n = sum(len(c.instances) for cls in out.classes for c in cls.clips)
    print(f"{n} instances written under {args.data}")


def cmd_extract(args):
    manifest = dataset.load_manifest(os.path.join(args.data, "manifest.json"))
    if args.per_class > 0:
        manifest = dataset.sample_instances(manifest, args.per_class,
                                            seed=args.seed)
    cfg = MfccConfig(n_mfcc=args.n_mfcc, stats=_parse_stats(args.stats))
    instances = dataset.load_instances(manifest, args.data)
    matrix = features.build_feature_matrix(instances, cfg)
    features.save_feature_csv(matrix, args.out)
    _write_json(args.out + ".meta.json", _run_config(args, {
        "command": "extract",
        "manifest_sha256": sha256_file(
            os.path.join(args.data, "manifest.json")),
    }))
    print(args.out)


def cmd_augment(args):
    manifest = dataset.load_manifest(os.path.join(args.data, "manifest.json"))
    spec = augment_mod.AugmentSpec(
        speed_factors=tuple(float(f) for f in args.speed.split(","))
        if args.speed else (),
        pitch_factors=tuple(float(f) for f in args.pitch.split(","))
        if args.pitch else (),
        seed=args.seed,
    )
    out = augment_mod.augment_dataset(manifest, args.data, spec)
    dataset.save_manifest(out, os.path.join(args.data, "manifest.json"))
    total = sum(len(c.instances) for cls in out.classes for c in cls.clips)
    augmented = sum(1 for cls in out.classes for c in cls.clips
                    for i in c.instances if i.augmented)
    print(f"{total} instances ({augmented} augmented)")


def _load_features(path):
    return features.load_feature_csv(path)


def cmd_train(args):
    matrix = _load_features(args.features)
    encoding = models.encode_labels(matrix.labels)
    y = encoding.encode(matrix.labels)
    if args.split != "80-20":
        raise ChitinError("train supports --split 80-20; use cv for "
                          "leave-one-clip-out sweeps")
    plan = evaluation.random_split(matrix.X.shape[0],
                                   test_fraction=args.test_fraction,
                                   seed=args.seed)
    train_idx, test_idx = list(plan.train_idx), list(plan.test_idx)
    std = features.fit_standardizer(matrix.X[train_idx])
    model = models.train_family(args.model, std.transform(matrix.X[train_idx]),
                                y[train_idx], encoding.n_classes,
                                seed=args.seed)
    artifact = models.ModelArtifact(
        family=args.model, payload=model, label_encoding=encoding,
        standardizer=std,
        mfcc_config=MfccConfig(n_mfcc=matrix.n_mfcc, stats=matrix.stats),
    )
    models.save_model(artifact, args.out)
    pred = artifact.predict(matrix.X[test_idx])
    report = evaluation.evaluate(pred, y[test_idx], encoding)
    base = os.path.splitext(args.out)[0]
    atomic_write_text(base + "_report.txt", report.to_text() + "\n")
    _write_json(base + "_report.json", {
        "run_config": _run_config(args, {
            "command": "train",
            "features_sha256": sha256_file(args.features),
        }),
        "report": report.to_dict(),
    })
    print(f"accuracy {report.accuracy:.4f}  model -> {args.out}")


def cmd_evaluate(args):
    matrix = _load_features(args.features)
    artifact = models.load_model(args.model_file)
    y = artifact.label_encoding.encode(matrix.labels)
    pred = artifact.predict(matrix.X)
    report = evaluation.evaluate(pred, y, artifact.label_encoding)
    if args.out:
        _write_json(args.out, {
            "run_config": _run_config(args, {
                "command": "evaluate",
                "features_sha256": sha256_file(args.features),
            }),
            "report": report.to_dict(),
        })
    print(report.to_text())


def cmd_cv(args):
    manifest = dataset.load_manifest(os.path.join(args.data, "manifest.json"))
    families = _parse_families(args.models)
    sweep = [int(n) for n in args.mfcc_sweep.split(",")] if args.mfcc_sweep \
        else [args.mfcc]
    clip_ids = sorted({c.clip_id for cls in manifest.classes
                       for c in cls.clips})
    plan = evaluation.build_locv_plan(clip_ids)
    os.makedirs(args.out, exist_ok=True)

    stats = _parse_stats(args.stats)
    max_mfcc = max(sweep)
    instances = dataset.load_instances(manifest, args.data)
    full = features.build_feature_matrix(
        instances, MfccConfig(n_mfcc=max_mfcc, stats=stats))

    averages = {}   # (n_mfcc, family) -> average accuracy
    box_rows = []   # (n_mfcc, family, condition, accuracy)
    for n_mfcc in sweep:
        matrix = full.truncate_coeffs(n_mfcc)
        table = evaluation.compare_on_features(
            matrix, families, plan, seed=args.seed,
            train_pool=args.train_pool)
        atomic_write_text(
            os.path.join(args.out, f"comparison_mfcc{n_mfcc}.csv"),
            table.to_csv())
        report_lines = []
        for cell in table.cells:
            if cell.report is not None:
                report_lines.append(
                    f"== {cell.family} / condition {cell.condition_id} "
                    f"(test clip {cell.test_clip_id}) ==\n"
                    + cell.report.to_text())
            else:
                report_lines.append(
                    f"== {cell.family} / condition {cell.condition_id} "
                    f"(test clip {cell.test_clip_id}) ==\nFAILED: "
                    f"{cell.error}")
        atomic_write_text(
            os.path.join(args.out, f"reports_mfcc{n_mfcc}.txt"),
            "\n\n".join(report_lines) + "\n")
        for family in families:
            averages[(n_mfcc, family)] = table.average(family)
        for cell in sorted(table.cells,
                           key=lambda c: (c.family, c.condition_id)):
            if cell.error is None:
                box_rows.append((n_mfcc, cell.family, cell.condition_id,
                                 cell.accuracy))

    box_csv = ["n_mfcc,model,condition,accuracy"]
    box_csv += [f"{n},{fam},{cond},{repr(acc)}"
                for n, fam, cond, acc in box_rows]
    atomic_write_text(os.path.join(args.out, "boxplot_data.csv"),
                      "\n".join(box_csv) + "\n")
    bar_csv = ["n_mfcc,model,average_accuracy"]
    bar_csv += [f"{n},{fam},{repr(avg)}"
                for (n, fam), avg in sorted(averages.items())]
    atomic_write_text(os.path.join(args.out, "bar_data.csv"),
                      "\n".join(bar_csv) + "\n")

    if args.svg:
        for n_mfcc in sweep:
            groups = [(fam, [acc for nn, f, _, acc in box_rows
                             if nn == n_mfcc and f == fam])
                      for fam in families]
            atomic_write_text(
                os.path.join(args.out, f"boxplot_mfcc{n_mfcc}.svg"),
                plots.boxplot_svg(groups,
                                  title=f"LOCV accuracy, {n_mfcc} MFCCs"))
        bars = [(f"{fam}×{n}", avg)
                for (n, fam), avg in sorted(averages.items())
                if avg is not None]
        atomic_write_text(os.path.join(args.out, "bar_averages.svg"),
                          plots.bar_svg(bars))

    _write_json(os.path.join(args.out, "run_config.json"), _run_config(args, {
        "command": "cv",
        "manifest_sha256": sha256_file(
            os.path.join(args.data, "manifest.json")),
        "conditions": [
            {"condition_id": c.condition_id, "test_clip": c.test_clip_id,
             "train_clips": list(c.train_clip_ids)}
            for c in plan.conditions],
    }))
    for (n, fam), avg in sorted(averages.items()):
        label = "failed" if avg is None else f"{avg:.4f}"
        print(f"n_mfcc={n} {fam}: average accuracy {label}")


def cmd_importance(args):
    artifact = models.load_model(args.model_file)
    if artifact.family != "random_forest":
        raise ChitinError("importance requires a random_forest model")
    report = evaluation.feature_importance(artifact.payload)
    cfg = artifact.mfcc_config
    names = None
    if cfg is not None:
        names = [f"mfcc_mean_{i}" for i in range(cfg.n_mfcc)]
        if "std" in cfg.stats:
            names += [f"mfcc_std_{i}" for i in range(cfg.n_mfcc)]
    atomic_write_text(args.out, report.to_csv(names))
    print(f"importance sum {report.importances.sum():.9f} -> {args.out}")


def cmd_embed(args):
    matrix = _load_features(args.features)
    coords = evaluation.embed_2d(matrix.X)
    lines = ["instance_id,clip_id,label,x,y"]
    for i in range(coords.shape[0]):
        lines.append(f"{matrix.instance_ids[i]},{matrix.groups[i]},"
                     f"{matrix.labels[i]},{repr(float(coords[i, 0]))},"
                     f"{repr(float(coords[i, 1]))}")
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(args.out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chitin",
        description="Insect bioacoustic classification pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--sample-rate", type=int, default=44100)
        p.add_argument("--window", type=float, default=1.0)

    p = sub.add_parser("synth", help="generate the synthetic fixture corpus")
    add_common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--clips", type=int, default=5)
    p.add_argument("--duration", type=float, default=5.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("segment", help="cut clips into 1 s instances")
    add_common(p)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("extract", help="extract MFCC features to CSV")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-mfcc", type=int, default=40)
    p.add_argument("--stats", default="mean")
    p.add_argument("--per-class", type=int, default=0,
                   help="sample this many instances per class (0 = all)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("augment", help="add speed/pitch augmented copies")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--speed", default="0.9,1.1")
    p.add_argument("--pitch", default="0.9,1.1")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="train one model on an 80-20 split")
    add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model", required=True, choices=ALL_FAMILIES)
    p.add_argument("--split", default="80-20")
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on features")
    add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--model-file", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="leave-one-clip-out comparison sweep")
    add_common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--models", default="all")
    p.add_argument("--mfcc", type=int, default=40)
    p.add_argument("--mfcc-sweep")
    p.add_argument("--stats", default="mean")
    p.add_argument("--train-pool", default="both",
                   choices=["original", "augmented", "both"])
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("importance", help="forest feature importance CSV")
    add_common(p)
    p.add_argument("--model-file", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("embed", help="2D PCA embedding CSV")
    add_common(p)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ChitinError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
