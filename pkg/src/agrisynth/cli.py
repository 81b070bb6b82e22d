"""Command-line entry point wiring the library into complete workflows.

Subcommands:
  dataset build        assemble a mixed real/semi-artificial dataset
  compose              compose one sample or a whole manifest
  metrics gan          two-sample metrics between two feature/probability files
  metrics gan-baseline real-vs-real reference levels for the six metrics
  metrics seg          segmentation report from gt and prediction mask dirs
  compare              paired per-image comparison of two prediction dirs
  augment              apply a JSON augmentation pipeline to a manifest
  validate             check a dataset manifest

Output is JSON on stdout by default; ``--pretty`` switches to aligned
tables and ``--csv`` (where offered) to CSV.  Exit codes: 0 success,
1 usage error, 2 data/validation error, 3 generator-endpoint failure.
Global flags (given after the subcommand) may also be set in a TOML
file passed with ``--config``; explicit flags override the file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from agrisynth.compose import (
    ComposeError,
    GeneratorEndpoint,
    GeneratorError,
    MixSpec,
    build_dataset,
    compose_scene,
    _stable_seed,
)
from agrisynth.ganmetrics import (
    KIND_PROBABILITIES,
    METRIC_ORDER,
    FeatureSet,
    GanMetricsError,
    ProbabilityMatrix,
    fid,
    inception_score,
    kernel_mmd,
    load_matrix,
    mode_score,
    one_nn_accuracy,
    reference_baseline,
    wasserstein,
)
from agrisynth.imagery import (
    DatasetManifest,
    ImageryError,
    load_mask,
    load_sample,
    sample_entry,
    validate_manifest,
)
from agrisynth.maskops import AugmentationSpec, MaskOpsError, augment
from agrisynth.segeval import (
    COMPARE_METRICS,
    ConfusionMatrix,
    SegEvalError,
    accumulate,
    format_percent,
    paired_compare,
    report_table,
    score_pair,
    segmentation_metrics,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_GENERATOR = 3

_DEFAULTS = {
    "seed": 42,
    "jobs": 1,
    "strict": False,
    "margin": 5,
    "endpoint": "mock",
    "crop_size": 512,
    "weed_size": 128,
    "classes": "crop,weed",
    "repeats": 20,
    "split": 0.5,
    "metric": "all",
}

_FEATURE_METRICS = ("emd", "fid", "knn", "mmd")
_PROB_METRICS = ("inception", "mode")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="global random seed (default 42)")
    common.add_argument("--jobs", type=int, default=None,
                        help="worker count for per-sample work (default 1)")
    common.add_argument("--strict", action=argparse.BooleanOptionalAction,
                        default=None,
                        help="abort on per-instance generator failures "
                             "instead of skip-and-log")
    common.add_argument("--config", type=Path, default=None,
                        help="TOML file with default flag values")
    common.add_argument("--pretty", action="store_true",
                        help="aligned human-readable output instead of JSON")
    return common


def build_parser() -> _Parser:
    parser = _Parser(prog="agrisynth",
                     description="semi-artificial crop/weed dataset toolkit")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_dataset = sub.add_parser("dataset", help="dataset assembly")
    dsub = p_dataset.add_subparsers(dest="subcommand", required=True,
                                    parser_class=_Parser)
    p_build = dsub.add_parser("build", parents=[common],
                              help="build a mixed dataset from a source manifest")
    p_build.add_argument("--source", required=True, type=Path,
                         help="source manifest JSON")
    p_build.add_argument("--original", required=True, type=int,
                         help="number of entries copied through as real")
    p_build.add_argument("--synthetic", required=True, type=int,
                         help="number of entries composed with the generator")
    p_build.add_argument("--classes", default=None,
                         help="comma list of classes to replace (default crop,weed)")
    p_build.add_argument("--out", required=True, type=Path, help="output directory")
    _endpoint_flags(p_build)
    p_build.add_argument("--margin", type=int, default=None,
                         help="border band width for eligibility (default 5)")
    p_build.set_defaults(handler=_cmd_dataset_build)

    p_compose = sub.add_parser("compose", parents=[common],
                               help="compose one sample or every manifest entry")
    p_compose.add_argument("--rgb", type=Path, help="single-sample RGB PNG")
    p_compose.add_argument("--nir", type=Path, help="single-sample NIR PNG")
    p_compose.add_argument("--mask", type=Path, help="single-sample mask PNG")
    p_compose.add_argument("--manifest", type=Path,
                           help="compose every entry of this manifest instead")
    p_compose.add_argument("--classes", default=None,
                           help="comma list of classes to replace (default crop,weed)")
    p_compose.add_argument("--out", required=True, type=Path,
                           help="output directory")
    _endpoint_flags(p_compose)
    p_compose.add_argument("--margin", type=int, default=None,
                           help="border band width for eligibility (default 5)")
    p_compose.set_defaults(handler=_cmd_compose)

    p_metrics = sub.add_parser("metrics", help="evaluation metrics")
    msub = p_metrics.add_subparsers(dest="subcommand", required=True,
                                    parser_class=_Parser)
    p_gan = msub.add_parser("gan", parents=[common],
                            help="two-sample metrics between two AGF1/CSV files")
    p_gan.add_argument("--real", required=True, type=Path,
                       help="real-set AGF1 or CSV file")
    p_gan.add_argument("--fake", required=True, type=Path,
                       help="generated-set AGF1 or CSV file")
    p_gan.add_argument("--metric", default=None,
                       help="comma list from emd,fid,inception,knn,mmd,mode, or "
                            "'all' (all metrics the file kind supports; CSV "
                            "inputs default to the feature metrics)")
    p_gan.add_argument("--csv", action="store_true", help="CSV output")
    p_gan.set_defaults(handler=_cmd_metrics_gan)

    p_base = msub.add_parser("gan-baseline", parents=[common],
                             help="real-vs-real reference levels (mean over repeats)")
    p_base.add_argument("--features", required=True, type=Path,
                        help="real-set feature file (AGF1 or CSV)")
    p_base.add_argument("--probs", required=True, type=Path,
                        help="real-set probability file (AGF1 or CSV)")
    p_base.add_argument("--repeats", type=int, default=None,
                        help="number of random splits to average (default 20)")
    p_base.add_argument("--split", type=float, default=None,
                        help="fraction of rows per side (default 0.5)")
    p_base.add_argument("--csv", action="store_true", help="CSV output")
    p_base.set_defaults(handler=_cmd_metrics_gan_baseline)

    p_seg = msub.add_parser("seg", parents=[common],
                            help="segmentation report from mask directories")
    p_seg.add_argument("--gt", required=True, type=Path,
                       help="directory of ground-truth mask PNGs")
    p_seg.add_argument("--pred", required=True, type=Path,
                       help="directory of prediction mask PNGs (same names)")
    p_seg.add_argument("--label", default=None, help="row label for the report")
    p_seg.add_argument("--csv", action="store_true", help="CSV output")
    p_seg.set_defaults(handler=_cmd_metrics_seg)

    p_cmp = sub.add_parser("compare", parents=[common],
                           help="paired per-image comparison of two models")
    p_cmp.add_argument("--gt", type=Path,
                       help="directory of ground-truth mask PNGs")
    p_cmp.add_argument("--pred-a", type=Path,
                       help="candidate model's prediction masks")
    p_cmp.add_argument("--pred-b", type=Path,
                       help="baseline model's prediction masks")
    p_cmp.add_argument("--scores-a", type=Path, dest="scores_a",
                       help="stored per-image scores (JSON) for model A")
    p_cmp.add_argument("--scores-b", type=Path, dest="scores_b",
                       help="stored per-image scores (JSON) for model B")
    p_cmp.add_argument("--metric", default=None,
                       help="comma list from accuracy,dice,iou or 'all'")
    p_cmp.set_defaults(handler=_cmd_compare)

    p_aug = sub.add_parser("augment", parents=[common],
                           help="apply a JSON augmentation pipeline to a manifest")
    p_aug.add_argument("--manifest", required=True, type=Path,
                       help="source manifest JSON")
    p_aug.add_argument("--spec", required=True, type=Path,
                       help="JSON file: one augmentation object or a list")
    p_aug.add_argument("--out", required=True, type=Path, help="output directory")
    p_aug.set_defaults(handler=_cmd_augment)

    p_val = sub.add_parser("validate", parents=[common],
                           help="check a dataset manifest")
    p_val.add_argument("--manifest", required=True, type=Path,
                       help="manifest JSON to check")
    p_val.set_defaults(handler=_cmd_validate)

    return parser


def _endpoint_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--endpoint", default=None,
                   help="mock | directory:<path> | subprocess:<command> "
                        "(default mock)")
    p.add_argument("--crop-size", type=int, default=None, dest="crop_size",
                   help="generator input size for crop (default 512)")
    p.add_argument("--weed-size", type=int, default=None, dest="weed_size",
                   help="generator input size for weed (default 128)")


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        with open(args.config, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ImageryError(f"cannot read config {args.config}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ImageryError(f"malformed config {args.config}: {exc}") from exc


def _opt(args, config, key):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return _DEFAULTS[key]


def _parse_endpoint(text: str, crop_size: int, weed_size: int) -> GeneratorEndpoint:
    sizes = {"crop": crop_size, "weed": weed_size}
    if text == "mock":
        return GeneratorEndpoint(kind="mock", patch_sizes=sizes)
    for kind in ("directory", "subprocess"):
        if text.startswith(kind + ":"):
            return GeneratorEndpoint(kind=kind, location=text[len(kind) + 1:],
                                     patch_sizes=sizes)
    raise ComposeError(
        f"endpoint must be 'mock', 'directory:<path>' or 'subprocess:<command>', "
        f"got {text!r}")


def _endpoint_from(args, config) -> GeneratorEndpoint:
    return _parse_endpoint(_opt(args, config, "endpoint"),
                           _opt(args, config, "crop_size"),
                           _opt(args, config, "weed_size"))


def _parse_classes(text: str) -> tuple[str, ...]:
    classes = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = set(classes) - {"crop", "weed"}
    if bad or not classes:
        raise ComposeError(f"classes must be a subset of crop,weed, got {text!r}")
    return classes


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _cmd_validate(args, config) -> int:
    manifest = DatasetManifest.load(args.manifest)
    problems = validate_manifest(manifest)
    if args.pretty:
        print(f"manifest {manifest.name}: {len(manifest.entries)} entries")
        for line in problems:
            print(f"  problem: {line}")
        print("valid" if not problems else f"{len(problems)} problem(s)")
    else:
        _emit({"name": manifest.name, "entries": len(manifest.entries),
               "valid": not problems, "problems": problems})
    return EXIT_OK if not problems else EXIT_DATA


def _metric_list(text: str, universe: tuple[str, ...],
                 default_all: tuple[str, ...]) -> tuple[str, ...]:
    if text == "all":
        return default_all
    chosen = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = set(chosen) - set(universe)
    if bad or not chosen:
        raise GanMetricsError(
            f"metric must be 'all' or a comma list from {','.join(universe)}, "
            f"got {text!r}")
    return chosen


def _cmd_metrics_gan(args, config) -> int:
    real_data, real_kind = load_matrix(args.real)
    fake_data, fake_kind = load_matrix(args.fake)
    probs_input = (real_kind == KIND_PROBABILITIES
                   or fake_kind == KIND_PROBABILITIES)
    default_all = _PROB_METRICS if probs_input else _FEATURE_METRICS
    chosen = _metric_list(_opt(args, config, "metric"), METRIC_ORDER, default_all)

    results: dict[str, float] = {}
    need_feats = [m for m in chosen if m in _FEATURE_METRICS]
    need_probs = [m for m in chosen if m in _PROB_METRICS]
    if need_feats:
        if probs_input:
            raise GanMetricsError(
                f"metrics {need_feats} need feature files, but an input is "
                "a probability file")
        real_f, fake_f = FeatureSet(real_data), FeatureSet(fake_data)
        compute = {"emd": wasserstein, "fid": fid, "knn": one_nn_accuracy,
                   "mmd": kernel_mmd}
        for m in need_feats:
            results[m] = compute[m](real_f, fake_f)
    if need_probs:
        real_p, fake_p = ProbabilityMatrix(real_data), ProbabilityMatrix(fake_data)
        if "inception" in need_probs:
            results["inception"] = inception_score(fake_p)
        if "mode" in need_probs:
            results["mode"] = mode_score(fake_p, real_p)

    ordered = {m: results[m] for m in METRIC_ORDER if m in results}
    if args.csv:
        print(",".join(ordered))
        print(",".join(f"{v:.10g}" for v in ordered.values()))
    elif args.pretty:
        for m, v in ordered.items():
            print(f"{m:<9} {v:.6f}")
    elif len(ordered) == 1:
        _emit(next(iter(ordered.values())))
    else:
        _emit(ordered)
    return EXIT_OK


def _load_feature_file(path: Path) -> FeatureSet:
    data, kind = load_matrix(path)
    if kind == KIND_PROBABILITIES:
        raise GanMetricsError(f"{path}: expected features, file holds probabilities")
    return FeatureSet(data)


def _load_prob_file(path: Path) -> ProbabilityMatrix:
    data, _ = load_matrix(path)
    return ProbabilityMatrix(data)


def _cmd_metrics_gan_baseline(args, config) -> int:
    feats = _load_feature_file(args.features)
    probs = _load_prob_file(args.probs)
    vector = reference_baseline(feats, probs,
                                repeats=_opt(args, config, "repeats"),
                                split=_opt(args, config, "split"),
                                seed=_opt(args, config, "seed"))
    values = vector.to_dict()
    if args.csv:
        print(",".join(METRIC_ORDER))
        print(",".join(f"{values[m]:.10g}" for m in METRIC_ORDER))
    elif args.pretty:
        for m in METRIC_ORDER:
            print(f"{m:<9} {values[m]:.6f}")
    else:
        _emit(values)
    return EXIT_OK


def _mask_pairs(gt_dir: Path, pred_dir: Path) -> list[tuple[Path, Path]]:
    if not gt_dir.is_dir():
        raise SegEvalError(f"not a directory: {gt_dir}")
    if not pred_dir.is_dir():
        raise SegEvalError(f"not a directory: {pred_dir}")
    gt_files = sorted(gt_dir.glob("*.png"))
    if not gt_files:
        raise SegEvalError(f"no mask PNGs in {gt_dir}")
    pairs = []
    for gt_path in gt_files:
        pred_path = pred_dir / gt_path.name
        if not pred_path.is_file():
            raise SegEvalError(f"missing prediction for {gt_path.name} in {pred_dir}")
        pairs.append((gt_path, pred_path))
    return pairs


def _cmd_metrics_seg(args, config) -> int:
    pairs = _mask_pairs(args.gt, args.pred)
    cm = ConfusionMatrix.empty()
    for gt_path, pred_path in pairs:
        cm = accumulate(load_mask(gt_path), load_mask(pred_path), cm)
    report = segmentation_metrics(cm)
    label = args.label or args.pred.name
    if args.csv:
        print(report_table([(label, report)], fmt="csv"), end="")
    elif args.pretty:
        print(report_table([(label, report)], fmt="text"), end="")
    else:
        _emit({"label": label, "images": len(pairs), **report.to_dict()})
    return EXIT_OK


def _load_scores(path: Path) -> dict[str, list[float]]:
    """Read stored per-image scores: either {metric: [values]} or a list
    of per-image records {metric: value, ...} (an "id" key is ignored)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SegEvalError(f"cannot read scores {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SegEvalError(f"malformed scores {path}: {exc}") from exc
    if isinstance(raw, list):
        table: dict[str, list[float]] = {}
        for i, rec in enumerate(raw):
            if not isinstance(rec, dict):
                raise SegEvalError(f"scores {path}: entry {i} is not an object")
            for key, val in rec.items():
                if key != "id":
                    table.setdefault(key, []).append(float(val))
        if len({len(v) for v in table.values()}) > 1:
            raise SegEvalError(f"scores {path}: records disagree on metrics")
        return table
    if isinstance(raw, dict):
        return {k: [float(x) for x in v] for k, v in raw.items()}
    raise SegEvalError(f"scores {path}: expected an object or a list")


def _cmd_compare(args, config) -> int:
    requested = _opt(args, config, "metric")
    from_scores = args.scores_a is not None or args.scores_b is not None
    from_masks = any(p is not None
                     for p in (args.gt, args.pred_a, args.pred_b))
    if from_scores and from_masks:
        raise SegEvalError(
            "--scores-a/--scores-b and --gt/--pred-a/--pred-b are exclusive")
    out = {}
    if from_scores:
        if args.scores_a is None or args.scores_b is None:
            raise SegEvalError("compare needs both --scores-a and --scores-b")
        table_a = _load_scores(args.scores_a)
        table_b = _load_scores(args.scores_b)
        if requested == "all":
            metrics = tuple(m for m in COMPARE_METRICS
                            if m in table_a and m in table_b)
            if not metrics:
                raise SegEvalError("stored scores share no comparable metrics")
        else:
            metrics = _metric_list(requested, COMPARE_METRICS, COMPARE_METRICS)
        for metric in metrics:
            if metric not in table_a or metric not in table_b:
                raise SegEvalError(
                    f"metric {metric!r} missing from stored scores")
            out[metric] = paired_compare(table_a[metric], table_b[metric],
                                         metric)
    else:
        if args.gt is None or args.pred_a is None or args.pred_b is None:
            raise SegEvalError(
                "compare needs --gt/--pred-a/--pred-b or --scores-a/--scores-b")
        metrics = _metric_list(requested, COMPARE_METRICS, COMPARE_METRICS)
        pairs_a = _mask_pairs(args.gt, args.pred_a)
        pairs_b = _mask_pairs(args.gt, args.pred_b)
        gt_masks = [load_mask(g) for g, _ in pairs_a]
        a_masks = [load_mask(p) for _, p in pairs_a]
        b_masks = [load_mask(p) for _, p in pairs_b]
        for metric in metrics:
            scores_a = [score_pair(g, p, metric)
                        for g, p in zip(gt_masks, a_masks)]
            scores_b = [score_pair(g, p, metric)
                        for g, p in zip(gt_masks, b_masks)]
            out[metric] = paired_compare(scores_a, scores_b, metric)
    if args.pretty:
        for metric, comp in out.items():
            print(f"{metric:<9} {comp.wins_a} / {comp.wins_b} "
                  f"({format_percent(comp.win_rate_a)})")
    else:
        _emit({m: c.to_dict() for m, c in out.items()})
    return EXIT_OK


def _cmd_compose(args, config) -> int:
    endpoint = _endpoint_from(args, config)
    classes = _parse_classes(_opt(args, config, "classes"))
    margin = _opt(args, config, "margin")
    seed = _opt(args, config, "seed")
    strict = _opt(args, config, "strict")
    single = (args.rgb, args.nir, args.mask)
    if args.manifest is None and any(p is None for p in single):
        raise ComposeError(
            "compose needs either --manifest or all of --rgb/--nir/--mask")
    if args.manifest is not None and any(p is not None for p in single):
        raise ComposeError("--manifest and --rgb/--nir/--mask are exclusive")
    out_dir = Path(args.out)
    if args.manifest is None:
        sample = load_sample(args.rgb, args.nir, args.mask)
        composed = compose_scene(sample, endpoint, classes=classes,
                                 margin=margin, seed=seed, strict=strict)
        entry = sample_entry(composed, out_dir)
        _emit({"id": entry.id, "rgb": entry.rgb, "nir": entry.nir,
               "mask": entry.mask, "provenance": entry.provenance})
        return EXIT_OK
    source = DatasetManifest.load(args.manifest)
    spec = MixSpec(original_count=0, synthetic_count=len(source.entries),
                   synthetic_classes=classes, seed=seed)
    manifest = build_dataset(source, spec, endpoint, out_dir, margin=margin,
                             jobs=_opt(args, config, "jobs"), strict=strict,
                             name=f"{source.name}-composed")
    _emit({"manifest": str(out_dir / "manifest.json"),
           "entries": len(manifest.entries)})
    return EXIT_OK


def _cmd_dataset_build(args, config) -> int:
    endpoint = _endpoint_from(args, config)
    source = DatasetManifest.load(args.source)
    spec = MixSpec(original_count=args.original, synthetic_count=args.synthetic,
                   synthetic_classes=_parse_classes(_opt(args, config, "classes")),
                   seed=_opt(args, config, "seed"))
    out_dir = Path(args.out)
    manifest = build_dataset(source, spec, endpoint, out_dir,
                             margin=_opt(args, config, "margin"),
                             jobs=_opt(args, config, "jobs"),
                             strict=_opt(args, config, "strict"))
    by_prov = {"real": 0, "semi-artificial": 0}
    for entry in manifest.entries:
        by_prov[entry.provenance] += 1
    result = {"manifest": str(out_dir / "manifest.json"),
              "entries": len(manifest.entries),
              "real": by_prov["real"],
              "semi_artificial": by_prov["semi-artificial"]}
    if args.pretty:
        for k, v in result.items():
            print(f"{k:<16} {v}")
    else:
        _emit(result)
    return EXIT_OK


def _cmd_augment(args, config) -> int:
    source = DatasetManifest.load(args.manifest)
    try:
        raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MaskOpsError(f"cannot read augmentation spec {args.spec}: {exc}") from exc
    steps_raw = raw if isinstance(raw, list) else [raw]
    seed = _opt(args, config, "seed")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for entry in source.entries:
        sample = load_sample(source.resolve(entry.rgb), source.resolve(entry.nir),
                             source.resolve(entry.mask), sample_id=entry.id,
                             provenance=entry.provenance)
        for idx, step in enumerate(steps_raw):
            if not isinstance(step, dict):
                raise MaskOpsError("augmentation spec entries must be JSON objects")
            step = dict(step)
            if "seed" not in step:
                # Stochastic steps get a per-sample seed unless pinned.
                step["seed"] = _stable_seed(seed, entry.id, idx)
            try:
                spec = AugmentationSpec(**step)
            except TypeError as exc:
                raise MaskOpsError(f"bad augmentation step: {exc}") from exc
            sample = augment(sample, spec)
        entries.append(sample_entry(sample, out_dir, relative_to=out_dir))
    entries.sort(key=lambda e: e.id)
    manifest = DatasetManifest(name=f"{source.name}-augmented", entries=entries,
                               root=out_dir)
    manifest.save(out_dir / "manifest.json")
    _emit({"manifest": str(out_dir / "manifest.json"), "entries": len(entries),
           "steps": len(steps_raw)})
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load_config(args)
        return args.handler(args, config)
    except GeneratorError as exc:
        print(f"agrisynth: generator error: {exc}", file=sys.stderr)
        return EXIT_GENERATOR
    except (ImageryError, MaskOpsError, GanMetricsError, SegEvalError,
            ComposeError) as exc:
        print(f"agrisynth: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"agrisynth: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
