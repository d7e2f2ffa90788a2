"""Command-line surface composing the adaptation pipeline.

Subcommands:

* ``evolve``  order source categories against a target, write the trace
* ``sweep``   per-K projection error and (with labeled targets) accuracy
* ``adapt``   full pipeline: evolve, pick K, train, predict the target
* ``multi``   the same over several pooled source domains
* ``synth``   generate a clustered source/target pair from a config file

Inputs are CSV or the SADS binary container (detected by magic bytes).
Artifacts land in the --out directory: ``trace.csv``, ``sweep.csv``,
``predictions.csv`` and ``summary.json``. Exit codes: 0 on success, 1 for
pipeline failures, 2 for usage and input-file problems.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifier import ClassifierConfig, evaluate, predict, train
from .dataio import (
    Dataset,
    generate_synthetic,
    load_csv,
    load_matrix_bin,
    read_synthetic_config,
    relabel_to_reference,
    save_csv,
)
from .evolution import (
    EvolutionTrace,
    StopRule,
    evolve,
    select_k,
    selected_categories,
    write_trace_csv,
)
from .exceptions import CatalignError, DataFormatError, DimensionError
from .multisource import (
    enforce_cover,
    evolve_multi,
    pool_sources,
    unpool,
    write_pooled_trace_csv,
)
from .scoring import ErrorKind


class UsageError(Exception):
    """Bad invocation or unreadable input; mapped to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs beyond its input paths."""

    d: int | None
    error_kind: ErrorKind
    stop_rule: StopRule
    classifier: ClassifierConfig
    seed: int
    out_dir: Path
    threads: int
    k_override: int | None = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        seed = getattr(args, "seed", 42)
        if seed is None:
            seed = 42
        return cls(
            d=getattr(args, "dim", None),
            error_kind=ErrorKind(getattr(args, "error", "reproj")),
            stop_rule=StopRule(getattr(args, "stop", "global")),
            classifier=ClassifierConfig(seed=seed),
            seed=seed,
            out_dir=Path(getattr(args, "out", ".")),
            threads=getattr(args, "threads", 1),
            k_override=getattr(args, "k_override", None),
        )


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _load_dataset(path_str: str) -> Dataset:
    path = Path(path_str)
    if not path.is_file():
        raise UsageError(f"input file not found: {path}")
    try:
        with path.open("rb") as fh:
            head = fh.read(4)
        if head == b"SADS":
            return load_matrix_bin(path)
        return load_csv(path)
    except DataFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _resolve_dim(config: RunConfig, target: Dataset) -> int:
    if config.d is not None:
        return config.d
    d = min(80, target.n_samples - 1, target.dim)
    if d < 1:
        raise DimensionError(
            f"cannot pick a default dimension for a {target.n_samples}-row "
            "target; pass --dim explicitly"
        )
    return d


def _ensure_out(config: RunConfig) -> Path:
    config.out_dir.mkdir(parents=True, exist_ok=True)
    return config.out_dir


def _write_summary(out_dir: Path, payload: dict) -> Path:
    path = out_dir / "summary.json"
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _base_summary(command: str, trace: EvolutionTrace, config: RunConfig, d: int) -> dict:
    return {
        "command": command,
        "d": d,
        "error_kind": trace.error_kind.value,
        "seed": config.seed,
        "ordering": list(trace.ordering),
        "errors": list(trace.errors),
        "k_global": select_k(trace, StopRule.GLOBAL_MIN),
        "k_local": select_k(trace, StopRule.FIRST_LOCAL_MIN),
    }


def _write_predictions(
    out_dir: Path, predicted: np.ndarray, names: dict
) -> Path:
    path = out_dir / "predictions.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "category_id", "category_name"])
        for row, ident in enumerate(predicted):
            writer.writerow([row, int(ident), names.get(int(ident), str(int(ident)))])
    return path


def _pick_k(trace: EvolutionTrace, config: RunConfig) -> int:
    if config.k_override is not None:
        if not 1 <= config.k_override <= trace.num_categories:
            raise UsageError(
                f"--k-override {config.k_override} out of range "
                f"1..{trace.num_categories}"
            )
        return config.k_override
    return select_k(trace, config.stop_rule)


def cmd_evolve(source_path: str, target_path: str, config: RunConfig) -> int:
    source = _load_dataset(source_path)
    target = _load_dataset(target_path)
    d = _resolve_dim(config, target)
    trace = evolve(source, target, config.error_kind, d, threads=config.threads)
    out = _ensure_out(config)
    trace_path = out / "trace.csv"
    write_trace_csv(trace, source.category_names, trace_path)
    summary = _base_summary("evolve", trace, config, d)
    summary_path = _write_summary(out, summary)
    print(f"wrote {trace_path}")
    print(f"wrote {summary_path}")
    print(f"K(global)={summary['k_global']} K(local)={summary['k_local']}")
    return 0


def cmd_sweep(
    source_path: str, target_path: str, config: RunConfig, k_max: int | None = None
) -> int:
    source = _load_dataset(source_path)
    target = _load_dataset(target_path)
    d = _resolve_dim(config, target)
    trace = evolve(source, target, config.error_kind, d, threads=config.threads)
    limit = trace.num_categories if k_max is None else k_max
    if not 1 <= limit <= trace.num_categories:
        raise UsageError(f"--k-max {k_max} out of range 1..{trace.num_categories}")
    truth = relabel_to_reference(target, source) if target.labels is not None else None

    accuracies: list[float | None] = []
    for k in range(1, limit + 1):
        if truth is None:
            accuracies.append(None)
            continue
        model = train(
            source, selected_categories(trace, k), target, d, config.classifier
        )
        predicted = predict(model, target)
        accuracies.append(evaluate(predicted, truth))

    out = _ensure_out(config)
    sweep_path = out / "sweep.csv"
    with sweep_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "category_id", "category_name", "error", "accuracy"])
        for k in range(1, limit + 1):
            ident = trace.ordering[k - 1]
            acc = accuracies[k - 1]
            writer.writerow(
                [
                    k,
                    ident,
                    source.category_names.get(ident, str(ident)),
                    repr(trace.errors[k - 1]),
                    "" if acc is None else repr(acc),
                ]
            )
    summary = _base_summary("sweep", trace, config, d)
    summary["k_max"] = limit
    if truth is not None:
        best = max(range(limit), key=lambda i: (accuracies[i], -i))
        summary["k_best_accuracy"] = best + 1
        summary["accuracies"] = accuracies
    else:
        summary["k_best_accuracy"] = None
    summary_path = _write_summary(out, summary)
    print(f"wrote {sweep_path}")
    print(f"wrote {summary_path}")
    return 0


def cmd_adapt(source_path: str, target_path: str, config: RunConfig) -> int:
    source = _load_dataset(source_path)
    target = _load_dataset(target_path)
    d = _resolve_dim(config, target)
    trace = evolve(source, target, config.error_kind, d, threads=config.threads)
    k = _pick_k(trace, config)
    selected = selected_categories(trace, k)
    model = train(source, selected, target, d, config.classifier)
    predicted = predict(model, target)

    out = _ensure_out(config)
    trace_path = out / "trace.csv"
    write_trace_csv(trace, source.category_names, trace_path)
    pred_path = _write_predictions(out, predicted, dict(source.category_names))
    summary = _base_summary("adapt", trace, config, d)
    summary["stop_rule"] = config.stop_rule.value
    summary["k_used"] = k
    summary["selected"] = list(selected)
    accuracy = None
    if target.labels is not None:
        truth = relabel_to_reference(target, source)
        accuracy = evaluate(predicted, truth)
    summary["accuracy"] = accuracy
    summary_path = _write_summary(out, summary)
    print(f"wrote {pred_path}")
    print(f"wrote {summary_path}")
    print(f"K={k} selected={list(selected)}")
    if accuracy is not None:
        print(f"accuracy={accuracy!r}")
    return 0


def cmd_multi(
    source_paths: list[str],
    target_path: str,
    config: RunConfig,
    cover: bool = False,
    cover_labels_path: str | None = None,
) -> int:
    sources = [_load_dataset(p) for p in source_paths]
    target = _load_dataset(target_path)
    d = _resolve_dim(config, target)
    pool = pool_sources(sources)
    trace = evolve_multi(pool, target, config.error_kind, d, threads=config.threads)
    k = _pick_k(trace, config)
    if cover_labels_path is not None:
        path = Path(cover_labels_path)
        if not path.is_file():
            raise UsageError(f"input file not found: {path}")
        names = [
            line.strip()
            for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        selected = enforce_cover(pool, trace, k, names)
    elif cover:
        selected = enforce_cover(pool, trace, k)
    else:
        selected = selected_categories(trace, k)
    model = train(pool.dataset, selected, target, d, config.classifier)
    predicted = predict(model, target)

    out = _ensure_out(config)
    trace_path = out / "trace.csv"
    write_pooled_trace_csv(pool, trace, trace_path)
    pred_path = _write_predictions(out, predicted, dict(pool.dataset.category_names))
    summary = _base_summary("multi", trace, config, d)
    summary["stop_rule"] = config.stop_rule.value
    summary["k_used"] = k
    summary["selected"] = list(selected)
    summary["cover"] = bool(cover or cover_labels_path is not None)
    composition = {name: 0 for name in pool.domain_names}
    for domain_index, _ in unpool(pool, selected):
        composition[pool.domain_names[domain_index]] += 1
    summary["composition"] = composition
    accuracy = None
    if target.labels is not None:
        predicted_names = [pool.base_names[int(p)] for p in predicted]
        true_names = [
            target.category_names.get(int(v), str(int(v))) for v in target.labels
        ]
        matches = [p == t for p, t in zip(predicted_names, true_names)]
        accuracy = float(np.mean(matches)) if matches else None
    summary["accuracy"] = accuracy
    summary_path = _write_summary(out, summary)
    print(f"wrote {pred_path}")
    print(f"wrote {summary_path}")
    print(f"K={k} selected={list(selected)}")
    print(f"composition={json.dumps(composition, sort_keys=True)}")
    if accuracy is not None:
        print(f"accuracy={accuracy!r}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    try:
        spec = read_synthetic_config(args.config)
    except DataFormatError as exc:
        raise UsageError(str(exc)) from exc
    except OSError as exc:
        raise UsageError(f"{args.config}: {exc}") from exc
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    count = args.target_categories
    if count is None:
        count = spec.num_categories
    if not 1 <= count <= spec.num_categories:
        raise UsageError(
            f"--target-categories {count} out of range 1..{spec.num_categories}"
        )
    source, make_target = generate_synthetic(spec)
    target = make_target(
        range(count), args.target_samples, shift=args.target_shift
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    source_path = out / "source.csv"
    target_path = out / "target.csv"
    save_csv(source, source_path)
    save_csv(target, target_path)
    print(f"wrote {source_path}")
    print(f"wrote {target_path}")
    return 0


def _add_common(parser: argparse.ArgumentParser, *, selection: bool = False) -> None:
    parser.add_argument("--dim", type=_positive_int, default=None,
                        help="subspace dimension (default: min(80, target rows - 1, features))")
    parser.add_argument("--error", choices=["reproj", "sa"], default="reproj",
                        help="projection error kind (default: reproj)")
    parser.add_argument("--seed", type=int, default=42,
                        help="random seed for classifier training (default: 42)")
    parser.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads for candidate scoring (default: 1)")
    parser.add_argument("--out", default=".",
                        help="output directory for artifacts (default: .)")
    if selection:
        parser.add_argument("--stop", choices=["global", "local"], default="global",
                            help="stopping rule for K (default: global)")
        parser.add_argument("--k-override", dest="k_override", type=_positive_int,
                            default=None, help="bypass the stopping rule with a fixed K")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catalign",
        description="Subspace alignment with greedy source-category selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_evolve = sub.add_parser("evolve", help="order source categories by projection error")
    p_evolve.add_argument("source")
    p_evolve.add_argument("target")
    _add_common(p_evolve)

    p_sweep = sub.add_parser("sweep", help="per-K error and accuracy table")
    p_sweep.add_argument("source")
    p_sweep.add_argument("target")
    p_sweep.add_argument("--k-max", dest="k_max", type=_positive_int, default=None,
                         help="largest prefix length to evaluate (default: all)")
    _add_common(p_sweep)

    p_adapt = sub.add_parser("adapt", help="evolve, select K, train and predict")
    p_adapt.add_argument("source")
    p_adapt.add_argument("target")
    _add_common(p_adapt, selection=True)

    p_multi = sub.add_parser("multi", help="adapt from several pooled source domains")
    p_multi.add_argument("sources", nargs="+", metavar="source")
    p_multi.add_argument("target")
    p_multi.add_argument("--cover", action="store_true",
                         help="guarantee every pooled category name is selected")
    p_multi.add_argument("--cover-labels", dest="cover_labels", default=None,
                         help="file of category names (one per line) that must be selected")
    _add_common(p_multi, selection=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic source/target CSV pair")
    p_synth.add_argument("config")
    p_synth.add_argument("--target-categories", dest="target_categories",
                         type=_positive_int, default=None,
                         help="how many category ids the target keeps (default: all)")
    p_synth.add_argument("--target-samples", dest="target_samples",
                         type=_positive_int, default=None,
                         help="target rows per category (default: same as source)")
    p_synth.add_argument("--target-shift", dest="target_shift", type=float, default=0.0,
                         help="norm of a random global offset applied to the target")
    p_synth.add_argument("--seed", type=int, default=None,
                         help="override the config file seed")
    p_synth.add_argument("--out", default=".",
                         help="output directory (default: .)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "evolve":
            return cmd_evolve(args.source, args.target, RunConfig.from_args(args))
        if args.command == "sweep":
            return cmd_sweep(
                args.source, args.target, RunConfig.from_args(args), args.k_max
            )
        if args.command == "adapt":
            return cmd_adapt(args.source, args.target, RunConfig.from_args(args))
        if args.command == "multi":
            return cmd_multi(
                args.sources,
                args.target,
                RunConfig.from_args(args),
                cover=args.cover,
                cover_labels_path=args.cover_labels,
            )
        if args.command == "synth":
            return cmd_synth(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CatalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
