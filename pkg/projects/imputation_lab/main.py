"""Imputation Lab -- Entry Point.

Command-line interface for amputing datasets, running single imputations,
scoring them against ground truth, and running the full ranking and
ordering studies.

Usage:
    PYTHONPATH=projects uv run python -m imputation_lab rank --config projects/imputation_lab/configs/benchmark.toml
    PYTHONPATH=projects uv run python -m imputation_lab impute --method mean --in holey.csv --out full.csv
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from imputation_lab import __version__
from imputation_lab.data.amputation import ampute_mcar, read_mask_csv, write_mask_csv
from imputation_lab.data.tabular import (
    align_levels,
    apply_minmax,
    encode_target,
    inverse_minmax,
    load_csv,
    minmax_scale,
    write_csv,
)
from imputation_lab.evaluation.metrics import column_errors, imputation_error
from imputation_lab.imputers.registry import impute
from imputation_lab.models.dataset import Dataset
from imputation_lab.models.experiment import ExperimentReport
from imputation_lab.models.params import ALL_METHODS, INTERPOLATION_DEGREE, KnnParams
from imputation_lab.pipeline.experiments import build_report, run_ordering, run_ranking
from imputation_lab.pipeline.hooks import LoggingHooks
from imputation_lab.pipeline.report import (
    emit_report,
    load_records_csv,
    load_report,
    summary_lines,
)
from imputation_lab.simulators.scenario_engine import SCENARIOS, generate_scenario
from imputation_lab.utils.config import (
    ExperimentConfig,
    load_config,
    load_experiment_config,
)
from imputation_lab.utils.errors import (
    ConfigError,
    DataError,
    ExperimentCellError,
    ImputationLabError,
    UsageError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    """Build the command-line parser with all subcommands."""
    common = _Parser(add_help=False)
    common.add_argument("--config", help="experiment TOML file")
    common.add_argument("--seed", type=int, help="seed (replaces the config seed list)")
    common.add_argument("--out", help="output file")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--workers", type=int, help="parallel experiment cells")

    parser = _Parser(prog="imputation_lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ampute = commands.add_parser("ampute", parents=[common], help="blank feature cells at random")
    ampute.add_argument("--in", dest="input", required=True)
    ampute.add_argument("--rate", type=float, required=True)
    ampute.add_argument("--target", help="column never blanked")
    ampute.add_argument("--mask", help="mask CSV path (default <out>_mask.csv)")

    imp = commands.add_parser("impute", parents=[common], help="fill missing cells")
    imp.add_argument("--in", dest="input", required=True)
    imp.add_argument("--method", choices=ALL_METHODS, required=True)
    imp.add_argument("--order", choices=tuple(INTERPOLATION_DEGREE))
    imp.add_argument("--k", type=int)
    imp.add_argument("--distance", choices=("euclidean", "manhattan"))
    imp.add_argument("--weighting", choices=("uniform", "inverse_distance"))
    imp.add_argument("--target", help="column never imputed nor used as predictor")

    ev = commands.add_parser("evaluate", parents=[common], help="score an imputation")
    ev.add_argument("--original", required=True)
    ev.add_argument("--imputed", required=True)
    ev.add_argument("--mask", required=True)
    ev.add_argument("--target")

    commands.add_parser("rank", parents=[common], help="run the imputation-error study")
    commands.add_parser("ordering", parents=[common], help="run the selection-order study")

    rep = commands.add_parser("report", parents=[common], help="re-aggregate saved records")
    rep.add_argument("--in", dest="input", required=True)

    sim = commands.add_parser("simulate", parents=[common], help="write a synthetic dataset")
    sim.add_argument("--scenario", choices=tuple(SCENARIOS), required=True)
    sim.add_argument("--rows", type=int)
    return parser


def _require_out(args: argparse.Namespace) -> Path:
    if not args.out:
        raise UsageError(f"{args.command} needs --out")
    return Path(args.out)


def _with_target(ds: Dataset, target: str | None) -> Dataset:
    if target is None:
        return ds
    encoded, _ = encode_target(ds, target)
    return encoded


def _restore_target(original: Dataset, processed: Dataset, target: str | None) -> Dataset:
    """Put the original target representation back for writing."""
    if target is None:
        return processed
    j = original.index_of(target)
    cells = processed.cells.copy()
    cells[:, j] = original.cells[:, j]
    return Dataset(original.name, original.columns, cells)


def _cmd_ampute(args: argparse.Namespace) -> int:
    out = _require_out(args)
    original = load_csv(args.input)
    ds = _with_target(original, args.target)
    amputed, mask = ampute_mcar(ds, args.rate, args.seed or 0)
    write_csv(_restore_target(original, amputed, args.target), out)
    mask_path = Path(args.mask) if args.mask else out.with_name(f"{out.stem}_mask.csv")
    write_mask_csv(mask, ds, mask_path)
    print(f"Blanked {len(mask)} cells -> {out} (mask: {mask_path})")
    return EXIT_OK


def _cmd_impute(args: argparse.Namespace) -> int:
    out = _require_out(args)
    base = load_experiment_config(args.config) if args.config else ExperimentConfig()
    settings = base.imputation_settings()
    if args.order:
        settings = replace(settings, interpolation_order=args.order)
    knn_overrides = {
        key: value
        for key, value in (
            ("k", args.k),
            ("distance", args.distance),
            ("weighting", args.weighting),
        )
        if value is not None
    }
    if knn_overrides:
        settings = replace(settings, knn=KnnParams(**{**asdict(settings.knn), **knn_overrides}))

    original = load_csv(args.input)
    ds, scaling = minmax_scale(_with_target(original, args.target))
    outcome = impute(ds, settings.spec_for(args.method), settings, seed=args.seed or 0)
    completed = inverse_minmax(outcome.dataset, scaling)
    write_csv(_restore_target(original, completed, args.target), out)
    print(f"Imputed {ds.missing_count()} cells with {args.method} -> {out}")
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    original = _with_target(load_csv(args.original), args.target)
    hints = {c.name: c.kind for c in original.columns if c.kind != "binary_target"}
    imputed = _with_target(load_csv(args.imputed, type_hints=hints), args.target)
    imputed = align_levels(imputed, original)
    scaled, scaling = minmax_scale(original)
    mask = read_mask_csv(args.mask, original)
    imputed_scaled = apply_minmax(imputed, scaling)
    error = imputation_error(scaled, imputed_scaled, mask)
    per_column = column_errors(scaled, imputed_scaled, mask)
    result = {
        **asdict(error),
        "columns": {name: asdict(scores) for name, scores in per_column.items()},
    }
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def _study_config(args: argparse.Namespace) -> ExperimentConfig:
    path = args.config or load_config()["config_path"]
    if not path:
        raise UsageError(f"{args.command} needs --config or IMPUTATION_LAB_CONFIG")
    config = load_experiment_config(path)
    if args.seed is not None:
        config = config.model_copy(update={"seeds": [args.seed]})
    if args.workers is not None:
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        config = config.model_copy(update={"workers": args.workers})
    return config


def _emit(report: ExperimentReport, args: argparse.Namespace, default: str) -> None:
    out = Path(args.out or f"{default}.{args.format}")
    for path in emit_report(report, args.format, out):
        print(f"Wrote {path}")
    for line in summary_lines(report):
        print(line)


def _cmd_study(args: argparse.Namespace) -> int:
    config = _study_config(args)
    data_dir = load_config()["data_dir"]
    run = run_ranking if args.command == "rank" else run_ordering
    report = run(config, data_dir=data_dir, hooks=LoggingHooks())
    _emit(report, args, f"{args.command}_report")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    source = Path(args.input)
    if source.suffix == ".json":
        saved = load_report(source)
        kind, records, config = saved.experiment, saved.records, saved.config
    else:
        records = load_records_csv(source)
        if not records:
            raise DataError(f"{source} holds no records")
        kind, config = records[0].experiment, {}
    _emit(build_report(kind, records, config), args, f"{source.stem}_reaggregated")
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    out = _require_out(args)
    ds = generate_scenario(args.scenario, args.rows, args.seed or 0)
    write_csv(ds, out)
    print(f"Wrote {ds.row_count} rows of {args.scenario} -> {out}")
    return EXIT_OK


COMMANDS = {
    "ampute": _cmd_ampute,
    "impute": _cmd_impute,
    "evaluate": _cmd_evaluate,
    "rank": _cmd_study,
    "ordering": _cmd_study,
    "report": _cmd_report,
    "simulate": _cmd_simulate,
}


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (UsageError, ConfigError)):
        return EXIT_USAGE
    if isinstance(exc, DataError):
        return EXIT_DATA
    if isinstance(exc, ExperimentCellError):
        return _exit_code(exc.cause) if isinstance(exc.cause, ImputationLabError) else EXIT_INTERNAL
    return EXIT_INTERNAL


def main(argv: list[str] | None = None) -> int:
    """Run the CLI.

    Args:
        argv: Arguments without the program name, defaults to sys.argv[1:].

    Returns:
        int: 0 on success, 1 for usage or config errors, 2 for data errors,
            3 for internal errors.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)

    level = args.log_level or load_config()["log_level"]
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except ImputationLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except Exception:
        logger.exception("Unexpected failure in %s", args.command)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
