"""Command-line interface: predict, simulate, regress, validate, export, stats."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import __version__
from .analysis import (
    DEFAULT_EXCLUSION_THRESHOLD,
    EvaluationGrid,
    IccVariant,
    analyze_catalog,
    analyze_model,
    band_at,
    group_statistics,
)
from .catalog import Group, load_catalog
from .core import FatigueParams, endurance_time, met_extended, parse_profile, simulate_capacity
from .errors import CatalogError, MetFatigueError
from .report import (
    FigureKind,
    Table,
    Tolerances,
    build_validation_report,
    export_figure_data,
    load_golden,
    write_report,
)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

CATALOG_ENV = "METFATIGUE_CATALOG"

_UNSET = object()


@dataclass
class CliConfig:
    catalog_path: Optional[str] = None
    golden_path: Optional[str] = None
    grid: EvaluationGrid = field(default_factory=EvaluationGrid)
    icc_variant: IccVariant = IccVariant.ONE_WAY
    tolerances: Tolerances = field(default_factory=Tolerances)
    exclusion_threshold: Optional[float] = DEFAULT_EXCLUSION_THRESHOLD
    output_dir: str = "."
    output_format: str = "delimited"

    @classmethod
    def from_file(cls, path) -> "CliConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise MetFatigueError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise MetFatigueError(f"config file is not valid JSON: {exc}") from None
        cfg = cls()
        if "grid" in doc:
            cfg.grid = EvaluationGrid(**doc.pop("grid"))
        if "tolerances" in doc:
            cfg.tolerances = Tolerances.from_dict(doc.pop("tolerances"))
        if "icc_variant" in doc:
            cfg.icc_variant = IccVariant(doc.pop("icc_variant"))
        for key, value in doc.items():
            if key not in cls.__dataclass_fields__:
                raise MetFatigueError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        return cfg


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _tol(text: str) -> Optional[float]:
    if text.lower() in ("none", "off", "skip"):
        return None
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("tolerance must be >= 0")
    return value


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--catalog", help=f"model catalog JSON (default: ${CATALOG_ENV} or bundled)")
    p.add_argument("--golden", help="golden-data JSON (default: bundled)")
    p.add_argument("--grid-start", type=float)
    p.add_argument("--grid-end", type=float)
    p.add_argument("--grid-step", type=float)
    p.add_argument("--icc-variant", choices=[v.value for v in IccVariant])
    p.add_argument("--exclusion-threshold", type=_tol, default=_UNSET,
                   help="exclude models with post-regression ICC below this (none disables)")
    p.add_argument("--output-dir")
    p.add_argument("--format", dest="output_format", choices=["delimited", "structured"])
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="metfatigue",
        description="Dynamic muscle fatigue and maximum endurance time (MET) tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[common], help="MET of the extended model")
    p.add_argument("--fmvc", type=float, required=True, help="relative load in (0, 1]")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--k", type=float, help="fatigue ratio in 1/min")
    src.add_argument("--group", help="muscle group; uses k = 1/mean(m) and the +-std band")

    p = sub.add_parser("simulate", parents=[common], help="capacity under a load profile")
    p.add_argument("profile", help="two-column profile file (time_min, load_N)")
    p.add_argument("--mvc", type=float, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.01, help="sample spacing in minutes")
    p.add_argument("--duration", type=float)
    p.add_argument("--output", help="trajectory file (default: <output-dir>/trajectory.csv)")

    p = sub.add_parser("regress", parents=[common], help="fatigue resistance of one model")
    p.add_argument("model_id")

    p = sub.add_parser("validate", parents=[common], help="reproduce the validation tables")
    for name in ("m", "r", "icc1", "icc2", "mean_m", "std_m"):
        p.add_argument(f"--tol-{name.replace('_', '-')}", dest=f"tol_{name}", type=_tol,
                       default=_UNSET)
    p.add_argument("--log-space", action="store_true", help="Pearson r on log MET values")

    p = sub.add_parser("export", parents=[common], help="figure data for one muscle group")
    p.add_argument("--kind", required=True, choices=[k.value for k in FigureKind])
    p.add_argument("--group", required=True)

    sub.add_parser("stats", parents=[common], help="per-group fatigue-resistance summary")
    return parser


def resolve_config(args) -> CliConfig:
    cfg = CliConfig.from_file(args.config) if args.config else CliConfig()
    if args.catalog:
        cfg.catalog_path = args.catalog
    elif cfg.catalog_path is None and os.environ.get(CATALOG_ENV):
        cfg.catalog_path = os.environ[CATALOG_ENV]
    if args.golden:
        cfg.golden_path = args.golden
    grid = {k: getattr(args, f"grid_{k}") for k in ("start", "end", "step")}
    if any(v is not None for v in grid.values()):
        cfg.grid = replace(cfg.grid, **{k: v for k, v in grid.items() if v is not None})
    if args.icc_variant:
        cfg.icc_variant = IccVariant(args.icc_variant)
    if args.exclusion_threshold is not _UNSET:
        cfg.exclusion_threshold = args.exclusion_threshold
    if args.output_dir:
        cfg.output_dir = args.output_dir
    if args.output_format:
        cfg.output_format = args.output_format
    overrides = {k[4:]: v for k, v in vars(args).items()
                 if k.startswith("tol_") and v is not _UNSET}
    if overrides:
        cfg.tolerances = replace(cfg.tolerances, **overrides)
    return cfg


def _catalog(cfg):
    return load_catalog(cfg.catalog_path)


def _emit(table: Table, cfg: CliConfig, stem: str) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.output_format == "structured":
        path = out / f"{stem}.json"
        path.write_text(table.to_json() + "\n")
    else:
        path = out / f"{stem}.csv"
        path.write_text(table.to_csv())
    return path


def cmd_predict(args, cfg) -> int:
    if args.k is not None:
        met = met_extended(args.fmvc, args.k)
        print(f"MET = {_fmt(met)} min")
        return EXIT_OK
    group = Group.parse(args.group)
    results = [analyze_model(m, cfg.grid, cfg.icc_variant) for m in _catalog(cfg).by_group(group)]
    (stats,) = group_statistics(results, cfg.exclusion_threshold)
    met_extended(args.fmvc)  # validates f_mvc
    lower, center, upper = band_at(stats.mean_m, stats.std_m, args.fmvc)
    std = "-" if stats.std_m is None else _fmt(stats.std_m)
    print(f"group {group.value}: mean m = {_fmt(stats.mean_m)}, std m = {std}")
    print(f"MET = {_fmt(center)} min (band {_fmt(lower)} .. {_fmt(upper)} min)")
    return EXIT_OK


def cmd_simulate(args, cfg) -> int:
    path = Path(args.profile)
    if not path.is_file():
        raise MetFatigueError(f"profile file not found: {path}")
    profile = parse_profile(path.read_text(), args.duration)
    params = FatigueParams(args.mvc, args.k)
    crossing = endurance_time(profile, params)
    traj = simulate_capacity(profile, params, args.step)
    table = Table(["time_min", "fcem_N", "load_N"],
                  [(float(t), float(c), float(profile.load_at(t)))
                   for t, c in zip(traj.times, traj.capacity)])
    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(table.to_json() + "\n" if cfg.output_format == "structured" else table.to_csv())
    else:
        out = _emit(table, cfg, "trajectory")
    print(f"final capacity = {_fmt(traj.final)} N at t = {_fmt(float(traj.times[-1]))} min")
    if crossing is None:
        print("endurance: not reached")
    else:
        print(f"endurance = {_fmt(crossing)} min")
    print(f"trajectory written to {out}")
    return EXIT_OK


def cmd_regress(args, cfg) -> int:
    catalog = _catalog(cfg)
    try:
        model = catalog[args.model_id]
    except KeyError:
        raise MetFatigueError(f"unknown model id {args.model_id!r}; known: {', '.join(catalog.ids)}") from None
    res = analyze_model(model, cfg.grid, cfg.icc_variant)
    print(f"{model.id} ({model.group.value}): m = {_fmt(res.m)}, k = {_fmt(res.k)}, "
          f"r = {_fmt(res.pearson_r)}, ICC before = {_fmt(res.icc_before)}, "
          f"ICC after = {_fmt(res.icc_after)}")
    return EXIT_OK


def cmd_validate(args, cfg) -> int:
    catalog = _catalog(cfg)
    golden = load_golden(cfg.golden_path)
    report = build_validation_report(catalog, cfg.grid, cfg.tolerances, cfg.icc_variant,
                                     golden, cfg.exclusion_threshold, args.log_space)
    paths = write_report(report, cfg.output_dir, cfg.output_format)
    n_ok = sum(r.passed for r in report.rows)
    print(f"{len(report.rows)} models ({n_ok} pass), {len(report.groups)} groups, "
          f"ICC variant {report.variant}")
    print("excluded from group statistics: " + (", ".join(report.excluded) or "none"))
    for g in report.groups:
        std = "-" if g.computed["std_m"] is None else _fmt(g.computed["std_m"])
        print(f"  {g.group}: mean m = {_fmt(g.computed['mean_m'])}, std m = {std}")
    for line in report.failures():
        print("FAIL " + line)
    for p in paths:
        print(f"wrote {p}")
    if report.passed:
        print("validation passed")
        return EXIT_OK
    print("validation FAILED")
    return EXIT_VALIDATION_FAILED


def cmd_export(args, cfg) -> int:
    table = export_figure_data(args.kind, args.group, cfg.grid, _catalog(cfg),
                               cfg.icc_variant, cfg.exclusion_threshold)
    group = Group.parse(args.group)
    path = _emit(table, cfg, f"{args.kind}_{group.value.lower()}")
    print(f"{len(table.rows)} rows x {len(table.columns)} columns written to {path}")
    return EXIT_OK


def cmd_stats(args, cfg) -> int:
    results = analyze_catalog(_catalog(cfg), cfg.grid, cfg.icc_variant)
    for s in group_statistics(results, cfg.exclusion_threshold):
        std = "-" if s.std_m is None else _fmt(s.std_m)
        excl = f" (excluded: {', '.join(s.excluded)})" if s.excluded else ""
        print(f"{s.group.value}: n = {len(s.members)}, mean m = {_fmt(s.mean_m)}, std m = {std}{excl}")
    return EXIT_OK


COMMANDS = {
    "predict": cmd_predict,
    "simulate": cmd_simulate,
    "regress": cmd_regress,
    "validate": cmd_validate,
    "export": cmd_export,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with EXIT_USAGE on bad usage
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MetFatigueError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
