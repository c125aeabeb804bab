"""Validation against the tabulated reference values and figure-data exports."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .analysis import (
    DEFAULT_EXCLUSION_THRESHOLD,
    EvaluationGrid,
    GroupStatistics,
    IccVariant,
    RegressionResult,
    analyze_model,
    group_statistics,
    normal_plot_positions,
    prediction_band,
    reference_curve,
)
from .catalog import Group, ModelCatalog, reference_catalog
from .errors import MetFatigueError

MODEL_COLUMNS = ("r", "icc1", "icc2", "m")
GROUP_COLUMNS = ("mean_m", "std_m")


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances per compared quantity; None disables a comparison."""

    m: Optional[float] = 0.005
    r: Optional[float] = 0.005
    icc1: Optional[float] = None
    icc2: Optional[float] = 0.05
    mean_m: Optional[float] = 0.005
    std_m: Optional[float] = 0.005

    @classmethod
    def from_dict(cls, d: dict) -> "Tolerances":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise MetFatigueError(f"unknown tolerance keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class GoldenData:
    models: dict  # id -> {"r", "icc1", "icc2", "m", "corrections"?}
    groups: dict  # Group -> {"mean_m", "std_m", "excluded"}
    version: str = ""


def load_golden(path: Optional[Union[str, Path]] = None) -> GoldenData:
    if path is None:
        text = resources.files("metfatigue").joinpath("data/table2_table3_golden.json").read_text()
    else:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"golden-data file not found: {path}")
        text = path.read_text()
    try:
        doc = json.loads(text)
        models = {row["id"]: row for row in doc["models"]}
        groups = {Group(row["group"]): row for row in doc["groups"]}
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MetFatigueError(f"malformed golden-data file: {exc}") from exc
    return GoldenData(models, groups, doc.get("version", ""))


def verdict(computed: Optional[float], golden: Optional[float], tol: Optional[float]) -> Optional[bool]:
    """True/False for a judged cell, None when not judged."""
    if tol is None:
        return None
    if golden is None:
        return None if computed is not None else True
    if computed is None:
        return False
    return bool(abs(computed - golden) <= tol)


@dataclass
class ReportRow:
    id: str
    group: str
    computed: dict
    golden: dict
    residuals: dict
    verdicts: dict
    corrected: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(v is not False for v in self.verdicts.values())


@dataclass
class GroupRow:
    group: str
    members: list
    excluded: list
    computed: dict
    golden: dict
    residuals: dict
    verdicts: dict

    @property
    def passed(self) -> bool:
        return all(v is not False for v in self.verdicts.values())


@dataclass
class ValidationReport:
    rows: list
    groups: list
    tolerances: Tolerances
    variant: str
    grid: EvaluationGrid

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(g.passed for g in self.groups)

    @property
    def excluded(self) -> list:
        return [mid for g in self.groups for mid in g.excluded]

    def failures(self) -> list:
        out = []
        for r in self.rows:
            if r.error:
                out.append(f"{r.id}: error: {r.error}")
            for col, ok in r.verdicts.items():
                if ok is False:
                    out.append(f"{r.id}.{col}: computed={_fmt(r.computed[col])} "
                               f"golden={_fmt(r.golden[col])} residual={_fmt(r.residuals[col])}")
        for g in self.groups:
            for col, ok in g.verdicts.items():
                if ok is False:
                    out.append(f"{g.group}.{col}: computed={_fmt(g.computed[col])} "
                               f"golden={_fmt(g.golden[col])} residual={_fmt(g.residuals[col])}")
        return out

    def model_table(self) -> "Table":
        cols = ["model_id", "group"]
        for c in MODEL_COLUMNS:
            cols += [c, f"golden_{c}", f"residual_{c}", f"pass_{c}"]
        cols += ["error"]
        rows = []
        for r in self.rows:
            line = [r.id, r.group]
            for c in MODEL_COLUMNS:
                line += [r.computed.get(c), r.golden.get(c), r.residuals.get(c), r.verdicts.get(c)]
            line.append(r.error or "")
            rows.append(tuple(line))
        return Table(cols, rows)

    def group_table(self) -> "Table":
        cols = ["group", "n_members", "excluded"]
        for c in GROUP_COLUMNS:
            cols += [c, f"golden_{c}", f"residual_{c}", f"pass_{c}"]
        rows = []
        for g in self.groups:
            line = [g.group, len(g.members), ";".join(g.excluded)]
            for c in GROUP_COLUMNS:
                line += [g.computed.get(c), g.golden.get(c), g.residuals.get(c), g.verdicts.get(c)]
            rows.append(tuple(line))
        return Table(cols, rows)

    def to_dict(self) -> dict:
        return {
            "grid": asdict(self.grid),
            "icc_variant": self.variant,
            "tolerances": asdict(self.tolerances),
            "passed": self.passed,
            "models": [asdict(r) for r in self.rows],
            "groups": [asdict(g) for g in self.groups],
            "failures": self.failures(),
        }


def _fmt(v):
    return "-" if v is None else f"{v:.6g}"


def _residual(c, g):
    return None if c is None or g is None else c - g


def build_validation_report(catalog: Optional[ModelCatalog] = None,
                            grid: EvaluationGrid = EvaluationGrid(),
                            tolerances: Tolerances = Tolerances(),
                            variant: Union[IccVariant, str] = IccVariant.ONE_WAY,
                            golden: Optional[GoldenData] = None,
                            exclusion_threshold: Optional[float] = DEFAULT_EXCLUSION_THRESHOLD,
                            log_space: bool = False) -> ValidationReport:
    """Run regress/correlate/group-stats over the catalog and compare with goldens.

    Analysis errors are recorded on the affected row; the rest of the report
    is still produced.
    """
    catalog = reference_catalog() if catalog is None else catalog
    golden = load_golden() if golden is None else golden
    variant = IccVariant(variant)

    rows, results = [], []
    for model in catalog:
        g = golden.models.get(model.id, {})
        gold = {c: g.get(c) for c in MODEL_COLUMNS}
        try:
            res = analyze_model(model, grid, variant, log_space)
        except MetFatigueError as exc:
            rows.append(ReportRow(model.id, model.group.value, dict.fromkeys(MODEL_COLUMNS),
                                  gold, dict.fromkeys(MODEL_COLUMNS),
                                  dict.fromkeys(MODEL_COLUMNS, False), error=str(exc)))
            continue
        results.append(res)
        comp = {"r": res.pearson_r, "icc1": res.icc_before, "icc2": res.icc_after, "m": res.m}
        # a model printed without m (dropped from the group table) has nothing to judge
        verdicts = {c: verdict(comp[c], gold[c], getattr(tolerances, c)) if gold[c] is not None
                    else None for c in MODEL_COLUMNS}
        corrected = [c["field"] for c in g.get("corrections", [])]
        if model.corrected:
            corrected.append("coefficients")
        rows.append(ReportRow(model.id, model.group.value, comp, gold,
                              {c: _residual(comp[c], gold[c]) for c in MODEL_COLUMNS},
                              verdicts, corrected))

    group_rows = []
    for stats in group_statistics(results, exclusion_threshold):
        g = golden.groups.get(stats.group, {})
        gold = {"mean_m": g.get("mean_m"), "std_m": g.get("std_m")}
        comp = {"mean_m": stats.mean_m, "std_m": stats.std_m}
        group_rows.append(GroupRow(
            stats.group.value,
            [mid for mid, _ in stats.members],
            list(stats.excluded),
            comp, gold,
            {c: _residual(comp[c], gold[c]) for c in GROUP_COLUMNS},
            {c: verdict(comp[c], gold[c], getattr(tolerances, c)) for c in GROUP_COLUMNS},
        ))
    return ValidationReport(rows, group_rows, tolerances, variant.value, grid)


# --- tabular exports -------------------------------------------------------

@dataclass
class Table:
    columns: list
    rows: list

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def to_records(self) -> list:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def to_json(self) -> str:
        return json.dumps({"columns": self.columns, "rows": [list(r) for r in self.rows]}, indent=2)


class FigureKind(str, Enum):
    ICC = "icc"
    NORMPLOT = "normplot"
    BAND = "band"


def _group_results(catalog, group, grid, variant):
    return [analyze_model(m, grid, variant) for m in catalog.by_group(group)]


def export_figure_data(kind: Union[FigureKind, str], group: Union[Group, str],
                       grid: EvaluationGrid = EvaluationGrid(),
                       catalog: Optional[ModelCatalog] = None,
                       variant: Union[IccVariant, str] = IccVariant.ONE_WAY,
                       exclusion_threshold: Optional[float] = DEFAULT_EXCLUSION_THRESHOLD) -> Table:
    """Data behind one figure for one muscle group.

    icc:      f_mvc, extended_met (x axis), reference (diagonal), then
              f(x)/m per member model
    normplot: rank, model_id, m, quantile over the included members
    band:     f_mvc, lower, center, upper, then raw f(x) per member model
    """
    kind = FigureKind(kind)
    group = group if isinstance(group, Group) else Group.parse(group)
    catalog = reference_catalog() if catalog is None else catalog
    members = catalog.by_group(group)
    if not members:
        raise MetFatigueError(f"no models in group {group.value}")
    x = grid.points

    if kind is FigureKind.ICC:
        p = reference_curve(grid)
        results = _group_results(catalog, group, grid, variant)
        cols = ["f_mvc", "extended_met", "reference"] + [m.id for m in members]
        series = [m.evaluate(x) / res.m for m, res in zip(members, results)]
        rows = [tuple([float(x[i]), float(p[i]), float(p[i])] + [float(s[i]) for s in series])
                for i in range(x.size)]
        return Table(cols, rows)

    stats = _stats_for(catalog, group, grid, variant, exclusion_threshold)
    if kind is FigureKind.NORMPLOT:
        if len(stats.members) < 3:
            raise MetFatigueError(
                f"normal plot for {group.value} needs at least 3 models, "
                f"group has {len(stats.members)}"
            )
        ordered = sorted(stats.members, key=lambda t: t[1])
        pairs = normal_plot_positions([m for _, m in ordered])
        rows = [(i, mid, m, q) for i, ((mid, _), (m, q)) in enumerate(zip(ordered, pairs), start=1)]
        return Table(["rank", "model_id", "m", "quantile"], rows)

    band = prediction_band(stats, grid)
    curves = [m.evaluate(x) for m in members]
    cols = ["f_mvc", "lower", "center", "upper"] + [m.id for m in members]
    rows = [tuple([float(x[i]), float(band.lower[i]), float(band.center[i]), float(band.upper[i])]
                  + [float(c[i]) for c in curves]) for i in range(x.size)]
    return Table(cols, rows)


def _stats_for(catalog, group, grid, variant, exclusion_threshold) -> GroupStatistics:
    (stats,) = group_statistics(_group_results(catalog, group, grid, variant), exclusion_threshold)
    return stats


def write_report(report: ValidationReport, output_dir: Union[str, Path],
                 fmt: str = "delimited") -> list:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "structured":
        path = out / "validation_report.json"
        path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        return [path]
    models = out / "validation_models.csv"
    groups = out / "validation_groups.csv"
    models.write_text(report.model_table().to_csv())
    groups.write_text(report.group_table().to_csv())
    return [models, groups]
