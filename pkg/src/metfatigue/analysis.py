"""Fatigue-resistance regression and agreement statistics.

The extended model with k=1, ``p(x) = -ln(x)/x``, is fitted to an empirical
model ``f(x)`` through the origin, ``f ~ m p``, on a grid of relative loads.
The least-squares slope ``m = sum(p f) / sum(p^2)`` is the fatigue
resistance (``k = 1/m``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from enum import Enum
from statistics import NormalDist
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .catalog import EmpiricalMetModel, Group, ModelCatalog
from .core import met_extended
from .errors import DegenerateInputError, MetFatigueError

DEFAULT_EXCLUSION_THRESHOLD = 0.5


@dataclass(frozen=True)
class EvaluationGrid:
    """Evenly spaced relative loads ``start, start+step, ..., end``."""

    start: float = 0.16
    end: float = 0.99
    step: float = 0.01

    def __post_init__(self):
        if not (0 < self.start <= self.end <= 1):
            raise MetFatigueError(
                f"grid must satisfy 0 < start <= end <= 1, got {self.start}..{self.end}"
            )
        if not self.step > 0:
            raise MetFatigueError(f"grid step must be > 0, got {self.step}")
        n = (self.end - self.start) / self.step
        if abs(n - round(n)) > 1e-6:
            raise MetFatigueError("grid span is not a whole number of steps")

    @property
    def n(self) -> int:
        return int(round((self.end - self.start) / self.step)) + 1

    @property
    def points(self) -> np.ndarray:
        # rounding keeps 0.16 + i*0.01 identical to the decimal literals
        return np.round(self.start + self.step * np.arange(self.n), 12)


class IccVariant(str, Enum):
    ONE_WAY = "oneway"
    TWO_WAY_AGREEMENT = "twoway-agreement"
    TWO_WAY_CONSISTENCY = "twoway-consistency"


ModelLike = Union[EmpiricalMetModel, Callable]


def _values(model: ModelLike, x: np.ndarray) -> np.ndarray:
    f = model.evaluate(x) if hasattr(model, "evaluate") else model(x)
    f = np.asarray(f, dtype=float)
    if f.shape != x.shape or not np.all(np.isfinite(f)):
        raise MetFatigueError("empirical model produced non-finite values on the grid")
    return f


def reference_curve(grid: EvaluationGrid) -> np.ndarray:
    """Extended MET model at k=1 on the grid."""
    return met_extended(grid.points, 1.0)


def fit_resistance(f_values, p_values) -> float:
    """Through-origin least-squares slope of f against p."""
    f = np.asarray(f_values, dtype=float)
    p = np.asarray(p_values, dtype=float)
    a = float(np.dot(p, p))
    if a == 0.0:
        raise DegenerateInputError("sum of squared reference values is zero")
    m = float(np.dot(p, f)) / a
    if not m > 0:
        raise MetFatigueError(f"fitted fatigue resistance is not positive (m={m})")
    return m


def regress_m(model: ModelLike, grid: EvaluationGrid = EvaluationGrid()) -> float:
    """Closed-form fatigue resistance of ``model`` on ``grid``."""
    x = grid.points
    return fit_resistance(_values(model, x), met_extended(x, 1.0))


_INV_PHI = (math.sqrt(5) - 1) / 2


def regress_m_oracle(model: ModelLike, grid: EvaluationGrid = EvaluationGrid(),
                     upper: float = 10.0, tol: float = 1e-10) -> float:
    """Brute-force minimiser of ``sum (f_i - m p_i)^2`` by golden-section search.

    The objective is evaluated in 60-digit decimal arithmetic so that the
    search is not limited by float cancellation near the flat minimum. The
    initial bracket ``(0, upper]`` is doubled while the objective still
    decreases at its right end.
    """
    x = grid.points
    f = [Decimal(float(v)) for v in _values(model, x)]
    p = [Decimal(float(v)) for v in met_extended(x, 1.0)]
    if all(v == 0 for v in p):
        raise DegenerateInputError("sum of squared reference values is zero")

    with localcontext() as ctx:
        ctx.prec = 60

        def objective(m: float) -> Decimal:
            dm = Decimal(m)
            return sum((fi - dm * pi) ** 2 for fi, pi in zip(f, p))

        hi = float(upper)
        # minimiser of a convex quadratic lies below 0.75*hi once M(hi) >= M(hi/2)
        while objective(hi) < objective(hi / 2):
            hi *= 2
            if hi > 1e12:
                raise MetFatigueError("golden-section bracket failed to close")

        a, b = 0.0, hi
        c = b - _INV_PHI * (b - a)
        d = a + _INV_PHI * (b - a)
        fc, fd = objective(c), objective(d)
        while b - a > tol * max(1.0, b):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - _INV_PHI * (b - a)
                fc = objective(c)
            else:
                a, c, fc = c, d, fd
                d = a + _INV_PHI * (b - a)
                fd = objective(d)
    m = 0.5 * (a + b)
    if not m > 0:
        raise MetFatigueError(f"fitted fatigue resistance is not positive (m={m})")
    return m


def _paired(a, b, min_len=3):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise MetFatigueError(f"series lengths differ: {a.shape} vs {b.shape}")
    if a.size < min_len:
        raise MetFatigueError(f"need at least {min_len} paired values, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise MetFatigueError("series contain non-finite values")
    return a, b


def pearson_r(a, b) -> float:
    a, b = _paired(a, b)
    da = a - a.mean()
    db = b - b.mean()
    saa, sbb = float(np.dot(da, da)), float(np.dot(db, db))
    if saa == 0 or sbb == 0:
        raise DegenerateInputError("pearson r undefined for a constant series")
    r = float(np.dot(da, db)) / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, r))


def icc(a, b, variant: Union[IccVariant, str] = IccVariant.ONE_WAY) -> float:
    """Single-measure intraclass correlation between two series.

    Rows are grid points, the two series are the raters.

    - oneway: ICC(1,1) = (MSR - MSW) / (MSR + (k-1) MSW)
    - twoway-agreement: ICC(2,1), absolute agreement
    - twoway-consistency: ICC(3,1)
    """
    a, b = _paired(a, b)
    variant = IccVariant(variant)
    y = np.column_stack([a, b])
    n, k = y.shape
    grand = y.mean()
    ss_rows = k * float(np.sum((y.mean(axis=1) - grand) ** 2))
    ss_cols = n * float(np.sum((y.mean(axis=0) - grand) ** 2))
    ss_total = float(np.sum((y - grand) ** 2))
    if ss_total == 0:
        raise DegenerateInputError("ICC undefined: all values are equal")
    ss_err = max(ss_total - ss_rows - ss_cols, 0.0)
    msr = ss_rows / (n - 1)
    msc = ss_cols / (k - 1)
    mse = ss_err / ((n - 1) * (k - 1))
    msw = (ss_cols + ss_err) / (n * (k - 1))
    if variant is IccVariant.ONE_WAY:
        num, den = msr - msw, msr + (k - 1) * msw
    elif variant is IccVariant.TWO_WAY_AGREEMENT:
        num, den = msr - mse, msr + (k - 1) * mse + k * (msc - mse) / n
    else:
        num, den = msr - mse, msr + (k - 1) * mse
    if den == 0:
        raise DegenerateInputError("ICC undefined: zero between-row variance")
    return num / den


@dataclass(frozen=True)
class RegressionResult:
    model_id: str
    group: Group
    m: float
    pearson_r: float
    icc_before: float
    icc_after: float

    @property
    def k(self) -> float:
        return 1.0 / self.m


def analyze_model(model: EmpiricalMetModel, grid: EvaluationGrid = EvaluationGrid(),
                  variant: Union[IccVariant, str] = IccVariant.ONE_WAY,
                  log_space: bool = False) -> RegressionResult:
    """Regress m and compute r, ICC before (k=1) and after (f/m vs p)."""
    x = grid.points
    f = _values(model, x)
    p = met_extended(x, 1.0)
    m = fit_resistance(f, p)
    if log_space:
        r = pearson_r(np.log(p), np.log(f))
    else:
        r = pearson_r(p, f)
    return RegressionResult(
        model_id=model.id,
        group=model.group,
        m=m,
        pearson_r=r,
        icc_before=icc(p, f, variant),
        icc_after=icc(p, f / m, variant),
    )


def analyze_catalog(catalog: ModelCatalog, grid: EvaluationGrid = EvaluationGrid(),
                    variant: Union[IccVariant, str] = IccVariant.ONE_WAY,
                    log_space: bool = False) -> list:
    return [analyze_model(model, grid, variant, log_space) for model in catalog]


@dataclass(frozen=True)
class GroupStatistics:
    group: Group
    members: tuple  # ((model_id, m), ...) over included models
    mean_m: float
    std_m: Optional[float]  # sample std; None for a single member
    excluded: tuple = field(default=())

    @property
    def ms(self) -> list:
        return [m for _, m in self.members]


def group_statistics(results: Iterable[RegressionResult],
                     exclusion_threshold: Optional[float] = DEFAULT_EXCLUSION_THRESHOLD) -> list:
    """Per-group mean and sample standard deviation of m.

    Models whose post-regression ICC falls below ``exclusion_threshold`` are
    left out of the statistics and listed in ``excluded``.
    """
    by_group: dict = {}
    for res in results:
        by_group.setdefault(res.group, []).append(res)
    out = []
    for group, members in by_group.items():
        kept, dropped = [], []
        for res in members:
            if exclusion_threshold is not None and res.icc_after < exclusion_threshold:
                dropped.append(res.model_id)
            else:
                kept.append((res.model_id, res.m))
        if not kept:
            raise MetFatigueError(f"group {group.value} is empty after exclusion")
        ms = np.array([m for _, m in kept])
        std = float(np.std(ms, ddof=1)) if ms.size > 1 else None
        out.append(GroupStatistics(group, tuple(kept), float(ms.mean()), std, tuple(dropped)))
    return out


def normal_plot_positions(ms: Sequence[float]) -> list:
    """``(m_(i), Phi^-1((i - 0.5)/n))`` pairs over the sorted values."""
    values = sorted(float(v) for v in ms)
    n = len(values)
    if n < 3:
        raise MetFatigueError(f"normal plot needs at least 3 values, got {n}")
    inv = NormalDist().inv_cdf
    return [(v, inv((i - 0.5) / n)) for i, v in enumerate(values, start=1)]


@dataclass(frozen=True)
class PredictionBand:
    group: Group
    mean_m: float
    std_m: float
    f_mvc: np.ndarray
    lower: np.ndarray   # (mean - std) * p(x)
    center: np.ndarray  # mean * p(x)
    upper: np.ndarray   # (mean + std) * p(x)

    @property
    def center_k(self) -> float:
        return 1.0 / self.mean_m

    @property
    def lower_k(self) -> float:
        return 1.0 / (self.mean_m + self.std_m)

    @property
    def upper_k(self) -> float:
        return 1.0 / (self.mean_m - self.std_m)


def band_at(mean_m: float, std_m: Optional[float], f_mvc):
    """(lower, center, upper) MET at ``f_mvc`` for resistance mean_m +- std_m."""
    std = 0.0 if std_m is None else std_m
    if mean_m - std <= 0:
        raise MetFatigueError(
            f"lower band undefined: mean m {mean_m} - std {std} <= 0"
        )
    p = met_extended(f_mvc, 1.0)
    return (mean_m - std) * p, mean_m * p, (mean_m + std) * p


def prediction_band(stats: GroupStatistics, grid: EvaluationGrid = EvaluationGrid()) -> PredictionBand:
    """MET curves for m-bar and m-bar +- sigma; a single-member group gets a zero-width band."""
    x = grid.points
    lower, center, upper = band_at(stats.mean_m, stats.std_m, x)
    std = 0.0 if stats.std_m is None else stats.std_m
    return PredictionBand(stats.group, stats.mean_m, std, x, lower, center, upper)
