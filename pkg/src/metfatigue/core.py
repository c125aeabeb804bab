"""Dynamic muscle fatigue model and the extended MET model.

Capacity obeys

    dF_cem/dt = -k * F_cem(t) * F_load(t) / MVC,    F_cem(0) = MVC

whose solution is ``F_cem(t) = MVC * exp(-k/MVC * int_0^t F_load(u) du)``.
For a constant relative load f = F_load/MVC the capacity meets the load at

    MET = -ln(f) / (k * f)

Times are in minutes, forces in newtons, k in 1/min.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InfeasibleLoadError, MetFatigueError

ENDURANCE_TOL = 1e-9

PIECEWISE = "piecewise"
SAMPLED = "sampled"


def _check_finite(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise MetFatigueError(f"{name} must be finite, got {value!r}")
    return arr


@dataclass(frozen=True)
class FatigueParams:
    """Personal fatigue parameters: MVC in N and fatigue ratio k in 1/min."""

    mvc: float
    k: float = 1.0

    def __post_init__(self):
        _check_finite("mvc", self.mvc)
        _check_finite("k", self.k)
        if self.mvc <= 0:
            raise MetFatigueError(f"mvc must be > 0, got {self.mvc}")
        if self.k <= 0:
            raise MetFatigueError(f"k must be > 0, got {self.k}")

    @property
    def fatigue_resistance(self) -> float:
        """m = 1/k."""
        return 1.0 / self.k

    @classmethod
    def from_resistance(cls, mvc: float, m: float) -> "FatigueParams":
        if not m > 0:
            raise MetFatigueError(f"fatigue resistance must be > 0, got {m}")
        return cls(mvc=mvc, k=1.0 / m)


@dataclass(frozen=True)
class LoadProfile:
    """External load over time.

    ``mode="piecewise"``: ``loads[i]`` holds on ``[times[i], times[i+1])``,
    the last one until ``duration``. ``mode="sampled"``: loads are linearly
    interpolated between knots and held constant after the last knot.
    """

    times: tuple
    loads: tuple
    duration: float
    mode: str = PIECEWISE
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        times = _check_finite("times", self.times)
        loads = _check_finite("loads", self.loads)
        _check_finite("duration", self.duration)
        if times.ndim != 1 or times.size == 0:
            raise MetFatigueError("load profile is empty")
        if times.shape != loads.shape:
            raise MetFatigueError("times and loads must have equal length")
        if times[0] != 0:
            raise MetFatigueError(f"first time must be 0, got {times[0]}")
        if np.any(np.diff(times) <= 0):
            raise MetFatigueError("times must be strictly increasing")
        if np.any(loads < 0):
            raise MetFatigueError("loads must be >= 0")
        if self.mode not in (PIECEWISE, SAMPLED):
            raise MetFatigueError(f"unknown profile mode {self.mode!r}")
        if self.duration <= 0:
            raise MetFatigueError("duration must be > 0")
        if self.duration < times[-1] or (self.mode == PIECEWISE and self.duration == times[-1]):
            raise MetFatigueError(
                f"duration {self.duration} must extend past the last knot {times[-1]}"
            )
        object.__setattr__(self, "times", tuple(float(t) for t in times))
        object.__setattr__(self, "loads", tuple(float(v) for v in loads))
        object.__setattr__(self, "duration", float(self.duration))
        object.__setattr__(self, "_cumulative", self._knot_integrals())

    @classmethod
    def constant(cls, load: float, duration: float) -> "LoadProfile":
        return cls((0.0,), (load,), duration, PIECEWISE)

    @classmethod
    def piecewise(cls, segments: Sequence[tuple], duration: float) -> "LoadProfile":
        """Build from ``[(start_min, load_N), ...]``."""
        if len(segments) == 0:
            raise MetFatigueError("load profile is empty")
        times, loads = zip(*segments)
        return cls(tuple(times), tuple(loads), duration, PIECEWISE)

    @classmethod
    def sampled(cls, times: Sequence[float], loads: Sequence[float],
                duration: Optional[float] = None) -> "LoadProfile":
        if len(times) == 0:
            raise MetFatigueError("load profile is empty")
        if duration is None:
            duration = times[-1]
        return cls(tuple(times), tuple(loads), duration, SAMPLED)

    @property
    def breakpoints(self) -> np.ndarray:
        """Knot times plus the end of the profile."""
        t = np.asarray(self.times)
        if self.duration > t[-1]:
            t = np.append(t, self.duration)
        return t

    def _interval_load(self, i, t):
        """Load on interval i evaluated with that interval's formula."""
        t0, v0 = self.times[i], self.loads[i]
        if self.mode == PIECEWISE or i + 1 >= len(self.times):
            return np.full_like(np.asarray(t, dtype=float), v0)
        t1, v1 = self.times[i + 1], self.loads[i + 1]
        return v0 + (v1 - v0) * (np.asarray(t, dtype=float) - t0) / (t1 - t0)

    def load_at(self, t):
        """F_load(t), right-continuous at piecewise jumps."""
        t = np.asarray(t, dtype=float)
        if self.mode == PIECEWISE:
            idx = np.searchsorted(self.times, t, side="right") - 1
            return np.asarray(self.loads)[np.clip(idx, 0, None)]
        return np.interp(t, self.times, self.loads)

    def _knot_integrals(self):
        t = self.breakpoints
        seg = np.empty(t.size - 1)
        for i in range(t.size - 1):
            a, b = t[i], t[i + 1]
            seg[i] = 0.5 * (self._interval_load(i, a) + self._interval_load(i, b)) * (b - a)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def integral(self, t):
        """Exact ``int_0^t F_load(u) du`` (loads are piecewise linear or constant)."""
        t = np.asarray(t, dtype=float)
        bp = self.breakpoints
        idx = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, bp.size - 2)
        out = np.empty_like(t)
        for i in np.unique(idx):
            sel = idx == i
            a = bp[i]
            tt = t[sel]
            out[sel] = self._cumulative[i] + 0.5 * (
                self._interval_load(i, a) + self._interval_load(i, tt)
            ) * (tt - a)
        return out


@dataclass(frozen=True)
class CapacityTrajectory:
    times: np.ndarray
    capacity: np.ndarray
    params: FatigueParams

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> float:
        return float(self.capacity[-1])

    def as_rows(self):
        return list(zip(self.times.tolist(), self.capacity.tolist()))


def fcem_static(t, f_load, params: FatigueParams):
    """Remaining capacity after holding a constant load ``f_load`` for ``t`` min."""
    t_arr = _check_finite("t", t)
    load = _check_finite("f_load", f_load)
    if np.any(t_arr < 0):
        raise MetFatigueError(f"t must be >= 0, got {t!r}")
    if np.any(load < 0):
        raise MetFatigueError(f"f_load must be >= 0, got {f_load!r}")
    out = params.mvc * np.exp(-params.k * load * t_arr / params.mvc)
    return float(out) if out.ndim == 0 else out


def met_extended(f_mvc, k: float = 1.0):
    """Extended MET model, ``-ln(f)/(k f)`` in minutes.

    ``f_mvc == 1`` gives exactly 0. Accepts scalars or arrays.
    """
    f = _check_finite("f_mvc", f_mvc)
    _check_finite("k", k)
    if k <= 0:
        raise MetFatigueError(f"k must be > 0, got {k}")
    if np.any(f <= 0):
        raise MetFatigueError("f_mvc must be > 0 (MET diverges at zero load)")
    if np.any(f > 1):
        raise MetFatigueError("f_mvc must be <= 1 (load exceeds capacity)")
    out = np.where(f == 1.0, 0.0, -np.log(f) / (k * f))
    return float(out) if out.ndim == 0 else out


def rk4_integrate(rhs: Callable[[float, float], float], y0: float, times) -> np.ndarray:
    """Classic 4th-order Runge-Kutta, one step between consecutive output times."""
    times = np.asarray(times, dtype=float)
    y = np.empty_like(times)
    y[0] = y0
    for i in range(times.size - 1):
        t0, h = times[i], times[i + 1] - times[i]
        yi = y[i]
        k1 = rhs(t0, yi)
        k2 = rhs(t0 + 0.5 * h, yi + 0.5 * h * k1)
        k3 = rhs(t0 + 0.5 * h, yi + 0.5 * h * k2)
        k4 = rhs(t0 + h, yi + h * k3)
        y[i + 1] = yi + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    return y


def _sample_times(profile: LoadProfile, step: float) -> np.ndarray:
    n = int(math.floor(profile.duration / step + 1e-9))
    grid = np.arange(n + 1) * step
    grid = grid[grid < profile.duration]
    t = np.union1d(grid, profile.breakpoints)
    # drop near-duplicates created by float multiples landing next to a knot
    keep = np.concatenate([[True], np.diff(t) > 1e-12 * max(1.0, profile.duration)])
    return t[keep]


def simulate_capacity(profile: LoadProfile, params: FatigueParams,
                      step: float = 0.01) -> CapacityTrajectory:
    """Capacity trajectory sampled at multiples of ``step`` plus profile knots.

    Piecewise-constant profiles use the exact exponential per segment;
    sampled profiles are integrated with fixed-step RK4.
    """
    if not (np.isfinite(step) and step > 0):
        raise MetFatigueError(f"step must be > 0, got {step}")
    times = _sample_times(profile, step)
    if profile.mode == PIECEWISE:
        cap = params.mvc * np.exp(-params.k * profile.integral(times) / params.mvc)
    else:
        rate = params.k / params.mvc
        cap = rk4_integrate(lambda t, y: -rate * y * float(profile.load_at(t)),
                            params.mvc, times)
    return CapacityTrajectory(times, cap, params)


def _capacity_exact(profile, params, t):
    return params.mvc * np.exp(-params.k * profile.integral(t) / params.mvc)


def endurance_time(profile: LoadProfile, params: FatigueParams,
                   scan_points: int = 64, tol: float = ENDURANCE_TOL) -> Optional[float]:
    """Earliest time at which capacity has fallen to the load, or None.

    Each profile interval is scanned at ``scan_points`` sub-points to bracket
    the first crossing, which is then refined by bisection to ``tol`` minutes.
    Raises InfeasibleLoadError when the load at t=0 already exceeds MVC.
    """
    load0 = float(profile.load_at(0.0))
    if load0 > params.mvc:
        raise InfeasibleLoadError(
            f"initial load {load0} N exceeds MVC {params.mvc} N; task infeasible from the start"
        )
    bp = profile.breakpoints
    for i in range(bp.size - 1):
        a, b = bp[i], bp[i + 1]

        def gap(t, i=i):
            t = np.asarray(t, dtype=float)
            return _capacity_exact(profile, params, t) - profile._interval_load(i, t)

        pts = np.linspace(a, b, scan_points + 1)
        g = gap(pts)
        hit = np.flatnonzero(g <= 0)
        if hit.size == 0:
            continue
        j = hit[0]
        if j == 0:
            return float(a)
        lo, hi = pts[j - 1], pts[j]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if gap(mid) <= 0:
                hi = mid
            else:
                lo = mid
        return float(hi)
    return None


def parse_profile(text: str, duration: Optional[float] = None) -> LoadProfile:
    """Parse a two-column load profile.

    Format::

        #mode: piecewise        (or sampled; default piecewise)
        #duration: 2.0          (required for piecewise unless given)
        time_min,load_N         (optional header)
        0,30
        1,60

    Columns may be separated by commas or whitespace.
    """
    mode = PIECEWISE
    header_duration = None
    times, loads = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            key = key.strip().lower()
            if key == "mode":
                mode = value.strip().lower()
                if mode not in (PIECEWISE, SAMPLED):
                    raise MetFatigueError(f"line {lineno}: unknown mode {value.strip()!r}")
            elif key == "duration":
                try:
                    header_duration = float(value)
                except ValueError:
                    raise MetFatigueError(f"line {lineno}: bad duration {value.strip()!r}") from None
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise MetFatigueError(f"line {lineno}: expected 2 columns, got {len(parts)}")
        try:
            t, v = float(parts[0]), float(parts[1])
        except ValueError:
            if not times:
                continue  # column header
            raise MetFatigueError(f"line {lineno}: non-numeric value in {line!r}") from None
        times.append(t)
        loads.append(v)
    if not times:
        raise MetFatigueError("load profile is empty")
    if duration is None:
        duration = header_duration
    if mode == SAMPLED:
        return LoadProfile.sampled(times, loads, duration)
    if duration is None:
        raise MetFatigueError("piecewise profile needs a '#duration:' line")
    return LoadProfile(tuple(times), tuple(loads), duration, PIECEWISE)


def format_profile(profile: LoadProfile) -> str:
    lines = [f"#mode: {profile.mode}", f"#duration: {profile.duration!r}", "time_min,load_N"]
    lines += [f"{t!r},{v!r}" for t, v in zip(profile.times, profile.loads)]
    return "\n".join(lines) + "\n"
