"""Derived quantities: recurrence time t_max, short-time decay rates, sweeps.

t_max is the end of the short-time monotonic decay (STMD) window: the time
of the first local minimum of |r_N(t)|, equivalently the instant before the
first recurrence.  For degenerate modes it is pi/(2*Lambda_N) analytically,
independent of temperature.  The STMD itself is summarized by a rate gamma
from a least-squares fit of log|r_N| to -2*gamma*t.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import model
from .coherence import CoherenceSeries, r_general
from .errors import GridError, NumericalError, ValidationError

#: minimum number of samples required before a candidate minimum
MIN_SAMPLES_BEFORE_MIN = 16

#: default fit window as a fraction of t_max
DEFAULT_FIT_FRACTION = 0.8


@dataclass(frozen=True)
class TmaxResult:
    """First local minimum of |r_N|; ``recurrence_found`` is False when |r|
    never turns up within the grid (t_max then reports the grid end)."""

    t_max: float
    value_at_min: float
    grid_resolution: float
    recurrence_found: bool


@dataclass(frozen=True)
class FitResult:
    """Exponential STMD fit |r| ~ exp(-2*gamma*t) over [0, t_fit]."""

    gamma: float
    window: tuple[float, float]
    rms_residual: float


@dataclass(frozen=True)
class SweepResult:
    """One scalar (t_max) per swept parameter value.

    ``values`` and ``t_max`` have equal length; failed points carry NaN in
    ``t_max`` and a non-"ok" flag instead of aborting the sweep.
    """

    param_path: str
    values: np.ndarray
    t_max: np.ndarray
    flags: tuple[str, ...]


def _as_magnitude_series(series: CoherenceSeries) -> tuple[np.ndarray, np.ndarray]:
    times = np.asarray(series.times, dtype=float)
    mags = np.abs(np.asarray(series.values))
    if times.size < 3:
        raise ValidationError("need at least 3 samples to locate extrema")
    return times, mags


def find_tmax(series: CoherenceSeries) -> TmaxResult:
    """Locate the first local minimum of |r_N(t)| on the grid.

    Three-point test (plateaus resolve to their first sample), refined by
    quadratic interpolation through the neighbouring samples.  Raises
    GridError when fewer than MIN_SAMPLES_BEFORE_MIN samples precede the
    candidate minimum.
    """
    times, mags = _as_magnitude_series(series)
    step = times[1] - times[0]
    for i in range(1, times.size - 1):
        if mags[i] < mags[i - 1] and mags[i] <= mags[i + 1]:
            if i < MIN_SAMPLES_BEFORE_MIN:
                raise GridError(
                    f"first |r| minimum at sample {i} < {MIN_SAMPLES_BEFORE_MIN}; "
                    "refine the time grid to resolve the decay"
                )
            denom = mags[i - 1] - 2.0 * mags[i] + mags[i + 1]
            # candidate implies denom >= mags[i-1] - mags[i] > 0
            offset = 0.5 * step * (mags[i - 1] - mags[i + 1]) / denom
            value = mags[i] - 0.125 * (mags[i - 1] - mags[i + 1]) ** 2 / denom
            return TmaxResult(
                t_max=float(times[i] + offset),
                value_at_min=float(value),
                grid_resolution=float(step),
                recurrence_found=True,
            )
    return TmaxResult(
        t_max=float(times[-1]),
        value_at_min=float(mags[-1]),
        grid_resolution=float(step),
        recurrence_found=False,
    )


def fit_stmd(series: CoherenceSeries, window_fraction: float = DEFAULT_FIT_FRACTION,
             t_max: float | None = None) -> FitResult:
    """Least-squares fit of log|r_N| to -2*gamma*t over [0, window_fraction*t_max].

    The fit is through the origin (log|r(0)| = 0 by construction), making
    gamma scale-equivariant: fitting |r|^p returns exactly p*gamma.
    """
    times, mags = _as_magnitude_series(series)
    if not 0.0 < window_fraction <= 1.0:
        raise ValidationError(f"window fraction must lie in (0, 1], got {window_fraction}")
    if t_max is None:
        t_max = find_tmax(series).t_max
    t_fit = window_fraction * t_max
    mask = (times > 0) & (times <= t_fit)
    if np.count_nonzero(mask) < 2:
        raise GridError("fit window contains fewer than 2 samples; refine the grid")
    if np.any(mags[mask] <= 0.0):
        raise NumericalError("|r| vanishes inside the fit window; log-fit undefined")
    t = times[mask]
    logs = np.log(mags[mask])
    gamma = -float(np.sum(t * logs) / (2.0 * np.sum(t * t)))
    residual = logs + 2.0 * gamma * t
    return FitResult(
        gamma=gamma,
        window=(0.0, float(t_fit)),
        rms_residual=float(np.sqrt(np.mean(residual ** 2))),
    )


def deviation_series(series: CoherenceSeries, gamma: float) -> np.ndarray:
    """Per-sample deviation |r_N(t)| - exp(-2*gamma*t)."""
    times, mags = _as_magnitude_series(series)
    return mags - np.exp(-2.0 * gamma * times)


def recurrence_markers(series: CoherenceSeries, t_max: float | None = None) -> list[tuple[float, float]]:
    """All local maxima of |r_N| after t_max (attempted recurrences)."""
    times, mags = _as_magnitude_series(series)
    if t_max is None:
        result = find_tmax(series)
        if not result.recurrence_found:
            return []
        t_max = result.t_max
    markers = []
    for i in range(1, times.size - 1):
        if times[i] <= t_max:
            continue
        if mags[i] > mags[i - 1] and mags[i] >= mags[i + 1]:
            markers.append((float(times[i]), float(mags[i])))
    return markers


def sweep_tmax(base_spec: model.ModelSpec, param_path: str, values,
               times: np.ndarray) -> SweepResult:
    """Recompute r_general and t_max for each value of one model scalar.

    Points failing validation or extraction become NaN holes with a flag;
    evaluation order is the order of ``values`` and results are
    permutation-invariant (each point is independent).
    """
    values = np.asarray(values, dtype=float)
    tmaxes = np.full(values.shape, np.nan)
    flags: list[str] = []
    for i, value in enumerate(values):
        try:
            spec = model.validate(model.with_parameter(base_spec, param_path, float(value)))
            result = find_tmax(r_general(spec, times))
        except ValidationError:
            flags.append("invalid")
            continue
        except (GridError, NumericalError):
            flags.append("failed")
            continue
        tmaxes[i] = result.t_max
        flags.append("ok" if result.recurrence_found else "no-recurrence")
    return SweepResult(param_path=param_path, values=values, t_max=tmaxes, flags=tuple(flags))
