"""Frozen parameter sets reproducing each figure panel.

Physical parameters follow the figure captions verbatim.  Grids are artifact
choices: the long-window panels use the default 3000-sample window, the
short-time fit panels use windows sized so the default fit policy
(0.8 * t_max with t_max at the grid end when no recurrence occurs inside)
covers the monotonic-decay region, and the exact-propagation comparisons
extend to omega0*t = 6000 where the long-time degradation shows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import ConfigError

TEMPERATURE_LABELS = ((0.5, "T0.5"), (1.0, "T1.0"), (2.0, "T2.0"))


@dataclass(frozen=True)
class PresetRun:
    """One labelled spec evaluated with one or more engine methods."""

    label: str
    spec: model.ModelSpec
    methods: tuple[str, ...]


@dataclass(frozen=True)
class FigurePreset:
    figure_id: str
    command: str  # natural CLI command: coherence | compare | sweep | fit
    t_end: float
    samples: int
    runs: tuple[PresetRun, ...] = ()
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()
    # extra t_max-vs-N table emitted as comments (figure insets)
    inset_runs: tuple[PresetRun, ...] = ()
    inset_grid: tuple[float, int] | None = None


def _spec(omegas, couplings, temperature) -> model.ModelSpec:
    modes = tuple(model.ModeSpec(omega=float(w), g=float(g)) for w, g in zip(omegas, couplings))
    return model.validate(model.ModelSpec(qubit=model.QubitSpec(), modes=modes, temperature=temperature))


def _temperature_runs(omegas, couplings, method) -> tuple[PresetRun, ...]:
    return tuple(
        PresetRun(label=label, spec=_spec(omegas, couplings, temp), methods=(method,))
        for temp, label in TEMPERATURE_LABELS
    )


def _equally_spaced(n: int, omega_last: float) -> np.ndarray:
    return np.linspace(0.7, omega_last, n)


def _mode_count_runs(omega_last: float, counts, method) -> tuple[PresetRun, ...]:
    return tuple(
        PresetRun(
            label=f"N{n}",
            spec=_spec(_equally_spaced(n, omega_last), [0.01] * n, 1.0),
            methods=(method,),
        )
        for n in counts
    )


def _build_presets() -> dict[str, FigurePreset]:
    presets: dict[str, FigurePreset] = {}

    # --- qubit coherence vs time for two modes, three temperatures ---------
    two_mode_panels = {
        "2a": ((0.8, 0.7), (0.01, 0.02), "general"),
        "2b": ((0.8, 0.7), (0.02, 0.01), "general"),
        "2c": ((0.8, 0.7), (0.01, 0.01), "general"),
        "2d": ((0.8, 0.8), (0.01, 0.01), "degenerate"),
        "2e": ((0.8, 0.9), (0.01, 0.01), "general"),
    }
    for fid, (omegas, couplings, method) in two_mode_panels.items():
        presets[fid] = FigurePreset(
            figure_id=fid,
            command="coherence",
            t_end=3000.0,
            samples=3000,
            runs=_temperature_runs(omegas, couplings, method),
        )
    # short-time panel of 2c with exponential-decay fits
    presets["2f"] = FigurePreset(
        figure_id="2f",
        command="fit",
        t_end=2000.0,
        samples=3000,
        runs=_temperature_runs((0.8, 0.7), (0.01, 0.01), "general"),
    )

    # --- t_max sensitivity sweeps (g1 = 0.01, omega1 = 0.8, T = 0.5) -------
    sweep_base = _spec((0.8, 0.7), (0.01, 0.01), 0.5)
    presets["3a"] = FigurePreset(
        figure_id="3a",
        command="sweep",
        t_end=6000.0,
        samples=6000,
        runs=(PresetRun(label="base", spec=sweep_base, methods=("general",)),),
        sweep_param="modes[1].g",
        sweep_values=tuple(np.linspace(0.0005, 0.02, 40)),
    )
    presets["3b"] = FigurePreset(
        figure_id="3b",
        command="sweep",
        t_end=6000.0,
        samples=6000,
        runs=(PresetRun(label="base", spec=sweep_base, methods=("general",)),),
        sweep_param="modes[1].omega",
        sweep_values=tuple(np.linspace(0.65, 0.95, 31)),
    )

    # --- larger environments, equally spaced frequencies, T = 1.0 ----------
    for fid, omega_last in (("4a", 0.8), ("4b", 0.9)):
        presets[fid] = FigurePreset(
            figure_id=fid,
            command="coherence",
            t_end=3000.0,
            samples=3000,
            runs=_mode_count_runs(omega_last, (2, 3, 5, 10), "general"),
            inset_runs=_mode_count_runs(omega_last, range(2, 11), "general"),
            inset_grid=(8000.0, 8001),
        )
    for fid, n in (("4c", 3), ("4d", 4), ("4e", 5), ("4f", 10)):
        presets[fid] = FigurePreset(
            figure_id=fid,
            command="fit",
            t_end=1250.0,
            samples=2500,
            runs=(
                PresetRun(
                    label=f"N{n}",
                    spec=_spec(_equally_spaced(n, 0.8), [0.01] * n, 1.0),
                    methods=("general",),
                ),
            ),
        )

    # --- exact-propagation checks (T = 1.0) --------------------------------
    exact_panels = {
        "A3a": ((0.8, 0.7), (0.01, 0.02)),
        "A3b": ((0.8, 0.7), (0.01, 0.01)),
        "A3c": ((0.8, 0.8), (0.01, 0.01)),
        "A3d": ((0.8, 0.9), (0.01, 0.01)),
    }
    for fid, (omegas, couplings) in exact_panels.items():
        spec = _spec(omegas, couplings, 1.0)
        presets[fid] = FigurePreset(
            figure_id=fid,
            command="compare",
            t_end=6000.0,
            samples=6001,
            runs=(PresetRun(label="", spec=spec, methods=("general", "exact-oracle")),),
        )
    # companion qubit-population panels from the same parameter sets
    for coh_id, sz_id in (("A3a", "A3e"), ("A3b", "A3f"), ("A3c", "A3g"), ("A3d", "A3h")):
        spec = presets[coh_id].runs[0].spec
        presets[sz_id] = FigurePreset(
            figure_id=sz_id,
            command="coherence",
            t_end=6000.0,
            samples=6001,
            runs=(PresetRun(label="", spec=spec, methods=("exact-oracle",)),),
        )
    return presets


PRESETS = _build_presets()


def get_preset(figure_id: str) -> FigurePreset:
    try:
        return PRESETS[figure_id]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ConfigError(f"unknown preset '{figure_id}'; available: {known}") from None
