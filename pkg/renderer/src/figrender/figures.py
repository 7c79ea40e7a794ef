"""Panel and layout drawing for the coherence-dynamics figures.

Line styles follow the source figures: T = 0.5 red dotted, T = 1.0 purple
dot-dashed, T = 2.0 blue dashed; exact-propagation overlays are blue solid
against red dashed effective curves; short-time panels overlay solid
exponential-fit lines and shade the deviation between curve and fit.
"""

from __future__ import annotations

import numpy as np
from matplotlib.axes import Axes
from matplotlib.figure import Figure

from .reader import CsvFormatError, CsvTable

#: temperature (units of omega0) -> (color, linestyle) per the figure captions
TEMPERATURE_STYLES = {
    0.5: ("tab:red", ":"),
    1.0: ("tab:purple", "-."),
    2.0: ("tab:blue", "--"),
}

FALLBACK_CYCLE = ["tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple"]


def _style_for(table: CsvTable, label: str, index: int):
    temperature = table.temperature_of(label) if label else None
    if temperature is not None:
        for temp, style in TEMPERATURE_STYLES.items():
            if abs(temperature - temp) <= 1e-12:
                return style
    return FALLBACK_CYCLE[index % len(FALLBACK_CYCLE)], "-"


def _legend_name(table: CsvTable, label: str) -> str:
    temperature = table.temperature_of(label)
    if temperature is not None:
        return f"T = {temperature:g}"
    return label


def panel_coherence(ax: Axes, table: CsvTable) -> None:
    """|r_N(t)| (or sigma_z when that is what the file carries) vs time."""
    t = table.column("t")
    groups = table.columns_with_prefix("abs_r")
    if groups:
        for i, (suffix, values) in enumerate(groups.items()):
            label = suffix.partition("_")[2]
            color, ls = _style_for(table, label, i)
            ax.plot(t, values, color=color, linestyle=ls, linewidth=1.0,
                    label=_legend_name(table, label) if label else suffix)
        ax.set_ylabel(r"$|r_N(t)|$")
        ax.set_ylim(0.0, 1.05)
    else:
        groups = table.columns_with_prefix("sigma_z")
        if not groups:
            raise CsvFormatError(f"{table.path}: no abs_r_* or sigma_z_* columns")
        for i, (suffix, values) in enumerate(groups.items()):
            color, ls = _style_for(table, suffix.partition("_")[2], i)
            ax.plot(t, values, color="tab:blue", linestyle="-", linewidth=0.8)
        ax.set_ylabel(r"$\langle\sigma_z\rangle$")
        ax.set_ylim(-1.0, 1.0)
    ax.set_xlabel(r"$\omega_0 t$")
    ax.set_xlim(t[0], t[-1])
    if len(groups) > 1:
        ax.legend(fontsize=7, frameon=False)


def panel_coherence_with_inset(ax: Axes, table: CsvTable) -> None:
    """Coherence curves plus the t_max-vs-N inset from the comment table."""
    panel_coherence(ax, table)
    inset_items = sorted(
        ((int(key.split(".N")[1]), float(value.split()[0]))
         for key, value in table.meta.items() if key.startswith("inset.tmax.N")),
    )
    if inset_items:
        sub = ax.inset_axes([0.55, 0.55, 0.42, 0.4])
        ns = [n for n, _ in inset_items]
        tmaxes = [v for _, v in inset_items]
        sub.plot(ns, tmaxes, "o-", color="black", markersize=2.5, linewidth=0.8)
        sub.set_xlabel("N", fontsize=6)
        sub.set_ylabel(r"$t_{\max}$", fontsize=6)
        sub.tick_params(labelsize=6)


def panel_compare(ax: Axes, table: CsvTable) -> None:
    """Exact propagation (blue solid) against the effective route (red dashed)."""
    t = table.column("t")
    groups = table.columns_with_prefix("abs_r")
    if len(groups) < 2:
        raise CsvFormatError(f"{table.path}: compare panel needs two abs_r_* columns")
    styles = {"exact-oracle": ("tab:blue", "-", "exact"),
              "general": ("tab:red", "--", "effective")}
    for i, (suffix, values) in enumerate(groups.items()):
        method = suffix.split("_")[0]
        color, ls, name = styles.get(suffix, styles.get(method, (FALLBACK_CYCLE[i], "-", suffix)))
        ax.plot(t, values, color=color, linestyle=ls, linewidth=0.9, label=name)
    ax.set_xlabel(r"$\omega_0 t$")
    ax.set_ylabel(r"$|r_N(t)|$")
    ax.set_xlim(t[0], t[-1])
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize=7, frameon=False)
    if "summary.max_abs_deviation" in table.meta:
        ax.set_title(f"max dev = {float(table.meta['summary.max_abs_deviation']):.3f}", fontsize=7)


def panel_sweep(ax: Axes, table: CsvTable) -> None:
    """t_max against the swept parameter; holes are skipped."""
    param = table.meta.get("sweep.param")
    if param is None or param not in table.columns:
        raise CsvFormatError(f"{table.path}: not a sweep file (no sweep.param echo)")
    values = table.column(param)
    tmax = table.column("t_max")
    good = ~np.isnan(tmax)
    ax.plot(values[good], tmax[good], "o-", color="black", markersize=3, linewidth=0.9)
    ax.set_xlabel(param)
    ax.set_ylabel(r"$t_{\max}\ (1/\omega_0)$")


def panel_fit(ax: Axes, table: CsvTable) -> None:
    """Short-time |r| curves, exponential-fit overlays, shaded deviations."""
    t = table.column("t")
    groups = table.columns_with_prefix("abs_r")
    if not groups:
        raise CsvFormatError(f"{table.path}: no abs_r_* columns")
    for i, (suffix, values) in enumerate(groups.items()):
        label = suffix.partition("_")[2]
        color, ls = _style_for(table, label, i)
        fit = table.column(f"fit_{suffix}")
        ax.plot(t, values, color=color, linestyle=ls, linewidth=1.0,
                label=_legend_name(table, label) if label else suffix)
        ax.plot(t, fit, color=color, linestyle="-", linewidth=0.8, alpha=0.9)
        ax.fill_between(t, values, fit, color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel(r"$\omega_0 t$")
    ax.set_ylabel(r"$|r_N(t)|$")
    ax.set_xlim(t[0], t[-1])
    gammas = [f"{k.split('.')[1]}: {float(v):.2e}"
              for k, v in table.meta.items() if k.startswith("fit.") and k.endswith(".gamma")]
    if gammas:
        ax.set_title("gamma " + ", ".join(gammas), fontsize=6)
    if len(groups) > 1:
        ax.legend(fontsize=7, frameon=False)


PANELS = {
    "2a": panel_coherence, "2b": panel_coherence, "2c": panel_coherence,
    "2d": panel_coherence, "2e": panel_coherence, "2f": panel_fit,
    "3a": panel_sweep, "3b": panel_sweep,
    "4a": panel_coherence_with_inset, "4b": panel_coherence_with_inset,
    "4c": panel_fit, "4d": panel_fit, "4e": panel_fit, "4f": panel_fit,
    "A3a": panel_compare, "A3b": panel_compare, "A3c": panel_compare, "A3d": panel_compare,
    "A3e": panel_coherence, "A3f": panel_coherence, "A3g": panel_coherence, "A3h": panel_coherence,
}

#: composite figure layouts: id -> (rows, cols, panel order)
LAYOUTS = {
    "2": (2, 3, ("2a", "2c", "2e", "2b", "2d", "2f")),
    "3": (1, 2, ("3a", "3b")),
    "4": (2, 3, ("4a", "4c", "4e", "4b", "4d", "4f")),
    "A3": (4, 2, ("A3a", "A3e", "A3b", "A3f", "A3c", "A3g", "A3d", "A3h")),
}

FIGURE_IDS = tuple(PANELS) + tuple(LAYOUTS)


def render_figure(figure_id: str, tables: list[CsvTable]) -> Figure:
    """Draw one panel or one composite layout from already-parsed tables."""
    if figure_id in PANELS:
        if len(tables) != 1:
            raise CsvFormatError(f"figure '{figure_id}' takes exactly one CSV input")
        fig = Figure(figsize=(4.2, 3.0), dpi=150)
        PANELS[figure_id](fig.add_subplot(111), tables[0])
        fig.tight_layout()
        return fig
    if figure_id in LAYOUTS:
        rows, cols, order = LAYOUTS[figure_id]
        if len(tables) != len(order):
            raise CsvFormatError(
                f"figure '{figure_id}' needs {len(order)} CSV inputs in the order {order}")
        fig = Figure(figsize=(3.4 * cols, 2.6 * rows), dpi=150)
        axes = fig.subplots(rows, cols)
        for ax, panel_id, table in zip(np.ravel(axes), order, tables):
            PANELS[panel_id](ax, table)
            ax.set_title(f"({panel_id})", fontsize=8, loc="left")
        fig.tight_layout()
        return fig
    raise CsvFormatError(f"unknown figure id '{figure_id}'; known: {', '.join(FIGURE_IDS)}")
