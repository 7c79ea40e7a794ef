"""Command-line entry point.

Subcommands
-----------
coherence   r_N(t) series for one config or a figure preset -> CSV
compare     two engines on the same spec + per-sample |r| deviation -> CSV
sweep       t_max against one swept model scalar -> CSV
fit         short-time exponential decay fit (rate, residuals, deviation) -> CSV

CSV layout: `#`-prefixed comment lines echo the fully resolved configuration
(key = value, one per line; a timestamp line is suppressed by
--no-timestamp), followed by one header row and data rows.  Floats are
written as shortest round-trip decimals, so identical inputs produce
byte-identical files.

Exit codes: 0 ok, 2 config error, 3 dispersive-regime violation,
4 numerical failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import analysis, model, symplectic
from .coherence import (
    METHOD_DEGENERATE,
    METHOD_GENERAL,
    METHOD_ORACLE,
    METHOD_PAIR,
    METHOD_SYMPLECTIC,
    CoherenceSeries,
    r_degenerate,
    r_general,
    r_pair,
    time_grid,
)
from .errors import ConfigError, JCDephaseError, OutputError
from .oracle import TruncationSpec, run_oracle
from .presets import FigurePreset, PresetRun, get_preset

KNOWN_METHODS = (METHOD_GENERAL, METHOD_DEGENERATE, METHOD_PAIR, METHOD_SYMPLECTIC, METHOD_ORACLE)

DEFAULT_T_END = 3000.0
DEFAULT_SAMPLES = 3000


def _fmt(value) -> str:
    return repr(float(value))


@dataclass
class MethodOutput:
    series: CoherenceSeries
    sigma_z: np.ndarray | None = None
    comments: tuple[str, ...] = ()


def _run_method(spec: model.ModelSpec, method: str, times: np.ndarray,
                weight_tol: float, prefix: str) -> MethodOutput:
    if method == METHOD_GENERAL:
        return MethodOutput(series=r_general(spec, times))
    if method == METHOD_DEGENERATE:
        return MethodOutput(series=r_degenerate(spec, times))
    if method == METHOD_PAIR:
        return MethodOutput(series=r_pair(spec, times))
    if method == METHOD_SYMPLECTIC:
        return MethodOutput(series=symplectic.r_symplectic(spec, times))
    if method == METHOD_ORACLE:
        result = run_oracle(spec, TruncationSpec(weight_tol=weight_tol), times)
        return MethodOutput(
            series=result.series,
            sigma_z=result.sigma_z,
            comments=(f"# {prefix}oracle.discarded_weight = {_fmt(result.discarded_weight)}",),
        )
    raise ConfigError(f"unknown method '{method}'; known: {', '.join(KNOWN_METHODS)}")


def _suffix(method: str, label: str) -> str:
    return method if not label else f"{method}_{label}"


def _spec_comments(prefix: str, spec: model.ModelSpec) -> list[str]:
    lines = [f"# {prefix}qubit.omega0 = {_fmt(spec.qubit.omega0)}"]
    for j, mode in enumerate(spec.modes):
        lines.append(f"# {prefix}modes[{j}].omega = {_fmt(mode.omega)}")
        lines.append(f"# {prefix}modes[{j}].g = {_fmt(mode.g)}")
    lines.append(f"# {prefix}environment.temperature = {_fmt(spec.temperature)}")
    return lines


def _emit_diagnostics(label: str, spec: model.ModelSpec) -> None:
    diag = model.diagnostics(spec)  # raises RegimeError beyond the hard limit
    if diag.warning:
        name = label or "config"
        print(
            f"warning: {name}: max |g_j/Delta_k| = {diag.max_ratio:.4g} exceeds "
            f"{model.RATIO_WARN}; effective-route accuracy is degraded",
            file=sys.stderr,
        )


def _write_csv(path: str, lines: list[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write '{path}': {exc}") from exc


# ---------------------------------------------------------------------------
# request resolution
# ---------------------------------------------------------------------------

@dataclass
class ResolvedRequest:
    command: str
    runs: list[PresetRun]
    times: np.ndarray
    t_end: float
    samples: int
    preset: FigurePreset | None
    weight_tol: float
    fit_window: float
    timestamp: bool
    out: str
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()


def _parse_method_list(raw: str | None) -> tuple[str, ...] | None:
    if raw is None:
        return None
    methods = tuple(m.strip() for m in raw.split(",") if m.strip())
    if not methods:
        raise ConfigError("--method list is empty")
    for method in methods:
        if method not in KNOWN_METHODS:
            raise ConfigError(f"unknown method '{method}'; known: {', '.join(KNOWN_METHODS)}")
    return methods


def _resolve(args: argparse.Namespace) -> ResolvedRequest:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("exactly one of --config or --preset is required")
    methods = _parse_method_list(args.method)
    preset = None
    sweep_param = None
    sweep_values: tuple[float, ...] = ()

    if args.preset:
        preset = get_preset(args.preset)
        # a preset pins physics parameters; series-producing presets are
        # interchangeable between `coherence` and `fit`, the rest are not
        compatible = {preset.command}
        if preset.command in ("coherence", "fit"):
            compatible |= {"coherence", "fit"}
        if args.command not in compatible:
            raise ConfigError(
                f"preset '{preset.figure_id}' belongs to command '{preset.command}'"
            )
        runs = [
            PresetRun(label=run.label, spec=run.spec, methods=methods or run.methods)
            for run in preset.runs
        ]
        t_end = args.t_end if args.t_end is not None else preset.t_end
        samples = args.samples if args.samples is not None else preset.samples
        sweep_param = preset.sweep_param
        sweep_values = preset.sweep_values
    else:
        spec = model.load_model_toml(args.config)
        if methods is None:
            if args.command == "compare":
                methods = (METHOD_GENERAL, METHOD_ORACLE)
            else:
                methods = (METHOD_GENERAL,)
        runs = [PresetRun(label="", spec=spec, methods=methods)]
        t_end = args.t_end if args.t_end is not None else DEFAULT_T_END
        samples = args.samples if args.samples is not None else DEFAULT_SAMPLES

    if getattr(args, "param", None):
        sweep_param = args.param
    if getattr(args, "param_values", None):
        try:
            sweep_values = tuple(float(v) for v in args.param_values.split(","))
        except ValueError:
            raise ConfigError("--param-values must be a comma-separated list of numbers") from None

    if samples < 2:
        raise ConfigError(f"--samples must be at least 2, got {samples}")
    if t_end <= 0:
        raise ConfigError(f"--t-end must be positive, got {t_end}")

    return ResolvedRequest(
        command=args.command,
        runs=runs,
        times=time_grid(t_end, samples),
        t_end=float(t_end),
        samples=int(samples),
        preset=preset,
        weight_tol=args.weight_tol,
        fit_window=args.fit_window,
        timestamp=not args.no_timestamp,
        out=args.out,
        sweep_param=sweep_param,
        sweep_values=sweep_values,
    )


def _header_comments(req: ResolvedRequest) -> list[str]:
    lines = [f"# jcdephase {req.command}"]
    if req.timestamp:
        lines.append(f"# generated_at = {datetime.now(timezone.utc).isoformat()}")
    if req.preset is not None:
        lines.append(f"# preset = {req.preset.figure_id}")
    lines.append(f"# grid.t_end = {_fmt(req.t_end)}")
    lines.append(f"# grid.samples = {req.samples}")
    for run in req.runs:
        prefix = f"run.{run.label or 'main'}."
        lines.append(f"# {prefix}methods = {','.join(run.methods)}")
        lines.extend(_spec_comments(prefix, run.spec))
    if any(METHOD_ORACLE in run.methods for run in req.runs):
        lines.append(f"# oracle.weight_tol = {_fmt(req.weight_tol)}")
    return lines


def _data_block(columns: list[tuple[str, np.ndarray]]) -> list[str]:
    names = [name for name, _ in columns]
    arrays = [np.asarray(values) for _, values in columns]
    lines = [",".join(names)]
    for i in range(arrays[0].size):
        lines.append(",".join("" if np.isnan(col[i]) else _fmt(col[i]) for col in arrays))
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _series_columns(suffix: str, output: MethodOutput) -> list[tuple[str, np.ndarray]]:
    values = output.series.values
    cols = [
        (f"re_r_{suffix}", values.real),
        (f"im_r_{suffix}", values.imag),
        (f"abs_r_{suffix}", np.abs(values)),
    ]
    if output.sigma_z is not None:
        cols.append((f"sigma_z_{suffix}", output.sigma_z))
    return cols


def _cmd_coherence(req: ResolvedRequest) -> list[str]:
    lines = _header_comments(req)
    columns: list[tuple[str, np.ndarray]] = [("t", req.times)]
    for run in req.runs:
        _emit_diagnostics(run.label, run.spec)
        for method in run.methods:
            prefix = f"run.{run.label or 'main'}."
            output = _run_method(run.spec, method, req.times, req.weight_tol, prefix)
            lines.extend(output.comments)
            columns.extend(_series_columns(_suffix(method, run.label), output))
    if req.preset is not None and req.preset.inset_runs:
        t_end, samples = req.preset.inset_grid
        inset_times = time_grid(t_end, samples)
        for run in req.preset.inset_runs:
            result = analysis.find_tmax(r_general(run.spec, inset_times))
            flag = "" if result.recurrence_found else "  (no recurrence within grid)"
            lines.append(f"# inset.tmax.{run.label} = {_fmt(result.t_max)}{flag}")
    lines.extend(_data_block(columns))
    return lines


def _cmd_compare(req: ResolvedRequest) -> list[str]:
    if len(req.runs) != 1:
        raise ConfigError("compare expects a single spec")
    run = req.runs[0]
    if len(run.methods) != 2:
        raise ConfigError("compare needs exactly two methods (e.g. general,exact-oracle)")
    _emit_diagnostics(run.label, run.spec)
    lines = _header_comments(req)
    columns: list[tuple[str, np.ndarray]] = [("t", req.times)]
    mags = []
    for method in run.methods:
        prefix = f"run.{run.label or 'main'}."
        output = _run_method(run.spec, method, req.times, req.weight_tol, prefix)
        lines.extend(output.comments)
        columns.extend(_series_columns(_suffix(method, run.label), output))
        mags.append(np.abs(output.series.values))
    deviation = np.abs(mags[0] - mags[1])
    columns.append(("abs_deviation", deviation))
    imax = int(np.argmax(deviation))
    lines.append(f"# summary.max_abs_deviation = {_fmt(deviation[imax])}")
    lines.append(f"# summary.at_t = {_fmt(req.times[imax])}")
    lines.extend(_data_block(columns))
    return lines


def _cmd_sweep(req: ResolvedRequest) -> list[str]:
    if req.sweep_param is None or not req.sweep_values:
        raise ConfigError("sweep needs --preset 3a/3b or --param plus --param-values")
    run = req.runs[0]
    result = analysis.sweep_tmax(run.spec, req.sweep_param, req.sweep_values, req.times)
    lines = _header_comments(req)
    lines.append(f"# sweep.param = {result.param_path}")
    lines.append(",".join((result.param_path, "t_max", "flag")))
    for value, tmax, flag in zip(result.values, result.t_max, result.flags):
        tmax_txt = "" if np.isnan(tmax) else _fmt(tmax)
        lines.append(f"{_fmt(value)},{tmax_txt},{flag}")
    return lines


def _cmd_fit(req: ResolvedRequest) -> list[str]:
    lines = _header_comments(req)
    lines.append(f"# fit.window_fraction = {_fmt(req.fit_window)}")
    columns: list[tuple[str, np.ndarray]] = [("t", req.times)]
    for run in req.runs:
        _emit_diagnostics(run.label, run.spec)
        for method in run.methods:
            prefix = f"run.{run.label or 'main'}."
            output = _run_method(run.spec, method, req.times, req.weight_tol, prefix)
            tmax = analysis.find_tmax(output.series)
            fit = analysis.fit_stmd(output.series, window_fraction=req.fit_window, t_max=tmax.t_max)
            suffix = _suffix(method, run.label)
            label = run.label or "main"
            lines.append(f"# fit.{label}.gamma = {_fmt(fit.gamma)}")
            lines.append(f"# fit.{label}.window_end = {_fmt(fit.window[1])}")
            lines.append(f"# fit.{label}.rms_residual = {_fmt(fit.rms_residual)}")
            lines.append(f"# fit.{label}.t_max = {_fmt(tmax.t_max)}")
            lines.append(f"# fit.{label}.recurrence_found = {tmax.recurrence_found}")
            mags = np.abs(output.series.values)
            fitted = np.exp(-2.0 * fit.gamma * req.times)
            columns.append((f"abs_r_{suffix}", mags))
            columns.append((f"fit_{suffix}", fitted))
            columns.append((f"deviation_{suffix}", mags - fitted))
    lines.extend(_data_block(columns))
    return lines


_COMMANDS = {
    "coherence": _cmd_coherence,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jcdephase",
        description="Coherence dynamics of a qubit dispersively coupled to N thermal modes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "coherence": "compute r_N(t) series and write them as CSV",
        "compare": "run two engines on one spec and report |r| deviations",
        "sweep": "t_max against one swept model parameter",
        "fit": "short-time exponential decay fit of |r_N(t)|",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", metavar="PATH", help="TOML model configuration")
        sp.add_argument("--preset", metavar="ID", help="figure preset id (e.g. 2a, 3b, A3g)")
        sp.add_argument("--method", metavar="LIST",
                        help=f"comma-separated engines: {', '.join(KNOWN_METHODS)}")
        sp.add_argument("--t-end", dest="t_end", type=float, metavar="F",
                        help="grid end time in units of 1/omega0")
        sp.add_argument("--samples", type=int, metavar="N", help="number of grid samples")
        sp.add_argument("--out", required=True, metavar="PATH", help="output CSV path")
        sp.add_argument("--no-timestamp", action="store_true",
                        help="omit the generated_at header line (reproducible output)")
        sp.add_argument("--fit-window", dest="fit_window", type=float, default=0.8, metavar="F",
                        help="fit window as a fraction of t_max (default 0.8)")
        sp.add_argument("--weight-tol", dest="weight_tol", type=float, default=1e-3, metavar="F",
                        help="discarded thermal weight budget for the exact propagator")
        if name == "sweep":
            sp.add_argument("--param", metavar="PATH",
                            help="swept scalar, e.g. modes[1].g (with --config)")
            sp.add_argument("--param-values", dest="param_values", metavar="LIST",
                            help="comma-separated sweep values (with --config)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        req = _resolve(args)
        lines = _COMMANDS[req.command](req)
        _write_csv(req.out, lines)
    except JCDephaseError as exc:
        print(f"jcdephase: error: category={exc.category}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"jcdephase: error: category=io: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
