"""Physical model: one qubit dispersively coupled to N thermal bosonic modes.

All quantities are dimensionless and expressed in units of the qubit
frequency omega0 (hbar = k_B = 1), so times are given as omega0*t.  The
spec objects here are immutable value types; every engine in the package
takes a validated ``ModelSpec`` as its single source of physical truth.

The dispersive condition requires |g_j / Delta_k| << 1 for every pair of
coupling g_j and detuning Delta_k = omega0 - omega_k.  The largest ratio
exercised against the exact propagator is 0.1, so 0.1 is treated as the
edge of the validated envelope (warning) and 0.5 as a hard error.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, RegimeError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

#: dispersive ratio beyond which results carry a warning flag
RATIO_WARN = 0.1
#: dispersive ratio at which the effective description is rejected outright
RATIO_ERROR = 0.5


@dataclass(frozen=True)
class QubitSpec:
    """Bare qubit, characterised by its transition frequency."""

    omega0: float = 1.0


@dataclass(frozen=True)
class ModeSpec:
    """A single bosonic mode: frequency omega and coupling constant g."""

    omega: float
    g: float


@dataclass(frozen=True)
class ModelSpec:
    """Qubit + ordered list of modes + common temperature (k_B = 1)."""

    qubit: QubitSpec
    modes: tuple[ModeSpec, ...]
    temperature: float

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes], dtype=float)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.g for m in self.modes], dtype=float)

    @property
    def detunings(self) -> np.ndarray:
        """Delta_j = omega0 - omega_j."""
        return self.qubit.omega0 - self.omegas


@dataclass(frozen=True)
class DispersiveDiagnostics:
    """Dispersive-regime health report for a model.

    ``ratios[j, k]`` is |g_j / Delta_k|; ``lambda_n`` is the total
    qubit energy shift Lambda_N = sum_j g_j^2 / Delta_j.
    """

    ratios: np.ndarray
    max_ratio: float
    lambda_n: float
    warning: bool


def validate(spec: ModelSpec) -> ModelSpec:
    """Return ``spec`` unchanged if all model invariants hold.

    Raises ValidationError for: empty mode list, nonpositive frequencies,
    negative couplings, negative temperature, or zero detuning.
    """
    if spec.qubit.omega0 <= 0:
        raise ValidationError(f"qubit frequency must be positive, got {spec.qubit.omega0}")
    if spec.n_modes < 1:
        raise ValidationError("environment must contain at least one mode")
    for j, mode in enumerate(spec.modes):
        if mode.omega <= 0:
            raise ValidationError(f"mode {j}: frequency must be positive, got {mode.omega}")
        if mode.g < 0:
            raise ValidationError(f"mode {j}: coupling must be nonnegative, got {mode.g}")
        if mode.omega == spec.qubit.omega0:
            raise ValidationError(
                f"mode {j}: zero detuning (omega = omega0 = {mode.omega}); "
                "the dispersive description requires omega != omega0"
            )
    if spec.temperature < 0:
        raise ValidationError(f"temperature must be nonnegative, got {spec.temperature}")
    return spec


def thermal_occupation(spec: ModelSpec, j: int) -> float:
    """Mean photon number nbar_j = 1/(exp(omega_j/T) - 1) of mode j.

    T = 0 returns exactly 0 rather than evaluating the formula.
    """
    validate(spec)
    omega = spec.modes[j].omega
    if spec.temperature == 0.0:
        return 0.0
    return 1.0 / math.expm1(omega / spec.temperature)


def thermal_occupations(spec: ModelSpec) -> np.ndarray:
    """Vector of nbar_j for all modes."""
    return np.array([thermal_occupation(spec, j) for j in range(spec.n_modes)])


def dispersive_shift(spec: ModelSpec) -> float:
    """Total qubit energy shift Lambda_N = sum_j g_j^2 / Delta_j."""
    g = spec.couplings
    delta = spec.detunings
    return float(np.sum(g * g / delta))


def diagnostics(spec: ModelSpec) -> DispersiveDiagnostics:
    """Dispersive-regime report; raises RegimeError when max |g_j/Delta_k| >= 0.5."""
    validate(spec)
    g = spec.couplings
    delta = spec.detunings
    ratios = np.abs(g[:, None] / delta[None, :])
    max_ratio = float(ratios.max())
    if max_ratio >= RATIO_ERROR:
        raise RegimeError(
            f"max |g_j/Delta_k| = {max_ratio:.3g} >= {RATIO_ERROR}; "
            "dispersive regime violated, effective results would be meaningless"
        )
    return DispersiveDiagnostics(
        ratios=ratios,
        max_ratio=max_ratio,
        lambda_n=dispersive_shift(spec),
        warning=max_ratio > RATIO_WARN,
    )


def is_degenerate(spec: ModelSpec, rel_tol: float = 1e-12) -> bool:
    """True when all mode frequencies coincide to ``rel_tol`` relative."""
    omegas = spec.omegas
    return bool(np.max(np.abs(omegas - omegas[0])) <= rel_tol * abs(omegas[0]))


# ---------------------------------------------------------------------------
# Config file loading.  Format: TOML with exactly the tables below; any
# unknown key is a hard error so typos cannot silently change physics.
#
#   [qubit]          omega0 = 1.0          (optional, default 1.0)
#   [[modes]]        omega = 0.8, g = 0.01 (repeated, order preserved)
#   [environment]    temperature = 1.0
# ---------------------------------------------------------------------------

_TOP_KEYS = {"qubit", "modes", "environment"}
_QUBIT_KEYS = {"omega0"}
_MODE_KEYS = {"omega", "g"}
_ENV_KEYS = {"temperature"}


def _require_float(table: dict, key: str, where: str) -> float:
    if key not in table:
        raise ConfigError(f"missing key '{key}' in {where}")
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {value!r}")
    return float(value)


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def parse_model_config(data: dict) -> ModelSpec:
    """Build and validate a ModelSpec from parsed config data."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a table")
    _reject_unknown(data, _TOP_KEYS, "config")

    qubit_tbl = data.get("qubit", {})
    if not isinstance(qubit_tbl, dict):
        raise ConfigError("[qubit] must be a table")
    _reject_unknown(qubit_tbl, _QUBIT_KEYS, "[qubit]")
    omega0 = float(qubit_tbl.get("omega0", 1.0))

    modes_tbl = data.get("modes", [])
    if not isinstance(modes_tbl, list):
        raise ConfigError("[[modes]] must be an array of tables")
    modes = []
    for j, mode_tbl in enumerate(modes_tbl):
        if not isinstance(mode_tbl, dict):
            raise ConfigError(f"[[modes]] entry {j} must be a table")
        _reject_unknown(mode_tbl, _MODE_KEYS, f"[[modes]] entry {j}")
        modes.append(
            ModeSpec(
                omega=_require_float(mode_tbl, "omega", f"modes[{j}]"),
                g=_require_float(mode_tbl, "g", f"modes[{j}]"),
            )
        )

    if "environment" not in data:
        raise ConfigError("missing [environment] table")
    env_tbl = data["environment"]
    if not isinstance(env_tbl, dict):
        raise ConfigError("[environment] must be a table")
    _reject_unknown(env_tbl, _ENV_KEYS, "[environment]")
    temperature = _require_float(env_tbl, "temperature", "[environment]")

    spec = ModelSpec(qubit=QubitSpec(omega0=omega0), modes=tuple(modes), temperature=temperature)
    return validate(spec)


def load_model_toml(path: str) -> ModelSpec:
    """Load a ModelSpec from a TOML config file."""
    with open(path, "rb") as fh:
        try:
            data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_model_config(data)


def with_parameter(spec: ModelSpec, path: str, value: float) -> ModelSpec:
    """Return a copy of ``spec`` with one scalar replaced.

    ``path`` is one of: ``qubit.omega0``, ``temperature``, ``modes[J].g``,
    ``modes[J].omega`` (J a zero-based mode index).
    """
    if path == "temperature":
        return replace(spec, temperature=float(value))
    if path == "qubit.omega0":
        return replace(spec, qubit=QubitSpec(omega0=float(value)))
    if path.startswith("modes[") and "]." in path:
        idx_str, _, field = path[len("modes["):].partition("].")
        try:
            idx = int(idx_str)
        except ValueError:
            raise ConfigError(f"bad mode index in parameter path '{path}'") from None
        if not 0 <= idx < spec.n_modes:
            raise ConfigError(f"mode index {idx} out of range in parameter path '{path}'")
        if field not in ("g", "omega"):
            raise ConfigError(f"unknown mode field '{field}' in parameter path '{path}'")
        modes = list(spec.modes)
        modes[idx] = replace(modes[idx], **{field: float(value)})
        return replace(spec, modes=tuple(modes))
    raise ConfigError(f"unknown parameter path '{path}'")
