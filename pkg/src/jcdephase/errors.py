"""Exception taxonomy shared by the library and the command-line tool.

Every error carries a short machine-readable ``category`` string and the
process exit code the CLI maps it to (0 ok, 2 config, 3 regime violation,
4 numerical failure, 5 I/O).
"""


class JCDephaseError(Exception):
    """Base class for all errors raised by this package."""

    category = "error"
    exit_code = 1


class ConfigError(JCDephaseError):
    """Bad configuration file, bad request, or invalid model parameters."""

    category = "config"
    exit_code = 2


class ValidationError(ConfigError):
    """A model spec violates a physical invariant (zero detuning, T < 0, ...)."""

    category = "invalid-model"


class MethodMismatchError(ConfigError):
    """An engine was invoked on a spec outside its domain (e.g. the
    degenerate closed form on nondegenerate modes)."""

    category = "method-mismatch"


class RegimeError(JCDephaseError):
    """Dispersive condition violated badly enough that results are meaningless."""

    category = "dispersive-regime"
    exit_code = 3


class NumericalError(JCDephaseError):
    category = "numerical"
    exit_code = 4


class BranchTrackingError(NumericalError):
    """Phase of det A jumped too much between grid samples to unwrap safely."""

    category = "branch-tracking"


class TruncationError(NumericalError):
    """Thermal-ensemble weight budget not reachable within the Fock cutoff."""

    category = "truncation-budget"


class SectorSizeError(NumericalError):
    """An excitation sector exceeds the configured dimension cap."""

    category = "sector-cap"


class GridError(NumericalError):
    """Time grid too coarse for the requested extraction."""

    category = "grid-too-coarse"


class OutputError(JCDephaseError):
    category = "io"
    exit_code = 5
