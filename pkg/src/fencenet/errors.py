"""Exception types shared across the package.

The CLI maps these onto process exit codes (see cli.py): config and data
problems exit 2, shape/compatibility problems exit 3, numerical failures
exit 4. Plain ValueError is treated like a config/argument problem.
"""


class FenceNetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FenceNetError):
    """Invalid configuration: unknown preset, violated model invariant, bad hyperparameter."""


class DataError(FenceNetError):
    """Bad input data: missing coordinates, degenerate scale, too few frames."""


class ShapeError(FenceNetError):
    """Tensor or parameter shape mismatch."""


class NumericError(FenceNetError):
    """Numerical failure: non-finite loss, zero-norm weight direction."""
