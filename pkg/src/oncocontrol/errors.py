"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
ConfigError for bad inputs and NumericalError for integration or
evaluation breakdowns instead of letting bare exceptions escape.
"""


class ConfigError(ValueError):
    """Invalid configuration: bad file, unknown key, or violated invariant."""


class NumericalError(RuntimeError):
    """Numerical breakdown: step-size underflow, non-finite state, or overflow."""
