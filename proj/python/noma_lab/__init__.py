"""Secure NOMA two-way relay resource allocation lab."""

try:
    from ._noma_lab import *  # noqa: F401,F403
    from ._noma_lab import CSV_HEADER, ConfigError, Error, InfeasibleError
except ImportError:  # in-tree build: extension next to the build outputs
    from _noma_lab import *  # noqa: F401,F403
    from _noma_lab import CSV_HEADER, ConfigError, Error, InfeasibleError

__all__ = [
    "builtin_scenarios",
    "run",
    "config",
    "path_loss_db",
    "oracle",
    "cdf",
    "CSV_HEADER",
    "ConfigError",
    "Error",
    "InfeasibleError",
]
