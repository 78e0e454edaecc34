"""Exception types raised across the toolkit."""


class QksvmError(Exception):
    """Base class for toolkit errors."""


class ConfigurationError(QksvmError, ValueError):
    """Invalid parameter or configuration value."""


class DimensionError(QksvmError, ValueError):
    """Array shapes or lengths that do not agree."""


class LoadError(QksvmError, ValueError):
    """Malformed input file; the message names the offending row and column."""


class UnsupportedDiagnosticError(QksvmError):
    """A diagnostic was requested for a model where it has no meaning."""
