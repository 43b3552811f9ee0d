"""Exception types shared across the package.

The CLI maps these onto exit codes: parameter/config problems -> 2,
malformed input files -> 3, degenerate statistics -> 4.
"""


class GradNoiseError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GradNoiseError, ValueError):
    """An argument is outside its documented domain."""


class ConfigError(ParameterError):
    """A run configuration is malformed or holds an unknown key."""


class SampleSizeError(ParameterError):
    """A sample is too small or too large for the requested test."""


class ShapeMismatchError(ParameterError):
    """Array shapes are mutually inconsistent."""


class DegenerateSampleError(GradNoiseError, ValueError):
    """A sample carries no usable statistical information (zero variance)."""


class EmptyBatteryError(DegenerateSampleError):
    """Every projection direction produced a degenerate sample."""


class DataFormatError(GradNoiseError, ValueError):
    """An input file does not conform to its declared format."""
