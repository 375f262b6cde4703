"""Typed errors raised across the package.

Every error the CLI can surface derives from RamanqcError so dispatch can
serialize it uniformly (exit code 1) without catching unrelated bugs.
"""


class RamanqcError(Exception):
    """Base class for all errors raised by this package."""


class UnitError(RamanqcError, ValueError):
    """Unsupported dimension or non-finite value in a unit conversion."""


class ParameterError(RamanqcError, ValueError):
    """A physical parameter violates its invariant; message names the field."""


class DetuningError(RamanqcError, ValueError):
    """Operation requires the pair's optimal Raman detuning."""


class OptimizationError(RamanqcError, RuntimeError):
    """Scalar optimizer failed to converge; message carries the residual."""


class AddressingError(RamanqcError, ValueError):
    """Site addressing impossible (zero field gradient)."""


class StabilityError(RamanqcError, ValueError):
    """Time step violates the propagation stability guard."""


class ConvergenceError(RamanqcError, RuntimeError):
    """Iterative solver exhausted its step budget."""


class GridError(RamanqcError, ValueError):
    """Spatial grid invalid or too small for the requested dynamics."""


class NoiseError(RamanqcError, ValueError):
    """Noise model misuse: out-of-range lookup, unresolved correlation, ..."""


class ConfigError(RamanqcError, ValueError):
    """Config file failed strict parsing or validation."""
