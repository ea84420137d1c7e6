"""Exception types shared across the package."""


class GridMismatchError(ValueError):
    """Two objects that must share a SampledGrid do not."""


class RealizabilityError(ValueError):
    """A spectral filter violates 0 <= |H(omega)| <= 1."""


class UnphysicalStateError(ValueError):
    """A fluctuation state fails the uncertainty (positivity) check."""


class InvariantViolation(RuntimeError):
    """A cross-module physics invariant failed at runtime."""


class ConfigError(ValueError):
    """An experiment configuration file is malformed or inconsistent."""
