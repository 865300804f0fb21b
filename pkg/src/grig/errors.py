"""Exception types shared across the package."""


class GrigError(Exception):
    """Base class for package-specific failures."""


class ConfigError(GrigError):
    """An experiment or kernel configuration is invalid."""


class ConvergenceError(GrigError):
    """A numerical routine exhausted its refinement budget.

    Carries the best available estimate so callers can decide whether to
    proceed with a documented error bound.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
