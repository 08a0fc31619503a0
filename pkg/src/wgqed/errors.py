"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A parameter or configuration value violates its constraint.

    ``key`` names the offending field so callers can report it.
    """

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class NumericalError(RuntimeError):
    """Base class for failures of the numerical pipeline (exit code 2)."""


class IntegrationError(NumericalError):
    def __init__(self, message, time=None):
        self.time = time
        if time is not None:
            message = f"{message} (t = {time:.6g} ns)"
        super().__init__(message)


class PhysicalityError(NumericalError):
    """A propagated state stopped being a density matrix."""


class NoPeakError(NumericalError):
    """The receiving qubit population has no interior maximum in the window."""

    def __init__(self, message, window_end=None):
        self.window_end = window_end
        super().__init__(message)


class ZeroDenominatorError(ZeroDivisionError):
    pass
