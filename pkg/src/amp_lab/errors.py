"""Exception hierarchy for amp_lab."""


class AmpLabError(Exception):
    """Base class for all errors raised by amp_lab."""


class InvalidIntervalError(AmpLabError, ValueError):
    pass


class TooCoarseError(AmpLabError, ValueError):
    pass


class BadExponentError(AmpLabError, ValueError):
    pass


class MeshMismatchError(AmpLabError, ValueError):
    pass


class NoConvergenceError(AmpLabError, RuntimeError):
    """Iteration budget exhausted; ``diagnostics`` holds the last state."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BracketFailureError(AmpLabError, RuntimeError):
    pass


class MidpointNotANodeError(AmpLabError, ValueError):
    pass


class InfeasibleConstraintError(AmpLabError, ValueError):
    pass


class NotApplicableError(AmpLabError, ValueError):
    pass


class GeometryInfeasibleError(AmpLabError, ValueError):
    pass


class FiberingInfeasibleError(AmpLabError, ValueError):
    pass


class NotSubcriticalError(AmpLabError, ValueError):
    pass


class NearResonanceError(AmpLabError, ValueError):
    pass


class NoAdmissibleStartError(AmpLabError, RuntimeError):
    pass


class OutOfWindowError(AmpLabError, ValueError):
    pass


class PositivityViolationError(AmpLabError, ValueError):
    pass


class BasinEscapeError(AmpLabError, RuntimeError):
    pass


class DivergenceError(AmpLabError, RuntimeError):
    pass


class WatchdogError(AmpLabError, RuntimeError):
    """A structural property guaranteed by theory was violated by an iterate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class MonotonicityViolationError(AmpLabError, RuntimeError):
    def __init__(self, message, probes=None):
        super().__init__(message)
        self.probes = probes or []


class NoSignChangeError(AmpLabError, RuntimeError):
    pass


class ConfigError(AmpLabError, ValueError):
    """Bad configuration entry; ``line`` is 1-based when read from a file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
