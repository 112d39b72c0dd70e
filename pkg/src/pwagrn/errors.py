"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class PwagrnError(Exception):
    """Base class for library errors."""


class InvalidNetworkError(PwagrnError, ValueError):
    """Network parameters violate the model invariants."""


class SymmetryInapplicableError(PwagrnError, ValueError):
    """A circuit symmetry was requested for a sign pattern it does not apply to."""


class AnalyticDomainError(PwagrnError, ValueError):
    """Parameters fall outside the domain of an analytic formula (e.g. ``a == 0``)."""


class AssumptionViolatedError(PwagrnError, ValueError):
    """A standing assumption of a regular-code computation does not hold."""


class UndecidedError(PwagrnError):
    """No periodic behaviour could be certified within the step budget.

    ``history`` holds the raw symbol stream that was observed.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = [] if history is None else list(history)
