"""Exception types shared across the package."""


class XcflowError(Exception):
    """Base class for all xcflow errors."""


class DomainError(XcflowError, ValueError):
    """Input outside an operation's mathematical domain (e.g. a metric that
    is not positive definite, a zero covector, a non-positive scale factor)."""


class InternalConsistencyError(XcflowError, RuntimeError):
    """Two independent formulas for the same quantity disagree beyond
    tolerance, which signals inconsistent caller-supplied data."""


class ExtinctionExceededError(DomainError):
    """A closed-form evaluation was requested past the extinction time."""

    def __init__(self, t: float, t_ext: float):
        super().__init__(
            f"requested time t={t!r} exceeds the extinction time t_ext={t_ext!r}"
        )
        self.t = t
        self.t_ext = t_ext


class ExtinctStateError(DomainError):
    """The scale factor is non-positive; the evolving metric has collapsed."""
