class StatsError(Exception):
    """Base class for detection statistics errors."""

    pass


class DomainError(StatsError, ValueError):
    """Argument outside the domain of a special function."""

    pass


class ConvergenceError(StatsError):
    """A continued fraction failed to converge within its iteration cap."""

    pass
