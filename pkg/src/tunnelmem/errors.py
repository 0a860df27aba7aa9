"""Exception hierarchy shared by all tunnelmem modules."""


class TunnelmemError(Exception):
    """Base class for every error raised by this package."""


class ModelDomainError(TunnelmemError):
    """Barrier equations evaluated outside their domain of validity."""


class DegenerateBarrier(ModelDomainError):
    pass


class NegativeBarrier(ModelDomainError):
    pass


class NoConvergence(TunnelmemError):
    pass


class SimulationError(TunnelmemError):
    """A transient run failed at time ``t``.

    ``partial`` holds the trace recorded up to (not including) the failing
    sample, so callers can still inspect the trajectory that led there.
    """

    def __init__(self, t, cause, partial=None):
        super().__init__(f"t={t:.9g} s: {cause}")
        self.t = t
        self.cause = cause
        self.partial = partial


class OutOfRange(TunnelmemError):
    pass


class EmptyTrace(TunnelmemError):
    pass


class LengthMismatch(TunnelmemError):
    pass


class DegenerateReference(TunnelmemError):
    pass


class NoOverlap(TunnelmemError):
    pass


class ConfigError(TunnelmemError):
    pass


class ParseError(ConfigError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnknownKey(ConfigError):
    pass


class InvariantViolation(ConfigError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
