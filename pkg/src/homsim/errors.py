"""Exception hierarchy for the simulator."""


class HomSimError(Exception):
    """Base class for all simulator errors."""


class InvalidState(HomSimError, ValueError):
    pass


class IntegrationFailure(HomSimError, RuntimeError):
    pass


class InconsistentTimescales(HomSimError, ValueError):
    pass


class GridMismatch(HomSimError, ValueError):
    pass


class DelayOutOfRange(HomSimError, ValueError):
    pass


class ZeroNormalization(HomSimError, ZeroDivisionError):
    pass


class DegenerateDistribution(HomSimError, ValueError):
    pass


class BeatsUnresolved(HomSimError, ValueError):
    pass


class NoBracket(HomSimError, RuntimeError):
    pass


class ConfigError(HomSimError, ValueError):
    pass
