"""Exception types raised by the library."""


class RidgeXmseError(Exception):
    """Base class for all library errors."""


class ConfigError(RidgeXmseError, ValueError):
    pass


class DegenerateSignalError(RidgeXmseError):
    """The noise-free output has zero sample variance, so SNR scaling is undefined."""


class RankDeficiencyError(RidgeXmseError, ValueError):
    pass


class PoleError(RidgeXmseError, ArithmeticError):
    """``C1*r + C2/r`` vanishes at the evaluation radius, so log(pi) is -inf."""


class DegenerateWeightsError(RidgeXmseError):
    pass


class UndefinedFitError(RidgeXmseError, ZeroDivisionError):
    """The mean-centred true system is zero (always the case for n = 1)."""


class StudyAbortedError(RidgeXmseError):
    pass
