from typing import Optional


class MuSkinError(Exception):
    """Base class of all errors raised by muskin"""


class ParameterDomainError(MuSkinError, ValueError):
    """A parameter lies outside the admissible range"""


class SingularArgumentError(MuSkinError, ValueError):
    """A special function was requested at its singular point"""


class ChartDomainError(MuSkinError, ValueError):
    """A point lies outside the validity of a coordinate chart"""


class CompatibilityError(MuSkinError, ValueError):
    """Surface data violates the mean-zero compatibility condition"""


class ConfigError(MuSkinError, ValueError):
    """An experiment configuration cannot be read or validated"""


class ConditioningError(MuSkinError, RuntimeError):
    """
    A modal linear system is too ill-conditioned to be trusted

    Attributes
    ----------
    mode:
        The mode index of the offending system
    condition:
        The estimated condition number
    """

    def __init__(self, message: str, mode: object = None, condition: Optional[float] = None):
        super().__init__(message)
        self.mode = mode
        self.condition = condition


class AccuracyError(MuSkinError, RuntimeError):
    """
    A quadrature or refinement loop did not reach its tolerance

    Attributes
    ----------
    achieved:
        The best relative residual reached
    """

    def __init__(self, message: str, achieved: Optional[float] = None):
        super().__init__(message)
        self.achieved = achieved
