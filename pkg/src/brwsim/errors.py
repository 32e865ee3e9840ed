"""Exception hierarchy shared by all brwsim modules."""


class BRWError(Exception):
    """Base class for every error raised by brwsim."""


class LawError(BRWError, ValueError):
    """An offspring law violates its construction invariants."""


class DomainError(BRWError):
    """psi(t) is infinite at the requested t."""


class NoSolution(BRWError):
    """t psi'(t) = psi(t) has no root in the search bracket."""


class NotSupercritical(BRWError):
    """Mean offspring count is at most one."""


class NotBoundary(BRWError):
    """The law does not satisfy psi(1) = psi'(1) = 0 within tolerance."""


class PopulationOverflow(BRWError):
    """An exact-mode generation outgrew the configured hard limit."""


class TooLarge(BRWError):
    """An exhaustive enumeration would exceed its outcome budget."""


class PhiRangeError(BRWError):
    """An argument falls outside the extended domain of a PhiTable."""


class NoConvergence(BRWError):
    """Fixed-point iteration did not converge.

    The last sup-norm change is kept in ``residual``.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = residual


class PoorFit(BRWError):
    """A regression fit fell below its quality threshold."""


class NonPositiveStatistic(BRWError):
    """A log-scale regression received a statistic <= 0."""


class DegenerateSample(BRWError):
    """A Monte Carlo cell has no usable (e.g. surviving) trials."""


class ConfigError(BRWError, ValueError):
    """Experiment configuration is malformed."""
