from typing import Any


class MfpricingException(Exception):
    """Any exception that is raised by mf-pricing."""


class InvalidParamsError(MfpricingException, ValueError):
    """Raised for a payoff tuple that cannot be parsed, e.g. `--params 10,20,-10`."""


class InvalidPolicyError(MfpricingException, ValueError):
    """Raised if an optimizer is asked for a referral cap below one."""


class InvalidDistributionError(MfpricingException, ValueError): ...


class EquilibriumNotConvergedError(MfpricingException, RuntimeError):
    """The bisection on the informational access did not shrink the bracket
    below the tolerance within the allowed number of iterations.
    The final bracket is available in `extra_info`.
    """

    def __init__(self, message: str, *, extra_info: dict[str, Any] | None = None):
        super().__init__(message)
        if extra_info is None:
            extra_info = {}
        self.extra_info = extra_info


class UndefinedEfficiencyError(MfpricingException, ValueError):
    """Informational efficiency requested for a strategy in which nobody adopts early."""


class EnumerationBoundError(MfpricingException, ValueError): ...


class ExperimentConfigError(MfpricingException, ValueError):
    """Raised for malformed or incomplete experiment configuration."""

    def __init__(self, message: str, *, extra_info: dict[str, Any] | None = None):
        super().__init__(message)
        if extra_info is None:
            extra_info = {}
        self.extra_info = extra_info
