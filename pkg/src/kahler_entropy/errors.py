"""Exception hierarchy.

The CLI maps spec/domain problems to exit code 2 and numerical failures to
exit code 3 via the ``exit_code`` attribute.
"""


class ToolkitError(Exception):
    exit_code = 3


class SpecError(ToolkitError):
    """The metric spec (or a point argument) is unusable for the request."""

    exit_code = 2


class InvalidSpec(SpecError):
    pass


class NonPositiveMetric(SpecError):
    pass


class IncompleteMetric(SpecError):
    """alpha = 0: no logarithmic boundary blow-up, entropy is undefined."""


class TailTooLarge(SpecError):
    pass


class DomainError(SpecError):
    """Point outside the open unit ball (or outside an operation's domain)."""


class NumericalError(ToolkitError):
    exit_code = 3


class Unconverged(NumericalError):
    pass


class FitRejected(NumericalError):
    pass


class DegenerateDecay(NumericalError):
    pass


class NoBracket(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class WindowTooShort(NumericalError):
    pass
