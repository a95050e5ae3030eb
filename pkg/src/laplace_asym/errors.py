"""Exception hierarchy.

Errors fall into three groups that the CLI maps onto exit codes:

* input/validation problems (``LaplaceError`` and most subclasses) -> 2
* failures of the leading-order hypotheses (``HypothesisError``) -> 3
* a remainder-rate fit that does not pass is reported, not raised -> 4
"""


class LaplaceError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LaplaceError, ValueError):
    def __init__(self, message, position):
        self.message = message
        self.position = position
        super().__init__(f"{message} (at position {position})")


class EvaluationError(LaplaceError, ArithmeticError):
    """An expression could not be evaluated to a finite real."""


class DomainError(EvaluationError):
    """Argument outside the domain of an operation (log, sqrt, division, power)."""

    def __init__(self, message, node=None):
        self.node = node
        if node is not None:
            from .expr import to_text

            message = f"{message} in {to_text(node)}"
        super().__init__(message)


class NonSmoothError(LaplaceError):
    """Expression contains a non-differentiable node (abs)."""


class OrderLimitError(LaplaceError, ValueError):
    pass


class HypothesisError(LaplaceError):
    """A hypothesis of the leading-order result does not hold."""

    hypothesis = "leading-order hypothesis"


class NonUniqueMaxError(HypothesisError):
    hypothesis = "non-unique maximum"


class DegenerateHessianError(HypothesisError):
    hypothesis = "degenerate second derivative h''(c)"


class OddInteriorOrderError(HypothesisError):
    hypothesis = "odd vanishing order at an interior maximum"


class AllDerivativesVanishError(HypothesisError):
    hypothesis = "all derivatives of g vanish at the maximizer"


class NonPositiveTError(LaplaceError, ValueError):
    pass


class OddPanelError(LaplaceError, ValueError):
    pass


class DepthExceededError(LaplaceError):
    def __init__(self, message, interval=None):
        self.interval = interval
        super().__init__(message)


class InsufficientPointsError(LaplaceError):
    pass


class NonPositiveConstantError(LaplaceError, ValueError):
    pass
