"""Exception taxonomy; the CLI maps these onto exit codes."""


class ExpwalkError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(ExpwalkError):
    """Bad argument, malformed file, or violated precondition (exit 2)."""


class OutOfHypothesisError(ExpwalkError):
    """Input outside the hypotheses of the checked statement (exit 2)."""


class GenerationFailureError(ExpwalkError):
    """Randomized construction exhausted its rejection budget (exit 3)."""


class NumericFailureError(ExpwalkError):
    """An iterative numeric routine failed to converge (exit 3)."""


class ResourceBudgetError(ExpwalkError):
    """A computation would exceed its configured memory budget (exit 4)."""


class TheoremViolationError(ExpwalkError):
    """A guaranteed inequality failed; indicates a bug, not bad input (exit 1)."""
