"""Exception and warning types shared across the toolkit."""


class SessionTreeError(Exception):
    """Base class for data errors raised by the toolkit."""


class MalformedLine(SessionTreeError, ValueError):
    def __init__(self, message, line=None, lineno=None):
        self.line = line
        self.lineno = lineno
        where = f" (line {lineno})" if lineno is not None else ""
        super().__init__(f"{message}{where}")


class NonPositiveLogArgument(SessionTreeError, ArithmeticError):
    """The logarithm in the subtree weight received an argument <= 0.

    ``path`` lists child indices from the node passed to the weight function
    down to the offending node.
    """

    def __init__(self, path, argument):
        self.path = tuple(path)
        self.argument = argument
        super().__init__(
            f"log argument {argument!r} <= 0 at node path {list(self.path)}"
        )


class CombinatorialBudgetExceeded(SessionTreeError, RuntimeError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(
            f"matching enumeration exceeded the budget of {budget} evaluated "
            "matchings; raise the budget or enable the greedy fallback"
        )


class EmptyTree(SessionTreeError, ValueError):
    pass


class NoSamples(SessionTreeError, ValueError):
    pass


class ParseError(SessionTreeError, ValueError):
    pass


class InvariantViolation(SessionTreeError, ValueError):
    pass


class MonotonicityWarning(UserWarning):
    """Edge weights increase along a root-to-leaf path."""


class OverlapWarning(UserWarning):
    """A fixation fell inside more than one AOI."""
