"""Exception types raised by the optimizers and the experiment layer."""


class NomaError(Exception):
    """Base class for all package errors."""


class DomainError(NomaError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateChannelError(NomaError):
    """A channel realization has a zero or non-finite gain and must be redrawn."""


class BudgetExceededError(NomaError):
    """The minimum power needed for the requested rate exceeds the power budget."""

    def __init__(self, required, budget, message=None):
        self.required = required
        self.budget = budget
        super().__init__(message or f"required power {required:.6g} W exceeds budget {budget:.6g} W")


class BracketError(NomaError):
    """A search bracket does not contain the sought root or interior maximizer."""


class ConvergenceError(NomaError):
    """An iterative method ran out of iterations; ``trace`` holds what it did."""

    def __init__(self, message, trace=None):
        self.trace = trace or []
        super().__init__(message)


class ConfigError(NomaError, ValueError):
    """Invalid experiment configuration, optionally tied to a source line."""

    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
