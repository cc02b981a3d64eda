"""Exception hierarchy shared by every module."""


class WorkbenchError(Exception):
    """Base class for all errors raised by algworkbench."""


class StructuralError(WorkbenchError):
    """Malformed input (bad converse map, unknown atom id, ...), as opposed to a law violation."""


class BudgetExceeded(WorkbenchError):
    """An enumeration or search hit its configured size budget."""

    def __init__(self, message, size=None, budget=None):
        super().__init__(message)
        self.size = size
        self.budget = budget


class VerificationError(WorkbenchError):
    """An internal cross-check failed. Carries the witness that broke it."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class IllegalMove(WorkbenchError):
    """A scripted strategy produced a move the rules do not allow."""

    def __init__(self, message, rule=None):
        super().__init__(message)
        self.rule = rule
