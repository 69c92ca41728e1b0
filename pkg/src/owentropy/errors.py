"""Exception hierarchy shared by all modules."""


class OWEntropyError(Exception):
    """Base class; ``code`` is the machine-readable tag printed by the CLI."""

    code = "error"


class GroupMismatch(OWEntropyError, ValueError):
    code = "group-mismatch"


class InvalidElement(OWEntropyError, ValueError):
    code = "invalid-element"


class PrecisionError(OWEntropyError, ArithmeticError):
    """A p-adic value left the configured valuation window."""

    code = "precision"


class UnsupportedGeometry(OWEntropyError, NotImplementedError):
    code = "unsupported-geometry"


class CoverageError(OWEntropyError):
    """Enumeration bound too small to certify a complete point set."""

    code = "coverage-not-certified"

    def __init__(self, message, suggested_bound=None):
        super().__init__(message)
        self.suggested_bound = suggested_bound


class BudgetExceeded(OWEntropyError):
    code = "budget-exceeded"

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class EvaluationError(OWEntropyError):
    """Wraps a failure of a set function at a given sequence index."""

    code = "evaluation-failed"

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
