"""Exact computations around Ornstein-Weiss limits and topological entropy
of actions of amenable groups: Van Hove sequences, cut-and-project model
sets, subshift covering numbers and the identities relating them."""

from . import cps, dynamics, entropy, groups
from .algebraic import SQRT5, TAU, Sqrt5
from .cps import *  # noqa: F401,F403
from .dynamics import *  # noqa: F401,F403
from .entropy import *  # noqa: F401,F403
from .errors import (
    BudgetExceeded,
    CoverageError,
    EvaluationError,
    GroupMismatch,
    InvalidElement,
    OWEntropyError,
    PrecisionError,
    UnsupportedGeometry,
)
from .groups import *  # noqa: F401,F403

__version__ = "0.1.0"
