"""Exception types shared across the package.

Keeping these in one tiny module avoids circular imports: every other
module may raise them, and the CLI maps them onto exit codes.
"""

from __future__ import annotations


class DomainError(ValueError):
    """Raised when an input is outside the mathematical domain of an operation.

    Examples: a non square overlap matrix, a negative entry, k below the
    minimum supported value for an asymptotic profile, or a quantity whose
    logarithm is requested at zero.
    """


class BudgetError(RuntimeError):
    """Raised when an exact enumeration would exceed its configured budget.

    Callers that can fall back to a randomized method should catch this and
    switch strategies; callers that cannot should surface it to the user.
    """
