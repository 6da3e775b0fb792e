"""Shared exception types."""


class RankforgeError(Exception):
    """Base class for all library errors."""


class InputError(RankforgeError):
    """Malformed or inconsistent user input (bad field, bad JSON, dimension mismatch)."""


class NotAdmissibleError(InputError):
    """The field does not support the requested multiplicative subgroup or character setup."""


class BudgetExceededError(RankforgeError):
    """An operation refused to run because its estimated cost exceeds the budget."""

    def __init__(self, estimate: int, limit: int, what: str = ""):
        self.estimate = estimate
        self.limit = limit
        self.what = what
        msg = f"estimated {estimate} steps exceeds budget {limit}"
        if what:
            msg = f"{what}: {msg}"
        super().__init__(msg)


class VerificationError(RankforgeError):
    """An exact re-verification of a computed object failed; indicates a bug or bad input."""
