"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class SymmetryError(DomainError):
    """A state expected to be permutation (anti)symmetric is not."""


class BudgetError(DomainError):
    """A requested computation exceeds the configured size budget."""
