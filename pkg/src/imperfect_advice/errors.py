class DomainError(ValueError):
    """An argument lies outside the domain where a formula or game is defined."""


class BudgetInsufficient(DomainError):
    """The query budget cannot guarantee the requested identification."""
