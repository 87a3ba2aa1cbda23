"""Exception types shared across the package."""


class SylpermError(Exception):
    """Base class for all errors raised by sylperm."""


class SizeLimitError(SylpermError, ValueError):
    """An input exceeds a configured size guard."""


class BudgetError(SizeLimitError):
    """An exhaustive sweep would visit more objects than the budget allows."""


class DimensionError(SylpermError, ValueError):
    """Operands have incompatible shapes."""
