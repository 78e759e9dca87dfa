"""Exception types shared across the library.

The CLI maps these onto exit codes: ValidationError -> 2, DomainError -> 3,
OSError -> 4.
"""


class CavityFallError(ValueError):
    """Base class for all library errors."""


class ValidationError(CavityFallError):
    """Invalid parameter, configuration, or scenario input."""


class DomainError(CavityFallError):
    """Input outside a model's validity domain, or a numerical failure
    (weak-field violation, relativistic envelope velocity, unresolved grid,
    domain escape, blowup, bracket violation)."""
