"""Exception hierarchy shared across the package.

Every error that originates from bad input derives from :class:`InputError`
so the CLI can map it to exit status 2 in one place.
"""


class SkCollapseError(Exception):
    """Base class for all package errors."""


class InputError(SkCollapseError):
    """Invalid user input. ``location`` points at the offending item."""

    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f"{message} (at {location})"
        super().__init__(message)


class ShapeError(InputError, ValueError):
    pass


class ConstraintError(InputError, ValueError):
    pass


class ParseError(InputError):
    pass


class SchemaError(InputError):
    pass


class ModelError(InputError):
    """A model violates one of its mathematical invariants."""


class DomainError(ModelError):
    """A point lies outside the region where a structure is valid.

    ``min_eigenvalue`` is filled in when the failure is a Siegel check.
    """

    def __init__(self, message, location=None, min_eigenvalue=None):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(message, location)


class ChartError(DomainError):
    pass


class DegenerateModelError(DomainError):
    pass


class NotQuasiUnipotentError(ModelError):
    pass


class PolarizationIncompatibilityError(ModelError):
    pass


class SuiteError(InputError):
    """Unknown suite or a model whose type does not fit the suite."""


class ResolutionError(SkCollapseError):
    pass


class ConnectivityError(SkCollapseError):
    pass


class SingularPathError(SkCollapseError):
    pass
