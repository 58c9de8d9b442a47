"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NotIntegrableError(ArithmeticError):
    """A tail integral diverges (e.g. the mean excess of a heavy tail)."""


class ScenarioError(ValueError):
    """A scenario file or CLI override is malformed."""


class TableFormatError(ValueError):
    """A CSV table (tabulated d.f. or discrete mixing law) has a bad row."""
