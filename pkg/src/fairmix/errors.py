"""Exception types shared across the package."""


class FairmixError(Exception):
    """Base class for all errors raised by this package."""


class DataFormatError(FairmixError):
    """A CSV or JSON input violates its declared format.

    Messages include the 1-based row number where applicable.
    """


class CompatibilityError(FairmixError):
    """A classifier or ensemble was applied to data it is not bound to."""
