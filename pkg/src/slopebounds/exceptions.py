"""Exception hierarchy shared by every module of the package."""


class SlopeBoundsError(Exception):
    """Base class for all package errors."""


class InvalidInput(SlopeBoundsError, ValueError):
    pass


class RankDeficient(SlopeBoundsError, ValueError):
    """A column is numerically in the span of the preceding columns."""

    def __init__(self, label, message=None):
        self.label = label
        super().__init__(message or f"column {label!r} is linearly dependent on earlier columns")


class DegenerateInput(SlopeBoundsError, ValueError):
    pass


class DegenerateExplanatory(DegenerateInput):
    pass


class ColumnNotFound(SlopeBoundsError, KeyError):
    def __init__(self, label):
        self.label = label
        super().__init__(label)

    def __str__(self):
        return f"column {self.label!r} not found"


class TooFewRows(SlopeBoundsError, ValueError):
    pass


class DataFileError(SlopeBoundsError, OSError):
    pass


class NodeBudgetExceeded(SlopeBoundsError, RuntimeError):
    """Raised when a search hits its node cap.

    ``partial`` holds the :class:`~slopebounds.search.SearchResult` accumulated
    so far (``None`` when the cap was rejected before any work was done).
    """

    def __init__(self, message, partial=None):
        self.partial = partial
        super().__init__(message)
