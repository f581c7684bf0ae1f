"""Exception hierarchy shared by all mwarp modules."""


class MwarpError(Exception):
    """Base class for all library errors."""


class CutLocusError(MwarpError):
    """A log map or parallel transport was requested at or near the cut locus.

    Carries an optional ``index`` identifying the offending trajectory sample.
    """

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (sample index {index})"
        super().__init__(message)
        self.index = index


class MismatchedReferenceError(MwarpError):
    """Two TSRVFs with different reference points were combined."""


class DegenerateCurveError(MwarpError):
    """A planar curve has (near-)vanishing derivative after resampling."""


class ConvergenceError(MwarpError):
    """An iterative solver exhausted its iteration budget."""


class ParseError(MwarpError):
    """An input file could not be parsed; carries the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyTrackError(MwarpError):
    """A declared track contains no usable observations."""


class InsufficientDataError(MwarpError):
    """Not enough samples to fit the requested statistical object."""
