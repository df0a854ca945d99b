"""Exception hierarchy shared across the package."""

from __future__ import annotations


class AugmentError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(AugmentError):
    """A problem with corpus data or corpus files."""


class MismatchedLineCount(CorpusError):
    """The two sides of a bitext have different line counts."""

    def __init__(self, count_l1: int, count_l2: int):
        super().__init__(f"line count mismatch: {count_l1} vs {count_l2}")
        self.count_l1 = count_l1
        self.count_l2 = count_l2


class EncodingError(CorpusError):
    """A corpus file is not valid UTF-8."""


class BlankSegment(CorpusError):
    """A segment is empty (after trimming) on either side."""

    def __init__(self, line: int, side: str = ""):
        detail = f" on {side}" if side else ""
        super().__init__(f"blank segment at line {line}{detail}")
        self.line = line
        self.side = side


class IoError(CorpusError):
    """Reading or writing a corpus file failed."""


class InvariantViolation(CorpusError):
    """A corpus handed to a writer breaks a format invariant."""


class EmptyCorpus(CorpusError):
    """An operation requires at least one segment pair."""


class BackendError(AugmentError):
    """An inference backend call failed."""


class BackendUnavailable(BackendError):
    """The inference backend cannot be reached."""


class MalformedMaskInput(BackendError):
    """A fill-mask request does not contain exactly one mask sentinel."""


class DimensionMismatch(AugmentError):
    """Two vectors of different dimensions were combined."""


class RunAborted(AugmentError):
    """A pipeline run exceeded its failure tolerance and stopped."""
