"""Exception hierarchy.

Every error carries a stable ``exit_code`` used by the command line tool, so
that scripts can tell error classes apart without parsing messages.
"""

from __future__ import annotations


class InkageError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


# capture / recording validation ------------------------------------------------


class RecordingError(InkageError, ValueError):
    exit_code = 6


class NonMonotonicTime(RecordingError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"timestamp decreases at sample {index}")


class FieldOutOfRange(RecordingError):
    def __init__(self, index: int, field: str, value: object = None):
        self.index = index
        self.field = field
        self.value = value
        super().__init__(f"sample {index}: {field}={value!r} out of range")


class TooShort(RecordingError):
    """Too few samples for the operation (recordings, signals, correlations)."""

    def __init__(self, message: str = "at least 2 samples required"):
        super().__init__(message)


class NoPenDownSamples(RecordingError):
    def __init__(self, message: str = "recording has no pen-down samples"):
        super().__init__(message)


class CountMismatch(RecordingError):
    def __init__(self, declared: int, actual: int):
        self.declared = declared
        self.actual = actual
        super().__init__(f"header declares {declared} samples, found {actual}")


class MalformedLine(RecordingError):
    def __init__(self, line: int, reason: str = ""):
        self.line = line
        self.reason = reason
        msg = f"malformed line {line}"
        super().__init__(f"{msg}: {reason}" if reason else msg)


# metadata / corpus ------------------------------------------------------------


class MetadataError(InkageError, ValueError):
    exit_code = 7


class BadHeader(MetadataError):
    pass


class BadAge(MetadataError):
    def __init__(self, row: int, value: object = None):
        self.row = row
        super().__init__(f"row {row}: invalid age {value!r}")


class BadRow(MetadataError):
    def __init__(self, row: int, reason: str):
        self.row = row
        super().__init__(f"row {row}: {reason}")


class DuplicateWriter(MetadataError):
    def __init__(self, writer_id: str, session: int):
        self.writer_id = writer_id
        self.session = session
        super().__init__(f"duplicate metadata for {writer_id} session {session}")


class UnmatchedFile(InkageError):
    exit_code = 8

    def __init__(self, path: object):
        self.path = path
        super().__init__(f"no metadata row for capture file {path}")


class EmptyCorpus(InkageError):
    exit_code = 3


# signal processing ------------------------------------------------------------


class SignalError(InkageError, ValueError):
    exit_code = 1


class ZeroTimeSpan(SignalError):
    pass


class EmptySignal(SignalError):
    pass


class ZeroDuration(SignalError):
    pass


# statistics ------------------------------------------------------------------


class StatsError(InkageError, ValueError):
    exit_code = 1


class ZeroVariance(StatsError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"sequence {which} has zero variance")


class LengthMismatch(StatsError):
    pass


class EmptyInput(StatsError):
    pass


class TooFewWriters(InkageError):
    exit_code = 4


class UnknownFeature(InkageError, KeyError):
    exit_code = 5

    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unknown feature {self.name!r}"


# synthesis / io --------------------------------------------------------------


class BadSpec(InkageError, ValueError):
    exit_code = 9


class IoFailure(InkageError, OSError):
    exit_code = 10
