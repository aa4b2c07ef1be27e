"""In-memory model of online handwriting recordings.

A :class:`Recording` keeps its samples in a read-only ``(N, 7)`` int64 array
with columns ``x, y, t, pen_down, azimuth, altitude, pressure`` (the capture
file column order). Individual rows are exposed as :class:`Sample` objects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import FieldOutOfRange, NoPenDownSamples, NonMonotonicTime, TooShort

COLUMNS = ("x", "y", "t", "pen_down", "azimuth", "altitude", "pressure")
X, Y, T, PEN, AZ, AL, P = range(7)

AZIMUTH_MAX = 3599
ALTITUDE_MAX = 900
PRESSURE_MAX = 1024
_INT64_MAX = np.iinfo(np.int64).max
_INT64_MIN = np.iinfo(np.int64).min

# (column, low, high) in the order fields are reported on validation failure
_BOUNDS = (
    (X, 0, _INT64_MAX),
    (Y, 0, _INT64_MAX),
    (T, _INT64_MIN, _INT64_MAX),
    (PEN, 0, 1),
    (AZ, 0, AZIMUTH_MAX),
    (AL, 0, ALTITUDE_MAX),
    (P, 0, PRESSURE_MAX),
)


@dataclass(frozen=True)
class Sample:
    """One tablet observation.

    Units: tablet units for ``x``/``y``, milliseconds for ``t``, tenths of a
    degree for ``azimuth``/``altitude`` and raw device units for ``pressure``.
    """

    x: int
    y: int
    t: int
    pen_down: bool
    azimuth: int
    altitude: int
    pressure: int

    def as_row(self) -> tuple[int, ...]:
        return (self.x, self.y, self.t, int(self.pen_down), self.azimuth, self.altitude, self.pressure)


def _frozen(data: np.ndarray) -> np.ndarray:
    data = np.array(data, dtype=np.int64, copy=True).reshape(-1, 7)
    data.setflags(write=False)
    return data


@dataclass(frozen=True, eq=False)
class Recording:
    """Ordered samples of one writer performing one task."""

    data: np.ndarray
    writer_id: str = ""
    task_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "data", _frozen(self.data))

    @classmethod
    def from_samples(cls, samples: Iterable[Sample], writer_id: str = "", task_id: str = "") -> Recording:
        rows = [s.as_row() for s in samples]
        return cls(np.array(rows, dtype=np.int64).reshape(-1, 7), writer_id, task_id)

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, i: int) -> Sample:
        x, y, t, pen, az, al, p = (int(v) for v in self.data[i])
        return Sample(x, y, t, bool(pen), az, al, p)

    def __iter__(self) -> Iterator[Sample]:
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Recording):
            return NotImplemented
        return (
            self.writer_id == other.writer_id
            and self.task_id == other.task_id
            and np.array_equal(self.data, other.data)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def samples(self) -> tuple[Sample, ...]:
        return tuple(self)

    @property
    def x(self) -> np.ndarray:
        return self.data[:, X]

    @property
    def y(self) -> np.ndarray:
        return self.data[:, Y]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, T]

    @property
    def pen_down(self) -> np.ndarray:
        return self.data[:, PEN].astype(bool)

    @property
    def azimuth(self) -> np.ndarray:
        return self.data[:, AZ]

    @property
    def altitude(self) -> np.ndarray:
        return self.data[:, AL]

    @property
    def pressure(self) -> np.ndarray:
        return self.data[:, P]

    def with_data(self, data: np.ndarray) -> Recording:
        return Recording(data, self.writer_id, self.task_id)


class Sex(str, enum.Enum):
    MALE = "M"
    FEMALE = "F"
    UNSPECIFIED = "U"


@dataclass(frozen=True)
class WriterMeta:
    writer_id: str
    age: int
    sex: Sex = Sex.UNSPECIFIED
    session: int = 1

    @property
    def key(self) -> str:
        """Identifier shared with the capture file stem, ``<writer_id>_s<session>``."""
        return f"{self.writer_id}_s{self.session}"


class StrokeKind(str, enum.Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True, eq=False)
class Stroke:
    """Maximal run of samples sharing one pen status.

    ``start``/``stop`` are half-open indices into the parent recording and
    ``data`` is the matching read-only view of its sample array.
    """

    kind: StrokeKind
    start: int
    stop: int
    data: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return self.stop - self.start

    @property
    def duration_ms(self) -> int:
        return int(self.data[-1, T] - self.data[0, T])

    @property
    def duration(self) -> float:
        """Duration in seconds, from this stroke's own first and last timestamps."""
        return self.duration_ms / 1000.0

    @property
    def x(self) -> np.ndarray:
        return self.data[:, X]

    @property
    def y(self) -> np.ndarray:
        return self.data[:, Y]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, T]

    @property
    def pressure(self) -> np.ndarray:
        return self.data[:, P]


def validate_recording(rec: Recording) -> Recording:
    """Return ``rec`` unchanged if it is analyzable, else raise.

    Checks run in this order: length, then per-sample field ranges and time
    ordering (the lowest offending index wins; within one sample, fields are
    reported in column order before time ordering), then the presence of at
    least one pen-down sample.
    """
    data = rec.data
    n = data.shape[0]
    if n < 2:
        raise TooShort(f"recording has {n} samples, at least 2 required")

    first_bad = n
    bad_field: tuple[str, int] | None = None
    for col, lo, hi in _BOUNDS:
        column = data[:, col]
        mask = (column < lo) | (column > hi)
        if mask.any():
            i = int(np.argmax(mask))
            if i < first_bad:
                first_bad, bad_field = i, (COLUMNS[col], int(column[i]))
    backwards = np.flatnonzero(np.diff(data[:, T]) < 0)
    if backwards.size and backwards[0] + 1 < first_bad:
        raise NonMonotonicTime(int(backwards[0]) + 1)
    if bad_field is not None:
        raise FieldOutOfRange(first_bad, bad_field[0], bad_field[1])

    if not data[:, PEN].any():
        raise NoPenDownSamples()
    return rec


def trimmed_bounds(pen_down: Sequence[bool] | np.ndarray) -> tuple[int, int]:
    """Half-open index range from the first to the last pen-down sample."""
    down = np.flatnonzero(np.asarray(pen_down, dtype=bool))
    if down.size == 0:
        raise NoPenDownSamples()
    return int(down[0]), int(down[-1]) + 1


def segment_strokes(rec: Recording) -> list[Stroke]:
    """Split a recording into alternating down and up strokes.

    In-air samples before the first and after the last pen-down sample are
    dropped, so the result always starts and ends with a down stroke.
    """
    pen = rec.data[:, PEN]
    lo, hi = trimmed_bounds(pen)
    trimmed = pen[lo:hi]
    edges = np.flatnonzero(np.diff(trimmed)) + 1 + lo
    starts = np.concatenate(([lo], edges))
    stops = np.concatenate((edges, [hi]))
    return [
        Stroke(
            StrokeKind.DOWN if pen[a] else StrokeKind.UP,
            int(a),
            int(b),
            rec.data[a:b],
        )
        for a, b in zip(starts, stops)
    ]
