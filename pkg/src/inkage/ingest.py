"""Capture file and writer metadata I/O.

Capture files (``.svc``) hold a sample count on the first line followed by one
line per sample with seven space separated integers::

    X Y T S AZ AL P

Metadata is a CSV file with the header ``writer_id,age,sex,session``.
"""

from __future__ import annotations

import csv
import io
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Literal, Mapping, Union

import numpy as np

from .capture import COLUMNS, Recording, Sex, WriterMeta, validate_recording
from .errors import (
    BadAge,
    BadHeader,
    BadRow,
    CountMismatch,
    DuplicateWriter,
    EmptyCorpus,
    FieldOutOfRange,
    IoFailure,
    MalformedLine,
    UnmatchedFile,
)

CAPTURE_SUFFIX = ".svc"
METADATA_HEADER = ("writer_id", "age", "sex", "session")
AGE_RANGE = (1, 130)

_INT = re.compile(r"[+-]?[0-9]+")
_CAPTURE_NAME = re.compile(r"^(?P<writer>.+)_s(?P<session>[0-9]+)\.svc$")
_INT64 = np.iinfo(np.int64)

Source = Union[str, bytes, IO[str], IO[bytes]]


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()  # type: ignore[union-attr]
    if isinstance(source, bytes):
        try:
            return source.decode("ascii")
        except UnicodeDecodeError as exc:
            line = source.count(b"\n", 0, exc.start) + 1
            raise MalformedLine(line, "non-ASCII byte") from None
    return source  # type: ignore[return-value]


def _lines(text: str) -> list[str]:
    lines = text.split("\n")
    # a single terminating newline does not start a new line
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _parse_int(token: str, line: int) -> int:
    if not _INT.fullmatch(token):
        raise MalformedLine(line, f"not a decimal integer: {token[:20]!r}")
    return int(token)


def parse_capture(source: Source, writer_id: str = "", task_id: str = "") -> Recording:
    """Parse a capture file into a validated :class:`Recording`.

    Accepts text, ASCII bytes or an open file. Tokens may be separated by any
    run of spaces or tabs; :func:`write_capture` always emits single spaces.
    Line numbers in errors are 1-based and count the header as line 1.
    """
    lines = _lines(_read_text(source))
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MalformedLine(1, "missing sample count")
    header = lines[0].split()
    if len(header) != 1:
        raise MalformedLine(1, "expected a single sample count")
    declared = _parse_int(header[0], 1)
    if declared < 0:
        raise MalformedLine(1, "negative sample count")

    body = lines[1:]
    if len(body) != declared:
        raise CountMismatch(declared, len(body))

    rows = []
    for offset, text in enumerate(body):
        lineno = offset + 2
        tokens = text.split()
        if len(tokens) != 7:
            raise MalformedLine(lineno, f"expected 7 fields, got {len(tokens)}")
        row = [_parse_int(tok, lineno) for tok in tokens]
        for col, value in enumerate(row):
            if not _INT64.min <= value <= _INT64.max:
                raise FieldOutOfRange(offset, COLUMNS[col], value)
        rows.append(row)

    data = np.array(rows, dtype=np.int64).reshape(-1, 7)
    return validate_recording(Recording(data, writer_id, task_id))


def write_capture(rec: Recording) -> str:
    """Serialize a recording in canonical form (single spaces, trailing newline)."""
    validate_recording(rec)
    out = io.StringIO()
    out.write(f"{len(rec)}\n")
    for row in rec.data.tolist():
        out.write(" ".join(map(str, row)))
        out.write("\n")
    return out.getvalue()


def read_capture_file(path: str | os.PathLike[str], writer_id: str = "", task_id: str = "") -> Recording:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror}") from exc
    return parse_capture(raw, writer_id, task_id)


def write_capture_file(path: str | os.PathLike[str], rec: Recording) -> None:
    try:
        Path(path).write_bytes(write_capture(rec).encode("ascii"))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror}") from exc


def parse_metadata(source: Source) -> list[WriterMeta]:
    """Parse the writer metadata CSV.

    Row numbers in errors are 1-based data rows (the header is row 0).
    """
    text = _read_text(source)
    try:
        table = list(csv.reader(io.StringIO(text)))
    except csv.Error as exc:
        raise BadHeader(f"unreadable CSV: {exc}") from None
    if not table:
        raise BadHeader("empty metadata file")
    header, body = table[0], table[1:]
    if tuple(h.strip() for h in header) != METADATA_HEADER:
        raise BadHeader(f"expected header {','.join(METADATA_HEADER)!r}, got {','.join(header)!r}")

    seen: set[tuple[str, int]] = set()
    records = []
    for row_no, row in enumerate(body, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise BadRow(row_no, f"expected 4 columns, got {len(row)}")
        writer_id, age_s, sex_s, session_s = (cell.strip() for cell in row)
        if not writer_id:
            raise BadRow(row_no, "empty writer_id")
        if not _INT.fullmatch(age_s) or not AGE_RANGE[0] <= int(age_s) <= AGE_RANGE[1]:
            raise BadAge(row_no, age_s)
        try:
            sex = Sex(sex_s.upper())
        except ValueError:
            raise BadRow(row_no, f"sex must be M, F or U, got {sex_s!r}") from None
        if not _INT.fullmatch(session_s) or int(session_s) < 0:
            raise BadRow(row_no, f"invalid session {session_s!r}")
        key = (writer_id, int(session_s))
        if key in seen:
            raise DuplicateWriter(*key)
        seen.add(key)
        records.append(WriterMeta(writer_id, int(age_s), sex, int(session_s)))
    return records


def write_metadata(records: Iterable[WriterMeta]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(METADATA_HEADER)
    for m in records:
        writer.writerow((m.writer_id, m.age, m.sex.value, m.session))
    return out.getvalue()


def read_metadata_file(path: str | os.PathLike[str]) -> list[WriterMeta]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_metadata(raw.decode("utf-8"))
    except UnicodeDecodeError:
        raise BadHeader(f"{path} is not UTF-8 text") from None


@dataclass(frozen=True)
class CorpusEntry:
    writer_id: str
    age: int
    sex: Sex
    session: int
    path: Path

    @property
    def key(self) -> str:
        return f"{self.writer_id}_s{self.session}"

    @property
    def meta(self) -> WriterMeta:
        return WriterMeta(self.writer_id, self.age, self.sex, self.session)


@dataclass(frozen=True)
class CorpusIndex:
    entries: tuple[CorpusEntry, ...]
    source_dir: Path
    warnings: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.entries)


def scan_corpus(
    directory: str | os.PathLike[str],
    meta: Iterable[WriterMeta] | Mapping[tuple[str, int], WriterMeta],
    mode: Literal["strict", "lenient"] = "lenient",
) -> CorpusIndex:
    """Match ``<writer_id>_s<session>.svc`` files against metadata rows.

    Files are not parsed here. Entries are ordered by ``(writer_id, session)``.
    In strict mode the first unmatched file (in name order) raises
    :class:`UnmatchedFile`; in lenient mode it is recorded as a warning.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"mode must be 'strict' or 'lenient', not {mode!r}")
    source = Path(directory)
    if isinstance(meta, Mapping):
        table = dict(meta)
    else:
        table = {(m.writer_id, m.session): m for m in meta}
    try:
        files = sorted(p for p in source.iterdir() if p.suffix == CAPTURE_SUFFIX and p.is_file())
    except OSError as exc:
        raise IoFailure(f"cannot list {source}: {exc.strerror}") from exc
    if not files:
        raise EmptyCorpus(f"no {CAPTURE_SUFFIX} files in {source}")

    entries = []
    warnings = []
    for path in files:
        match = _CAPTURE_NAME.match(path.name)
        m = table.get((match["writer"], int(match["session"]))) if match else None
        if m is None:
            if mode == "strict":
                raise UnmatchedFile(path)
            msg = f"skipping {path.name}: no matching metadata row"
            warnings.append(msg)
            continue
        entries.append(CorpusEntry(m.writer_id, m.age, m.sex, m.session, path))
    entries.sort(key=lambda e: (e.writer_id, e.session))
    return CorpusIndex(tuple(entries), source, tuple(warnings))
