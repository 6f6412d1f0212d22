"""Historical event-year records in a small CSV format.

Format::

    # comment lines and blank lines are ignored
    year,label
    1889,Russian flu
    1900,

The header must be exactly ``year,label``. The label is everything after the
first comma and may be empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .stats import InterarrivalSample, intervals_from_years

__all__ = [
    "HEADER",
    "DEFAULT_ORIGIN",
    "HistoricalRecord",
    "RecordError",
    "parse_records",
    "serialize_records",
    "load_records",
    "example_records_text",
    "to_sample",
]

HEADER = "year,label"
DEFAULT_ORIGIN = 1700


class RecordError(ValueError):
    """A rejected record file. ``reason`` is a stable machine-readable code."""

    def __init__(self, reason: str, message: str, line: int, column: int = 1):
        self.reason = reason
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message} [{reason}]")


@dataclass(frozen=True)
class HistoricalRecord:
    events: tuple[int, ...] = ()
    labels: tuple[str | None, ...] = ()
    origin_year: int = DEFAULT_ORIGIN

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        labels = tuple(self.labels) if self.labels else (None,) * len(self.events)
        if len(labels) != len(self.events):
            raise ValueError("labels and events differ in length")
        object.__setattr__(self, "labels", labels)
        for a, b in zip(self.events, self.events[1:]):
            if b <= a:
                raise ValueError(f"event years must be strictly increasing: {a} then {b}")
        if self.events and self.events[0] < self.origin_year:
            raise ValueError(f"event year {self.events[0]} precedes origin {self.origin_year}")


def parse_records(text: str, origin_year: int = DEFAULT_ORIGIN) -> HistoricalRecord:
    events: list[int] = []
    labels: list[str | None] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if not seen_header:
            if line != HEADER:
                raise RecordError("bad-header", f"expected header {HEADER!r}, got {line!r}", lineno)
            seen_header = True
            continue

        year_text, sep, label = line.partition(",")
        try:
            year = int(year_text.strip())
        except ValueError:
            raise RecordError("bad-year", f"not an integer year: {year_text!r}", lineno) from None
        if year < origin_year:
            raise RecordError(
                "before-origin", f"year {year} precedes origin {origin_year}", lineno
            )
        if events and year == events[-1]:
            raise RecordError("duplicate-year", f"year {year} repeated", lineno)
        if events and year < events[-1]:
            raise RecordError(
                "decreasing-year", f"year {year} comes after {events[-1]}", lineno
            )
        events.append(year)
        labels.append(label if sep and label else None)

    if not seen_header and text.strip():
        raise RecordError("bad-header", f"missing header {HEADER!r}", 1)
    return HistoricalRecord(tuple(events), tuple(labels), origin_year)


def serialize_records(record: HistoricalRecord) -> str:
    lines = [HEADER]
    for year, label in zip(record.events, record.labels):
        if label and label.splitlines() != [label]:
            raise ValueError(f"label for {year} contains a line break")
        lines.append(f"{year},{label or ''}")
    return "\n".join(lines) + "\n"


def load_records(path: str | Path, origin_year: int = DEFAULT_ORIGIN) -> HistoricalRecord:
    return parse_records(Path(path).read_text(encoding="utf-8"), origin_year)


def example_records_text() -> str:
    """The bundled illustrative record file (not an authoritative pandemic list)."""
    return resources.files(__package__).joinpath("data/example_pandemics.csv").read_text("utf-8")


def to_sample(record: HistoricalRecord) -> InterarrivalSample:
    if len(record.events) < 2:
        raise ValueError(f"need at least two events, record has {len(record.events)}")
    return intervals_from_years(record.events)
