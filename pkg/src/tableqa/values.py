"""Typed cell values and the recognizer cascade that produces them.

Raw table cells are plain strings; a lot of structure (dates, times,
numbers with units, sports scores) is only implicit.  ``parse_cell`` runs a
fixed cascade of recognizers, most specific first, and falls back to Text.
The recognizer inventory is data-driven: see ``RecognizerConfig`` and the
shipped ``data/recognizers.txt``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5,
    "june": 6, "july": 7, "august": 8, "september": 9, "october": 10,
    "november": 11, "december": 12,
}
MONTHS.update({name[:3]: num for name, num in MONTHS.items()})


@dataclass(frozen=True)
class Empty:
    """Blank or whitespace-only cell."""


@dataclass(frozen=True)
class Text:
    value: str


@dataclass(frozen=True)
class Number:
    value: float
    unit: str | None = None
    surface: str = ""  # original cell string, kept for lookups


@dataclass(frozen=True)
class Date:
    year: int | None = None
    month: int | None = None
    day: int | None = None
    surface: str = ""

    def key(self) -> tuple[int, int, int]:
        """Chronological sort key; missing components sort first."""
        return (self.year or 0, self.month or 0, self.day or 0)


@dataclass(frozen=True)
class Time:
    seconds: float  # seconds of day
    surface: str = ""


@dataclass(frozen=True)
class Score:
    result: str | None  # W/L/T/D when present
    points_for: int
    points_against: int
    surface: str = ""


TypedValue = Empty | Text | Number | Date | Time | Score

DEFAULT_UNITS = ["km/h", "km", "mi", "kg", "lb", "m", "ft", "%"]
DEFAULT_DATE_FORMATS = ["ymd_slash", "ymd_dash", "month_d_year", "d_month_year", "bare_year"]


@dataclass(frozen=True)
class RecognizerConfig:
    score: bool = True
    time: bool = True
    number: bool = True
    date_formats: tuple[str, ...] = tuple(DEFAULT_DATE_FORMATS)
    units: tuple[str, ...] = tuple(DEFAULT_UNITS)

    @classmethod
    def load(cls, path: str | Path) -> "RecognizerConfig":
        """Read the inventory file: one pattern class per line.

        Lines are ``score``, ``time``, ``number``, ``date <format>`` or
        ``unit <suffix>``; blank lines and ``#`` comments are ignored.
        """
        score = time = number = False
        dates: list[str] = []
        units: list[str] = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(None, 1)
            kind = parts[0]
            if kind == "score":
                score = True
            elif kind == "time":
                time = True
            elif kind == "number":
                number = True
            elif kind == "date" and len(parts) == 2:
                dates.append(parts[1].strip())
            elif kind == "unit" and len(parts) == 2:
                units.append(parts[1].strip())
            else:
                raise ValueError(f"unrecognized recognizer line: {raw!r}")
        return cls(score=score, time=time, number=number,
                   date_formats=tuple(dates), units=tuple(units))


DEFAULT_RECOGNIZERS = RecognizerConfig()

_SCORE_LETTER_RE = re.compile(r"^([WLTD])\s+(\d+)\s*[-–]\s*(\d+)$", re.IGNORECASE)
# Letterless scores are capped at 3 digits a side so year ranges survive.
_SCORE_BARE_RE = re.compile(r"^(\d{1,3})\s*[-–]\s*(\d{1,3})$")
_TIME_RE = re.compile(r"^(\d{1,2}):(\d{2})(?::(\d{2}(?:\.\d+)?))?$")
_NUMBER_BODY = r"[+-]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[+-]?\.\d+"
_NUMBER_RE = re.compile(rf"^({_NUMBER_BODY})$")

_DATE_PATTERNS = {
    "ymd_slash": re.compile(r"^(\d{4})/(\d{1,2})/(\d{1,2})$"),
    "ymd_dash": re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$"),
    "month_d_year": re.compile(r"^([A-Za-z]+)\.?\s+(\d{1,2})(?:st|nd|rd|th)?,?\s+(\d{4})$"),
    "d_month_year": re.compile(r"^(\d{1,2})(?:st|nd|rd|th)?\s+([A-Za-z]+)\.?,?\s+(\d{4})$"),
    "bare_year": re.compile(r"^([12]\d{3})$"),
}


def _parse_number_body(text: str) -> float | None:
    if _NUMBER_RE.match(text):
        return float(text.replace(",", ""))
    return None


def _try_score(text: str) -> Score | None:
    m = _SCORE_LETTER_RE.match(text)
    if m:
        return Score(m.group(1).upper(), int(m.group(2)), int(m.group(3)), surface=text)
    m = _SCORE_BARE_RE.match(text)
    if m:
        return Score(None, int(m.group(1)), int(m.group(2)), surface=text)
    return None


def _try_date(text: str, formats: tuple[str, ...]) -> Date | None:
    for fmt in formats:
        pattern = _DATE_PATTERNS.get(fmt)
        if pattern is None:
            continue
        m = pattern.match(text)
        if not m:
            continue
        if fmt == "bare_year":
            return Date(year=int(m.group(1)), surface=text)
        if fmt in ("ymd_slash", "ymd_dash"):
            year, month, day = int(m.group(1)), int(m.group(2)), int(m.group(3))
        elif fmt == "month_d_year":
            month_name = m.group(1).lower()
            if month_name not in MONTHS:
                continue
            year, month, day = int(m.group(3)), MONTHS[month_name], int(m.group(2))
        else:  # d_month_year
            month_name = m.group(2).lower()
            if month_name not in MONTHS:
                continue
            year, month, day = int(m.group(3)), MONTHS[month_name], int(m.group(1))
        if 1 <= month <= 12 and 1 <= day <= 31:
            return Date(year=year, month=month, day=day, surface=text)
    return None


def _try_time(text: str) -> Time | None:
    m = _TIME_RE.match(text)
    if not m:
        return None
    hours, minutes = int(m.group(1)), int(m.group(2))
    seconds = float(m.group(3)) if m.group(3) else 0.0
    if hours > 23 or minutes > 59 or seconds >= 60.0:
        return None
    return Time(seconds=hours * 3600 + minutes * 60 + seconds, surface=text)


def _try_number(text: str, units: tuple[str, ...]) -> Number | None:
    value = _parse_number_body(text)
    if value is not None:
        return Number(value, None, surface=text)
    # number followed by a known unit suffix; longest unit first
    for unit in sorted(units, key=len, reverse=True):
        if text.endswith(unit):
            body = text[: -len(unit)].strip()
            value = _parse_number_body(body)
            if value is not None:
                return Number(value, unit, surface=text)
    return None


def parse_cell(text: str, config: RecognizerConfig = DEFAULT_RECOGNIZERS) -> TypedValue:
    """Recognize the most specific structure in a cell string.

    Cascade order: Score, Date, Time, Number (with optional unit), Text.
    Whitespace-only input yields Empty.  Never raises.
    """
    stripped = text.strip()
    if not stripped:
        return Empty()
    if config.score:
        score = _try_score(stripped)
        if score is not None:
            return score
    date = _try_date(stripped, config.date_formats)
    if date is not None:
        return date
    if config.time:
        time = _try_time(stripped)
        if time is not None:
            return time
    if config.number:
        number = _try_number(stripped, config.units)
        if number is not None:
            return number
    return Text(stripped)


def surface_of(value: TypedValue) -> str:
    """The display string of a typed value."""
    if isinstance(value, Empty):
        return ""
    if isinstance(value, Text):
        return value.value
    if isinstance(value, Number):
        if value.surface:
            return value.surface
        return f"{value.value:g}"
    return value.surface


def numeric_of(value: TypedValue) -> float | None:
    """Numeric magnitude when one exists (Number value or Time seconds)."""
    if isinstance(value, Number):
        return value.value
    if isinstance(value, Time):
        return value.seconds
    return None
