"""Lenient line-oriented parser for GDP advisory texts.

The grammar is documented in docs/advisory-grammar.md. Parsing is total:
once the header line is recognized, every input produces a record. Lines
that match no rule are preserved verbatim in the record's remarks, and
per-line warnings describe anything that looked wrong but was repaired.

Also handles the XML-style envelope format that batches many advisories
into one document.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from typing import Optional
from xml.sax.saxutils import escape, quoteattr

from .model import (
    AdvisoryKind,
    ConditionCategory,
    DelayMode,
    DelayStats,
    GdpRecord,
    ImpactingCondition,
    ProgramRateSchedule,
    Scope,
    TimeWindow,
    record_id,
)


class AdvisoryParseError(ValueError):
    """Raised for token-level failures (bad time token, bad rate segment)."""


class EnvelopeError(ValueError):
    """Raised when an envelope document is structurally malformed."""


@dataclass
class ParseOutcome:
    """Result of parsing one advisory: a record or a fatal, never both."""

    record: Optional[GdpRecord] = None
    warnings: list[tuple[int, str]] = field(default_factory=list)
    fatal: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.record is None) == (self.fatal is None):
            raise ValueError("exactly one of record/fatal must be set")

    @property
    def ok(self) -> bool:
        return self.record is not None


@dataclass(frozen=True)
class EnvelopeEntry:
    text: str
    source_id: Optional[str] = None
    fetched_at: Optional[str] = None


@dataclass(frozen=True)
class EnvelopeDocument:
    entries: tuple[EnvelopeEntry, ...]
    warnings: tuple[str, ...] = ()


# --- header ------------------------------------------------------------------

# "ATCSCC" and the "ATSCC" spelling that appears in the wild are both accepted.
_HEADER_RE = re.compile(
    r"^\s*(?:ATC?SCC\s+)?ADVZY\s+(\d+)\s+([A-Z]{3})/([A-Z0-9]+)\s+"
    r"(\d{1,4}/\d{1,2}/\d{1,4})\s+(.*\S)\s*$",
    re.IGNORECASE,
)

_TIME_RE = re.compile(
    r"^\s*(?:(\d{1,2}):(\d{2})|(\d{3,4}))\s*(?:UTC|Z)?\s*(.*?)\s*$",
    re.IGNORECASE,
)
_DAY_MARKER_RE = re.compile(
    r"^(?:\(?\s*(?:NEXT\s+DAY|\+1\s*DAY)\s*\)?|\(?\s*(?:ON\s+THE\s+)?(\d{1,2})(?:ST|ND|RD|TH)\s*\)?)$",
    re.IGNORECASE,
)

_NUMBER_RE = re.compile(r"[-+]?\d+(?:\.\d+)?")
_QUARTER_HOUR_RE = re.compile(
    r"^(.*?)\s*PER\s+(?:15\s*MIN(?:UTE)?S?|QUARTER\s+HOUR)\s*\.?$", re.IGNORECASE
)
_MODE_RE = re.compile(r"\b(DAS|UDP|GAAP)\b(?:\s+GDP)?\s+MODE\b", re.IGNORECASE)

# Canonical body keys and their tolerated spellings. A line is "KEY: value";
# the key is matched up to the first colon, case-insensitively.
_KEY_ALIASES = {
    "IMPACTING CONDITION": "condition",
    "REASON": "condition",
    "ADL TIME": "adl",
    "ARRIVALS ESTIMATED FOR": "arrivals",
    "ARRIVALS BETWEEN": "arrivals",
    "PROGRAM RATE": "rates",
    "PROGRAM RATES": "rates",
    "MAX DELAY": "max_delay",
    "MAXIMUM DELAY": "max_delay",
    "AVG DELAY": "avg_delay",
    "AVERAGE DELAY": "avg_delay",
    "SCOPE": "scope",
    "DEPARTURE SCOPE": "scope",
    "DELAY ASGMT MODE": "mode",
    "DELAY ASSIGNMENT MODE": "mode",
    "DELAY MODE": "mode",
    "USER UPDATES BEFORE": "deadline",
    "UPDATES MUST BE RECEIVED BY": "deadline",
    "EFFECTIVE TIME": "effective",
    "EFFECTIVE": "effective",
    "RUNWAY CONFIGURATION": "runway",
    "RWY CONFIG": "runway",
}
_KEY_LINE_RE = re.compile(r"^\s*([A-Za-z][A-Za-z ]*?)\s*:\s*(.*?)\s*$")

_WEATHER_KEYWORDS = (
    "wind", "ceiling", "fog", "thunderstorm", "storm", "snow", "rain",
    "ice", "visibility", "wx", "weather",
)


def parse_issue_date(token: str) -> date:
    """Parse a header date: MM/DD/YYYY, MM/DD/YY, or YY/MM/DD shorthand.

    Two-digit years pivot at 70 (70..99 -> 19xx, else 20xx). When every
    component has at most two digits and the first exceeds 12, the token
    is read year-first (e.g. "18/11/15" -> 2018-11-15).
    """
    parts = token.split("/")
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise AdvisoryParseError(f"unrecognized date token: {token!r}")
    a, b, c = (int(p) for p in parts)

    def widen(year: int) -> int:
        if year >= 100:
            return year
        return 1900 + year if year >= 70 else 2000 + year

    try:
        if all(len(p) <= 2 for p in parts) and a > 12:
            return date(widen(a), b, c)
        return date(widen(c), a, b)
    except ValueError as exc:
        raise AdvisoryParseError(f"invalid date {token!r}: {exc}") from exc


def parse_time_token(token: str, context_date: date) -> datetime:
    """Parse "HH:MM"/"HHMM" (optional UTC/Z suffix) against a calendar day.

    A trailing day marker ("(NEXT DAY)", "ON THE 19TH") rolls the date
    forward to the named day.
    """
    m = _TIME_RE.match(token)
    if not m:
        raise AdvisoryParseError(f"unrecognized time token: {token!r}")
    if m.group(1) is not None:
        hour, minute = int(m.group(1)), int(m.group(2))
    else:
        digits = m.group(3)
        hour, minute = int(digits[:-2]), int(digits[-2:])
    if hour > 23 or minute > 59:
        raise AdvisoryParseError(f"time out of range: {token!r}")

    day = context_date
    trailer = m.group(4)
    if trailer:
        dm = _DAY_MARKER_RE.match(trailer)
        if not dm:
            raise AdvisoryParseError(f"unrecognized time token: {token!r}")
        if dm.group(1) is None:
            day = context_date + timedelta(days=1)
        else:
            target = int(dm.group(1))
            for offset in range(32):
                candidate = context_date + timedelta(days=offset)
                if candidate.day == target:
                    day = candidate
                    break
            else:
                raise AdvisoryParseError(f"no day {target} within a month of {context_date}")
    return datetime.combine(day, time(hour, minute), tzinfo=timezone.utc)


def parse_time_pair(start_token: str, end_token: str, context_date: date) -> TimeWindow:
    """Parse a "start - end" pair; an end before its start rolls to the next day."""
    start = parse_time_token(start_token, context_date)
    end = parse_time_token(end_token, context_date)
    if end < start:
        end += timedelta(days=1)
    return TimeWindow(start, end)


def _split_rate_text(s: str) -> tuple[list[str], bool]:
    quarter = False
    m = _QUARTER_HOUR_RE.match(s)
    if m:
        quarter = True
        s = m.group(1)
    return [seg.strip() for seg in s.split("/")], quarter


def parse_rate_string(s: str) -> ProgramRateSchedule:
    """Parse a slash-delimited hourly rate list, e.g. "34/34/38".

    Rates expressed per 15 minutes ("... PER 15 MIN") are converted to
    hourly by multiplying each entry by 4.
    """
    segments, quarter = _split_rate_text(s)
    rates = []
    for i, seg in enumerate(segments):
        if not seg.isdigit():
            raise AdvisoryParseError(f"rate segment {i} is not a number: {seg!r}")
        rates.append(int(seg) * 4 if quarter else int(seg))
    return ProgramRateSchedule(tuple(rates))


def classify_condition(reason_text: str) -> ImpactingCondition:
    """Map a free-text reason to a category plus normalized detail phrase."""
    text = " ".join(reason_text.split())
    if not text:
        return ImpactingCondition(ConditionCategory.OTHER, "")

    detail = text
    for prefix in ("WX:", "WX :", "WEATHER:", "WEATHER :", "WX/", "WEATHER/"):
        if detail.upper().startswith(prefix):
            detail = detail[len(prefix):].strip()
            break
    detail = " ".join(detail.split()).lower()

    lowered = text.lower()
    if any(k in lowered for k in _WEATHER_KEYWORDS):
        return ImpactingCondition(ConditionCategory.WEATHER, detail or lowered)
    if "volume" in lowered:
        return ImpactingCondition(ConditionCategory.VOLUME, detail)
    if "equipment" in lowered or "outage" in lowered:
        return ImpactingCondition(ConditionCategory.EQUIPMENT, detail)
    if "runway" in lowered or "construction" in lowered:
        return ImpactingCondition(ConditionCategory.RUNWAY_CONSTRUCTION, detail)
    return ImpactingCondition(ConditionCategory.OTHER, detail)


def _parse_scope(value: str) -> Scope:
    segments = [seg.strip() for seg in value.split("+")]
    includes_us = "CONTIGUOUS US" in value.upper()
    extra = tuple(seg for seg in segments[1:] if seg)
    return Scope(description=value, includes_contiguous_us=includes_us, extra_regions=extra)


def _detect_kind(title: str, fallback_lines: list[str]) -> AdvisoryKind:
    def scan(text: str) -> Optional[AdvisoryKind]:
        upper = text.upper()
        if re.search(r"\bPROPOSED\b", upper):
            return AdvisoryKind.PROPOSED
        if re.search(r"\b(?:CNX|CANCEL\w*)\b", upper):
            return AdvisoryKind.CANCELLATION
        if re.search(r"\b(?:REVISION|REVISED|UPDATE)\b", upper):
            return AdvisoryKind.REVISION
        return None

    found = scan(title)
    if found:
        return found
    for line in fallback_lines:
        found = scan(line)
        if found:
            return found
    return AdvisoryKind.ACTUAL


def _extract_number(value: str) -> Optional[float]:
    m = _NUMBER_RE.search(value)
    return float(m.group(0)) if m else None


def _default_window(day: date) -> TimeWindow:
    return TimeWindow(
        datetime.combine(day, time(0, 0), tzinfo=timezone.utc),
        datetime.combine(day, time(23, 59), tzinfo=timezone.utc),
    )


def parse_advisory(raw: str) -> ParseOutcome:
    """Parse one advisory text into a GdpRecord.

    Fatal only when no header line (advisory number, airport/center, date)
    can be recognized anywhere in the text.
    """
    lines = raw.splitlines()
    warnings: list[tuple[int, str]] = []

    header = None
    header_idx = -1
    for i, line in enumerate(lines):
        m = _HEADER_RE.match(line)
        if m:
            header, header_idx = m, i
            break
    if header is None:
        return ParseOutcome(fatal="no recognizable advisory header line")

    try:
        issue_date = parse_issue_date(header.group(4))
    except AdvisoryParseError as exc:
        return ParseOutcome(fatal=str(exc))

    advisory_number = int(header.group(1))
    airport = header.group(2).upper()
    center = header.group(3).upper()
    title = header.group(5)

    remarks: list[str] = []
    for j, line in enumerate(lines[:header_idx]):
        if line.strip():
            remarks.append(line)
            warnings.append((j + 1, "content before header kept as remark"))

    values: dict[str, tuple[int, str]] = {}
    i = header_idx + 1
    while i < len(lines):
        line = lines[i]
        lineno = i + 1
        i += 1
        if not line.strip():
            continue
        m = _KEY_LINE_RE.match(line)
        key = _KEY_ALIASES.get(m.group(1).upper()) if m else None
        if key is None:
            remarks.append(line)
            continue
        value = m.group(2)
        if key == "rates":
            # joined line-wrap continuations: a trailing "/" (or a next line
            # starting with "/") means the schedule continues
            while i < len(lines):
                nxt = lines[i].strip()
                fragment = bool(re.fullmatch(r"[\d/ ]+", nxt))
                if fragment and (value.rstrip().endswith("/") or nxt.startswith("/")):
                    value = value.rstrip() + nxt
                    i += 1
                else:
                    break
        if key in values:
            warnings.append((lineno, f"duplicate {m.group(1).upper()} line ignored"))
            remarks.append(line)
            continue
        values[key] = (lineno, value)

    def take(key: str) -> Optional[tuple[int, str]]:
        return values.get(key)

    def demote(lineno: int, message: str) -> None:
        # value failed to parse: warn and keep the whole line as a remark
        warnings.append((lineno, message))
        remarks.append(lines[lineno - 1])

    # impacting condition
    condition = ImpactingCondition(ConditionCategory.OTHER, "")
    got = take("condition")
    if got:
        condition = classify_condition(got[1])
    else:
        warnings.append((header_idx + 1, "no impacting condition line"))

    # rate schedule
    rates = ProgramRateSchedule(())
    quarter_hourly = False
    got = take("rates")
    if got:
        lineno, value = got
        try:
            rates = parse_rate_string(value)
            quarter_hourly = _split_rate_text(value)[1]
        except (AdvisoryParseError, ValueError) as exc:
            rates = ProgramRateSchedule(())
            demote(lineno, f"unparseable program rate: {exc}")
    else:
        warnings.append((header_idx + 1, "no program rate line"))
    if quarter_hourly:
        remarks.append("RATES CONVERTED FROM PER-15-MINUTE VALUES")

    # arrival window
    arrival_window: Optional[TimeWindow] = None
    got = take("arrivals")
    if got:
        lineno, value = got
        pieces = value.split("-", 1)
        if len(pieces) == 2:
            try:
                arrival_window = parse_time_pair(pieces[0], pieces[1], issue_date)
            except (AdvisoryParseError, ValueError) as exc:
                demote(lineno, f"unparseable arrival window: {exc}")
        else:
            demote(lineno, "arrival window is not a start - end pair")
    if arrival_window is None:
        warnings.append((header_idx + 1, "missing arrival window; defaulted to issue date"))
        arrival_window = _default_window(issue_date)
    elif arrival_window.duration_hours <= 0 or arrival_window.duration_hours > 48:
        warnings.append(
            (got[0] if got else header_idx + 1,
             f"arrival window duration {arrival_window.duration_hours:.2f}h out of range; "
             "defaulted to issue date")
        )
        arrival_window = _default_window(issue_date)

    if rates and len(rates) != math.ceil(arrival_window.duration_hours):
        warnings.append(
            (header_idx + 1,
             f"{len(rates)} rate entries for a {arrival_window.duration_hours:.2f}h window")
        )

    # delay statistics
    delays: Optional[DelayStats] = None
    got_max, got_avg = take("max_delay"), take("avg_delay")
    max_v = _extract_number(got_max[1]) if got_max else None
    avg_v = _extract_number(got_avg[1]) if got_avg else None
    if max_v is not None and avg_v is not None:
        try:
            delays = DelayStats(int(round(max_v)), avg_v)
        except ValueError as exc:
            warnings.append((got_max[0], f"inconsistent delay stats dropped: {exc}"))
    elif got_max or got_avg:
        lineno = (got_max or got_avg)[0]
        warnings.append((lineno, "incomplete delay stats (need both max and avg)"))

    # scope
    scope: Optional[Scope] = None
    got = take("scope")
    if got and got[1].strip():
        scope = _parse_scope(got[1])

    # optional timestamps
    adl_time: Optional[datetime] = None
    got = take("adl")
    if got:
        try:
            adl_time = parse_time_token(got[1], issue_date)
        except AdvisoryParseError as exc:
            demote(got[0], f"unparseable ADL time: {exc}")

    deadline: Optional[datetime] = None
    got = take("deadline")
    if got:
        try:
            deadline = parse_time_token(got[1], issue_date)
        except AdvisoryParseError as exc:
            demote(got[0], f"unparseable update deadline: {exc}")

    effective: Optional[TimeWindow] = None
    got = take("effective")
    if got:
        pieces = got[1].split("-", 1)
        if len(pieces) == 2:
            try:
                effective = parse_time_pair(pieces[0], pieces[1], issue_date)
            except (AdvisoryParseError, ValueError) as exc:
                demote(got[0], f"unparseable effective window: {exc}")
        else:
            demote(got[0], "effective window is not a start - end pair")

    runway: Optional[str] = None
    got = take("runway")
    if got and got[1].strip():
        runway = got[1].strip()

    kind = _detect_kind(title, remarks)
    if kind is not AdvisoryKind.CANCELLATION and not rates:
        warnings.append((header_idx + 1, "non-cancellation advisory without a rate schedule"))

    # delay mode: explicit line wins, otherwise scan remark text
    delay_mode: Optional[DelayMode] = None
    got = take("mode")
    if got:
        token = got[1].strip().upper()
        try:
            delay_mode = DelayMode(token) if token != "UNKNOWN" else DelayMode.UNKNOWN
        except ValueError:
            demote(got[0], f"unrecognized delay mode {got[1]!r}")
    if delay_mode is None:
        for line in remarks:
            m = _MODE_RE.search(line)
            if m:
                delay_mode = DelayMode(m.group(1).upper())
                break

    try:
        record = GdpRecord(
            id=record_id(raw),
            advisory_number=advisory_number,
            airport=airport,
            center=center,
            kind=kind,
            issue_date=issue_date,
            arrival_window=arrival_window,
            rates=rates,
            condition=condition,
            raw_text=raw,
            adl_time=adl_time,
            delays=delays,
            scope=scope,
            delay_mode=delay_mode,
            user_update_deadline=deadline,
            effective_window=effective,
            runway_configuration=runway,
            remarks=tuple(remarks),
        )
    except ValueError as exc:  # all field repairs above should prevent this
        return ParseOutcome(fatal=f"record construction failed: {exc}", warnings=warnings)
    return ParseOutcome(record=record, warnings=warnings)


# --- envelope ----------------------------------------------------------------

ENVELOPE_ROOT = "advisories"
ENVELOPE_ENTRY = "advisory"


def parse_envelope(document: str) -> EnvelopeDocument:
    """Extract raw advisory texts from an XML-style envelope, in order.

    A structurally malformed document raises EnvelopeError with the byte
    offset; a malformed single entry is skipped with a warning.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, column = exc.position
        offset_chars = sum(len(l) + 1 for l in document.splitlines()[: line - 1]) + column
        offset = len(document[:offset_chars].encode("utf-8"))
        raise EnvelopeError(f"malformed envelope at byte {offset}: {exc.msg}") from exc

    if root.tag != ENVELOPE_ROOT:
        raise EnvelopeError(f"unexpected root element <{root.tag}>, expected <{ENVELOPE_ROOT}>")

    entries: list[EnvelopeEntry] = []
    warnings: list[str] = []
    for idx, elem in enumerate(root):
        if elem.tag != ENVELOPE_ENTRY:
            warnings.append(f"entry {idx}: unexpected element <{elem.tag}> skipped")
            continue
        if len(elem) > 0:
            warnings.append(f"entry {idx}: nested markup not allowed, skipped")
            continue
        text = elem.text or ""
        if not text.strip():
            warnings.append(f"entry {idx}: empty advisory text skipped")
            continue
        entries.append(
            EnvelopeEntry(
                text=text,
                source_id=elem.get("source_id"),
                fetched_at=elem.get("fetched_at"),
            )
        )
    return EnvelopeDocument(entries=tuple(entries), warnings=tuple(warnings))


def write_envelope(entries: list[EnvelopeEntry]) -> str:
    """Serialize entries into the envelope format parse_envelope reads back."""
    parts = [f"<{ENVELOPE_ROOT}>"]
    for entry in entries:
        attrs = ""
        if entry.source_id is not None:
            attrs += f" source_id={quoteattr(entry.source_id)}"
        if entry.fetched_at is not None:
            attrs += f" fetched_at={quoteattr(entry.fetched_at)}"
        parts.append(f"<{ENVELOPE_ENTRY}{attrs}>{escape(entry.text)}</{ENVELOPE_ENTRY}>")
    parts.append(f"</{ENVELOPE_ROOT}>")
    return "\n".join(parts)
