"""Domain types for Ground Delay Program (GDP) advisories.

Everything here is an immutable value type; records are safe to share
across threads once constructed. The canonical wire encoding is one JSON
object per line with RFC 3339 UTC timestamps (see ``encode_record``).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from typing import Any, Optional

MAX_HOURLY_RATE = 200          # sanity bound on a single schedule entry
MAX_DURATION_HOURS = 48.0      # sanity bound on an arrival window

_AIRPORT_RE = re.compile(r"^[A-Z]{3}$")


class AdvisoryKind(Enum):
    PROPOSED = "proposed"
    ACTUAL = "actual"
    REVISION = "revision"
    CANCELLATION = "cancellation"


class ConditionCategory(Enum):
    WEATHER = "weather"
    VOLUME = "volume"
    EQUIPMENT = "equipment"
    RUNWAY_CONSTRUCTION = "runway_construction"
    OTHER = "other"


class DelayMode(Enum):
    DAS = "DAS"
    UDP = "UDP"
    GAAP = "GAAP"
    UNKNOWN = "unknown"


def validate_airport_code(code: str) -> str:
    """Return the 3-letter IATA code uppercased, or raise ValueError."""
    normalized = code.strip().upper()
    if not _AIRPORT_RE.match(normalized):
        raise ValueError(f"invalid airport code: {code!r}")
    return normalized


def minute_utc(dt: datetime) -> datetime:
    """Normalize a timestamp to minute-precision UTC.

    Naive datetimes are taken to already be UTC; seconds are truncated.
    """
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    else:
        dt = dt.astimezone(timezone.utc)
    return dt.replace(second=0, microsecond=0)


def word_count(text: str) -> int:
    """Number of maximal whitespace-delimited tokens in ``text``."""
    return len(text.split())


@dataclass(frozen=True)
class TimeWindow:
    """Half-open-in-name-only window: both endpoints are inclusive minutes."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", minute_utc(self.start))
        object.__setattr__(self, "end", minute_utc(self.end))
        if self.end < self.start:
            raise ValueError(f"window end {self.end} precedes start {self.start}")

    @property
    def duration_hours(self) -> float:
        return (self.end - self.start).total_seconds() / 3600.0


@dataclass(frozen=True)
class ProgramRateSchedule:
    """Hourly arrival quotas, one entry per hour of the arrival window.

    An empty schedule is legal only for cancellations; the parser enforces
    that as a warning (it must stay total), the synthetic generator never
    produces it.
    """

    rates: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rates", tuple(int(r) for r in self.rates))
        for i, r in enumerate(self.rates):
            if r < 0 or r > MAX_HOURLY_RATE:
                raise ValueError(f"rate entry {i} out of range 0..{MAX_HOURLY_RATE}: {r}")

    def __len__(self) -> int:
        return len(self.rates)

    def __bool__(self) -> bool:
        return bool(self.rates)

    @property
    def mean_rate(self) -> float:
        if not self.rates:
            raise ValueError("empty rate schedule has no mean")
        return sum(self.rates) / len(self.rates)

    @property
    def peak_rate(self) -> int:
        if not self.rates:
            raise ValueError("empty rate schedule has no peak")
        return max(self.rates)

    def as_text(self) -> str:
        return "/".join(str(r) for r in self.rates)


@dataclass(frozen=True)
class DelayStats:
    max_delay: int            # minutes
    avg_delay: float          # minutes

    def __post_init__(self) -> None:
        if self.max_delay < 0 or self.avg_delay < 0:
            raise ValueError("delays must be non-negative")
        if self.avg_delay > self.max_delay:
            raise ValueError(
                f"average delay {self.avg_delay} exceeds maximum {self.max_delay}"
            )


@dataclass(frozen=True)
class ImpactingCondition:
    category: ConditionCategory
    detail: str = ""

    def __post_init__(self) -> None:
        if self.category is ConditionCategory.WEATHER and not self.detail:
            raise ValueError("weather condition requires a detail phrase")

    def as_text(self) -> str:
        name = self.category.value.replace("_", " ")
        return f"{name}: {self.detail}" if self.detail else name


@dataclass(frozen=True)
class Scope:
    description: str
    includes_contiguous_us: bool = False
    extra_regions: tuple[str, ...] = ()


@dataclass(frozen=True)
class GdpRecord:
    """One parsed GDP advisory.

    ``raw_text`` is preserved byte-exact; ``id`` is derived from it
    (see ``record_id``) so identical texts deduplicate.
    """

    id: str
    advisory_number: int
    airport: str
    center: str
    kind: AdvisoryKind
    issue_date: date
    arrival_window: TimeWindow
    rates: ProgramRateSchedule
    condition: ImpactingCondition
    raw_text: str
    adl_time: Optional[datetime] = None
    delays: Optional[DelayStats] = None
    scope: Optional[Scope] = None
    delay_mode: Optional[DelayMode] = None
    user_update_deadline: Optional[datetime] = None
    effective_window: Optional[TimeWindow] = None
    runway_configuration: Optional[str] = None
    remarks: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "airport", validate_airport_code(self.airport))
        object.__setattr__(self, "remarks", tuple(self.remarks))
        if self.adl_time is not None:
            object.__setattr__(self, "adl_time", minute_utc(self.adl_time))
        if self.user_update_deadline is not None:
            object.__setattr__(
                self, "user_update_deadline", minute_utc(self.user_update_deadline)
            )
        if word_count(self.raw_text) < 1:
            raise ValueError("raw_text must contain at least one word")
        hours = self.arrival_window.duration_hours
        if hours <= 0 or hours > MAX_DURATION_HOURS:
            raise ValueError(f"arrival window duration {hours}h outside (0, 48]")

    @property
    def duration_hours(self) -> float:
        return self.arrival_window.duration_hours

    @property
    def word_count(self) -> int:
        return word_count(self.raw_text)


def duration_hours(record: GdpRecord) -> float:
    """Arrival-window length in hours for one record."""
    return record.duration_hours


def record_id(raw_text: str) -> str:
    """Deterministic dedup key: first 16 hex chars of SHA-256(raw_text)."""
    return hashlib.sha256(raw_text.encode("utf-8")).hexdigest()[:16]


# --- canonical JSON encoding -------------------------------------------------

def _ts(dt: datetime) -> str:
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_ts(s: str) -> datetime:
    return minute_utc(datetime.strptime(s, "%Y-%m-%dT%H:%M:%SZ"))


def _window_dict(w: TimeWindow) -> dict[str, str]:
    return {"start": _ts(w.start), "end": _ts(w.end)}


def record_to_dict(record: GdpRecord) -> dict[str, Any]:
    """Encode a record as a JSON-ready dict with stable field order."""
    return {
        "id": record.id,
        "advisory_number": record.advisory_number,
        "airport": record.airport,
        "center": record.center,
        "kind": record.kind.value,
        "issue_date": record.issue_date.isoformat(),
        "adl_time": _ts(record.adl_time) if record.adl_time else None,
        "arrival_window": _window_dict(record.arrival_window),
        "rates": list(record.rates.rates),
        "delays": (
            {"max_delay": record.delays.max_delay, "avg_delay": record.delays.avg_delay}
            if record.delays
            else None
        ),
        "condition": {
            "category": record.condition.category.value,
            "detail": record.condition.detail,
        },
        "scope": (
            {
                "description": record.scope.description,
                "includes_contiguous_us": record.scope.includes_contiguous_us,
                "extra_regions": list(record.scope.extra_regions),
            }
            if record.scope
            else None
        ),
        "delay_mode": record.delay_mode.value if record.delay_mode else None,
        "user_update_deadline": (
            _ts(record.user_update_deadline) if record.user_update_deadline else None
        ),
        "effective_window": (
            _window_dict(record.effective_window) if record.effective_window else None
        ),
        "runway_configuration": record.runway_configuration,
        "remarks": list(record.remarks),
        "raw_text": record.raw_text,
    }


def record_from_dict(data: dict[str, Any]) -> GdpRecord:
    """Inverse of ``record_to_dict``."""
    return GdpRecord(
        id=data["id"],
        advisory_number=int(data["advisory_number"]),
        airport=data["airport"],
        center=data["center"],
        kind=AdvisoryKind(data["kind"]),
        issue_date=date.fromisoformat(data["issue_date"]),
        adl_time=_parse_ts(data["adl_time"]) if data.get("adl_time") else None,
        arrival_window=TimeWindow(
            _parse_ts(data["arrival_window"]["start"]),
            _parse_ts(data["arrival_window"]["end"]),
        ),
        rates=ProgramRateSchedule(tuple(data.get("rates") or ())),
        delays=(
            DelayStats(int(data["delays"]["max_delay"]), float(data["delays"]["avg_delay"]))
            if data.get("delays")
            else None
        ),
        condition=ImpactingCondition(
            ConditionCategory(data["condition"]["category"]),
            data["condition"].get("detail", ""),
        ),
        scope=(
            Scope(
                data["scope"]["description"],
                bool(data["scope"].get("includes_contiguous_us", False)),
                tuple(data["scope"].get("extra_regions") or ()),
            )
            if data.get("scope")
            else None
        ),
        delay_mode=DelayMode(data["delay_mode"]) if data.get("delay_mode") else None,
        user_update_deadline=(
            _parse_ts(data["user_update_deadline"])
            if data.get("user_update_deadline")
            else None
        ),
        effective_window=(
            TimeWindow(
                _parse_ts(data["effective_window"]["start"]),
                _parse_ts(data["effective_window"]["end"]),
            )
            if data.get("effective_window")
            else None
        ),
        runway_configuration=data.get("runway_configuration"),
        remarks=tuple(data.get("remarks") or ()),
        raw_text=data["raw_text"],
    )


def encode_record(record: GdpRecord) -> str:
    """One-line JSON encoding; round-trips byte-exact through decode_record."""
    return json.dumps(record_to_dict(record), ensure_ascii=False, separators=(",", ":"))


def decode_record(line: str) -> GdpRecord:
    return record_from_dict(json.loads(line))
