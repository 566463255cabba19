"""Canonical advisory rendering and seeded synthetic fixture generation.

``render_advisory`` writes a record back out in the canonical grammar, so
rendering and re-parsing yields a field-equal record. The generator builds
desk-scale stand-in corpora (the real OIS archive is not shippable); its
output is deterministic for a given seed, byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from typing import Optional, Sequence

from .corpus import Corpus
from .model import AdvisoryKind, ConditionCategory, DelayMode, GdpRecord
from .parser import parse_advisory

# the six airports the historical share analysis tracks, plus two
# deliberately fake codes so "Other" buckets are never empty
DEFAULT_AIRPORTS = ("SFO", "EWR", "ORD", "ATL", "JFK", "LGA", "ZZA", "ZZB")

_CENTERS = {
    "SFO": "ZOA", "EWR": "ZNY", "ORD": "ZAU", "ATL": "ZTL",
    "JFK": "ZNY", "LGA": "ZNY", "BOS": "ZBW", "PHL": "ZNY",
}

_TITLES = {
    AdvisoryKind.ACTUAL: "CDM GROUND DELAY PROGRAM",
    AdvisoryKind.PROPOSED: "CDM GROUND DELAY PROGRAM PROPOSED",
    AdvisoryKind.REVISION: "CDM GROUND DELAY PROGRAM REVISION",
    AdvisoryKind.CANCELLATION: "GDP CANCELLATION",
}

_CONDITION_POOL = (
    ("WX:WIND", 22),
    ("WX:LOW CEILINGS", 22),
    ("WX:FOG", 12),
    ("WX:SNOW", 8),
    ("WX:THUNDERSTORMS", 12),
    ("VOLUME", 14),
    ("EQUIPMENT:RWY LIGHTS OUTAGE", 5),
    ("RUNWAY CONSTRUCTION", 5),
)

_RUNWAY_POOL = (
    "ARR 28L/28R | DEP 1L/1R",
    "ARR 22L | DEP 22R",
    "ARR 27/33L | DEP 33R",
    "ARR 31R | DEP 31L",
)

# filler sentences for remark lines; deliberately free of kind keywords,
# delay-mode phrases, and anything shaped like a grammar key
_REMARK_POOL = (
    "TRAFFIC DEMAND EXPECTED TO EXCEED CAPACITY THROUGH THE EVENING PUSH.",
    "FLIGHTS ORIGINATING OUTSIDE THE LISTED SCOPE ARE EXEMPT.",
    "INTERNATIONAL ARRIVALS REMAIN EXEMPT FROM THIS PROGRAM.",
    "COORDINATE SUBSTITUTIONS THROUGH THE USUAL CDM CHANNELS.",
    "EXPECT FURTHER ADJUSTMENTS IF CONDITIONS DETERIORATE.",
    "MILITARY AND LIFEGUARD FLIGHTS ARE EXEMPT.",
    "DEICING OPERATIONS MAY ADD TAXI TIME AT AFFECTED ORIGINS.",
    "SEE THE OPERATIONAL PLAN FOR ALTERNATE ROUTING GUIDANCE.",
)


def _ordinal(day: int) -> str:
    if 10 <= day % 100 <= 20:
        suffix = "TH"
    else:
        suffix = {1: "ST", 2: "ND", 3: "RD"}.get(day % 10, "TH")
    return f"{day}{suffix}"


def _time_token(ts: datetime, context: date) -> str:
    token = f"{ts:%H:%M} UTC"
    if ts.date() == context:
        return token
    if ts.date() == context + timedelta(days=1):
        return f"{token} (NEXT DAY)"
    return f"{token} ON THE {_ordinal(ts.day)}"


def _pair_token(start: datetime, end: datetime, issue: date) -> str:
    left = _time_token(start, issue)
    right = _time_token(end, start.date())
    return f"{left} - {right}"


def _condition_line(record: GdpRecord) -> Optional[str]:
    cond = record.condition
    if cond.category is ConditionCategory.WEATHER:
        return f"IMPACTING CONDITION: WX:{cond.detail.upper()}"
    if not cond.detail:
        return None
    return f"IMPACTING CONDITION: {cond.detail.upper()}"


def _format_avg(avg: float) -> str:
    return str(int(avg)) if avg == int(avg) else str(avg)


def render_advisory(record: GdpRecord) -> str:
    """Render a record in the canonical grammar (docs/advisory-grammar.md).

    Ignores raw_text; re-parsing the output reproduces every parsed field.
    """
    issue = record.issue_date
    lines = [
        f"ATCSCC ADVZY {record.advisory_number:03d} {record.airport}/{record.center} "
        f"{issue:%m/%d/%Y} {_TITLES[record.kind]}"
    ]
    cond = _condition_line(record)
    if cond:
        lines.append(cond)
    if record.adl_time:
        lines.append(f"ADL TIME: {_time_token(record.adl_time, issue)}")
    w = record.arrival_window
    lines.append(f"ARRIVALS ESTIMATED FOR: {_pair_token(w.start, w.end, issue)}")
    if record.rates:
        lines.append(f"PROGRAM RATE: {record.rates.as_text()}")
    if record.delays:
        lines.append(f"MAX DELAY: {record.delays.max_delay} MINUTES")
        lines.append(f"AVG DELAY: {_format_avg(record.delays.avg_delay)} MINUTES")
    if record.scope:
        lines.append(f"SCOPE: {record.scope.description}")
    if record.delay_mode:
        lines.append(f"DELAY ASGMT MODE: {record.delay_mode.value.upper()}")
    if record.user_update_deadline:
        lines.append(f"USER UPDATES BEFORE: {_time_token(record.user_update_deadline, issue)}")
    if record.effective_window:
        e = record.effective_window
        lines.append(f"EFFECTIVE TIME: {_pair_token(e.start, e.end, issue)}")
    if record.runway_configuration:
        lines.append(f"RUNWAY CONFIGURATION: {record.runway_configuration}")
    lines.extend(record.remarks)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GeneratorConfig:
    airports: Sequence[str] = DEFAULT_AIRPORTS
    start_year: int = 2010
    end_year: int = 2023


def _weighted_choice(rng: random.Random, pool) -> str:
    items = [item for item, _ in pool]
    weights = [weight for _, weight in pool]
    return rng.choices(items, weights=weights, k=1)[0]


def generate_advisory(rng: random.Random, number: int, config: GeneratorConfig) -> str:
    """One synthetic advisory text in the canonical grammar."""
    airport = rng.choice(list(config.airports))
    center = _CENTERS.get(airport, "Z" + airport[:2])
    year = rng.randint(config.start_year, config.end_year)
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    issue = date(year, month, day)

    kind = rng.choices(
        [AdvisoryKind.ACTUAL, AdvisoryKind.PROPOSED, AdvisoryKind.REVISION,
         AdvisoryKind.CANCELLATION],
        weights=[45, 25, 20, 10],
        k=1,
    )[0]

    start_hour = rng.randint(6, 20)
    start_minute = rng.choice((0, 0, 30))
    hours = rng.randint(2, 14)
    start = datetime.combine(issue, time(start_hour, start_minute), tzinfo=timezone.utc)
    end = start + timedelta(hours=hours, minutes=-1)

    lines = [
        f"ATCSCC ADVZY {number:03d} {airport}/{center} {issue:%m/%d/%Y} {_TITLES[kind]}"
    ]

    if kind is not AdvisoryKind.CANCELLATION:
        lines.append(f"IMPACTING CONDITION: {_weighted_choice(rng, _CONDITION_POOL)}")
        adl = start - timedelta(minutes=rng.randint(45, 180))
        lines.append(f"ADL TIME: {_time_token(adl, issue)}")

    lines.append(f"ARRIVALS ESTIMATED FOR: {_pair_token(start, end, issue)}")

    if kind is not AdvisoryKind.CANCELLATION:
        base = rng.randint(20, 58)
        rates = [max(0, base + rng.choice((-4, -2, 0, 0, 2, 4))) for _ in range(hours)]
        lines.append("PROGRAM RATE: " + "/".join(str(r) for r in rates))

        # a thin tail of extreme delays keeps superlative queries interesting
        max_delay = rng.randint(700, 1500) if rng.random() < 0.03 else rng.randint(30, 320)
        avg_delay = round(max_delay * rng.uniform(0.3, 0.7), 1)
        lines.append(f"MAX DELAY: {max_delay} MINUTES")
        lines.append(f"AVG DELAY: {_format_avg(avg_delay)} MINUTES")

        scope = "ALL DEPARTURES FROM CONTIGUOUS US"
        if rng.random() < 0.3:
            scope += " + CANADIAN DEPARTURE POINTS"
        lines.append(f"SCOPE: {scope}")

        if rng.random() < 0.25:
            lines.append(f"DELAY ASGMT MODE: {rng.choice(('DAS', 'UDP', 'GAAP'))}")
        if rng.random() < 0.5:
            deadline = start - timedelta(minutes=rng.randint(20, 50))
            lines.append(f"USER UPDATES BEFORE: {_time_token(deadline, issue)}")
        if rng.random() < 0.4:
            eff_start = start - timedelta(minutes=rng.randint(30, 90))
            eff_end = eff_start + timedelta(hours=1, minutes=15)
            lines.append(f"EFFECTIVE TIME: {_pair_token(eff_start, eff_end, issue)}")
        if rng.random() < 0.6:
            lines.append(f"RUNWAY CONFIGURATION: {rng.choice(_RUNWAY_POOL)}")

    for _ in range(rng.randint(0, 4)):
        lines.append(rng.choice(_REMARK_POOL))

    return "\n".join(lines) + "\n"


def generate_advisories(
    seed: int, count: int, config: GeneratorConfig = GeneratorConfig()
) -> list[str]:
    """Deterministic batch: same seed and count, byte-identical output."""
    rng = random.Random(seed)
    return [generate_advisory(rng, i + 1, config) for i in range(count)]


def build_corpus(
    seed: int, count: int, config: GeneratorConfig = GeneratorConfig()
) -> Corpus:
    """Parse a generated batch into a fresh corpus (test convenience)."""
    corpus = Corpus()
    corpus.ingest(parse_advisory(text) for text in generate_advisories(seed, count, config))
    return corpus
