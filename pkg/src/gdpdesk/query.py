"""Deterministic structured-query engine over an advisory corpus.

Superlatives are answered by an exact full scan, never sampling: a
language model asked for "the highest maximum delay" can pick a plausible
but wrong record, so extremal questions are always resolved here. Ties
break by ascending record id everywhere, trading arbitrariness for
reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from enum import Enum
from typing import Any, Callable, Optional

from .corpus import Corpus
from .model import AdvisoryKind, ConditionCategory, GdpRecord, word_count

DEFAULT_LIMIT = 5


class NoMatchError(LookupError):
    """No records satisfy the query filters."""


class SuperlativeField(Enum):
    MAX_DELAY = "max_delay"
    AVG_DELAY = "avg_delay"
    DURATION_HOURS = "duration_hours"
    PEAK_RATE = "peak_rate"


class Direction(Enum):
    HIGHEST = "highest"
    LOWEST = "lowest"


class ContextStrategy(Enum):
    WORDIEST = "wordiest"
    MOST_RECENT = "most_recent"


@dataclass(frozen=True)
class Superlative:
    field: SuperlativeField
    direction: Direction


@dataclass(frozen=True)
class QuerySpec:
    airport: Optional[str] = None
    date_range: Optional[tuple[date, date]] = None
    condition_category: Optional[ConditionCategory] = None
    kind: Optional[AdvisoryKind] = None
    superlative: Optional[Superlative] = None
    limit: int = DEFAULT_LIMIT

    def __post_init__(self) -> None:
        if self.limit < 1:
            raise ValueError("limit must be >= 1")


@dataclass(frozen=True)
class RankedResult:
    records: tuple[GdpRecord, ...]
    ranking_key: str


@dataclass(frozen=True)
class ContextSelection:
    records: tuple[GdpRecord, ...]
    requested: int
    strategy: ContextStrategy
    shortfall: bool      # True when fewer records exist than were asked for


# field extractors; None means the record carries no value for the field
_FIELD_VALUE: dict[SuperlativeField, Callable[[GdpRecord], Optional[float]]] = {
    SuperlativeField.MAX_DELAY: lambda r: r.delays.max_delay if r.delays else None,
    SuperlativeField.AVG_DELAY: lambda r: r.delays.avg_delay if r.delays else None,
    SuperlativeField.DURATION_HOURS: lambda r: r.duration_hours,
    SuperlativeField.PEAK_RATE: lambda r: r.rates.peak_rate if r.rates else None,
}


def _filtered(corpus: Corpus, spec: QuerySpec) -> list[GdpRecord]:
    return corpus.filter(
        airport=spec.airport,
        date_range=spec.date_range,
        condition_category=spec.condition_category,
        kind=spec.kind,
    )


def resolve_superlative(corpus: Corpus, spec: QuerySpec) -> RankedResult:
    """Extremal record(s) by the named field over the filtered corpus.

    Exact by construction: every candidate is scanned. Records that carry
    no value for the field (e.g. no delay stats) cannot be ranked and are
    skipped.
    """
    if spec.superlative is None:
        raise ValueError("spec has no superlative")
    extract = _FIELD_VALUE[spec.superlative.field]
    candidates = [(extract(r), r) for r in _filtered(corpus, spec)]
    candidates = [(v, r) for v, r in candidates if v is not None]
    if not candidates:
        raise NoMatchError("no matching GDPs")

    if spec.superlative.direction is Direction.HIGHEST:
        candidates.sort(key=lambda pair: (-pair[0], pair[1].id))
    else:
        candidates.sort(key=lambda pair: (pair[0], pair[1].id))
    records = tuple(r for _, r in candidates[: spec.limit])
    key = f"{spec.superlative.direction.value} {spec.superlative.field.value}"
    return RankedResult(records=records, ranking_key=key)


def find_examples(corpus: Corpus, spec: QuerySpec) -> RankedResult:
    """Filtered records ranked most-recent-first, truncated to the limit."""
    if spec.superlative is not None:
        raise ValueError("use resolve_superlative for superlative specs")
    records = _filtered(corpus, spec)
    records.sort(key=lambda r: (-r.issue_date.toordinal(), r.id))
    return RankedResult(records=tuple(records[: spec.limit]), ranking_key="most recent")


def select_context(
    corpus: Corpus,
    airport: Optional[str],
    k: int,
    strategy: ContextStrategy = ContextStrategy.WORDIEST,
) -> ContextSelection:
    """Top-k records for prompt context, optionally scoped to one airport.

    The wordiest strategy mirrors how in-prompt and fine-tuning context
    was assembled: more text per advisory, more parameters represented.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pool = corpus.filter(airport=airport)
    if strategy is ContextStrategy.WORDIEST:
        pool.sort(key=lambda r: (-word_count(r.raw_text), r.id))
    else:
        pool.sort(key=lambda r: (-r.issue_date.toordinal(), r.id))
    return ContextSelection(
        records=tuple(pool[:k]),
        requested=k,
        strategy=strategy,
        shortfall=len(pool) < k,
    )


# --- canonical dict form (shared by the CLI flags and the HTTP body) ----------

def spec_to_dict(spec: QuerySpec) -> dict[str, Any]:
    return {
        "airport": spec.airport,
        "date_from": spec.date_range[0].isoformat() if spec.date_range else None,
        "date_to": spec.date_range[1].isoformat() if spec.date_range else None,
        "condition": spec.condition_category.value if spec.condition_category else None,
        "kind": spec.kind.value if spec.kind else None,
        "superlative": (
            {
                "field": spec.superlative.field.value,
                "direction": spec.superlative.direction.value,
            }
            if spec.superlative
            else None
        ),
        "limit": spec.limit,
    }


def spec_from_dict(data: dict[str, Any]) -> QuerySpec:
    """Parse the canonical dict form; raises ValueError on bad fields."""
    known = {
        "airport", "date_from", "date_to", "condition", "kind", "superlative", "limit",
    }
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown query fields: {sorted(unknown)}")

    date_range = None
    if data.get("date_from") or data.get("date_to"):
        if not (data.get("date_from") and data.get("date_to")):
            raise ValueError("date_from and date_to must be given together")
        date_range = (
            date.fromisoformat(data["date_from"]),
            date.fromisoformat(data["date_to"]),
        )

    superlative = None
    if data.get("superlative"):
        sup = data["superlative"]
        try:
            superlative = Superlative(
                SuperlativeField(sup["field"]), Direction(sup["direction"])
            )
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad superlative: {exc}") from exc

    return QuerySpec(
        airport=data["airport"].upper() if data.get("airport") else None,
        date_range=date_range,
        condition_category=(
            ConditionCategory(data["condition"]) if data.get("condition") else None
        ),
        kind=AdvisoryKind(data["kind"]) if data.get("kind") else None,
        superlative=superlative,
        limit=int(data.get("limit") or DEFAULT_LIMIT),
    )


def scoped_to_airport(spec: QuerySpec, airport: str) -> QuerySpec:
    """Pin a spec to an assistant instance's airport when it names none."""
    if spec.airport:
        return spec
    return replace(spec, airport=airport)
