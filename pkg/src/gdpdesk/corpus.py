"""In-memory advisory corpus with indexes and flat-file persistence.

Desk-scale by design: the full historical record set (< ~90k advisories)
fits comfortably in memory, so persistence is a line-delimited JSON file
with a one-line format header. Records are deduplicated by content hash;
iteration order is always ascending (issue_date, id).

Concurrency: a corpus is safe for many concurrent readers; ingest must be
exclusive (the service layer loads once at startup and then never mutates).
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .model import (
    AdvisoryKind,
    ConditionCategory,
    GdpRecord,
    decode_record,
    encode_record,
)
from .parser import ParseOutcome

FORMAT_HEADER = "gdpcorpus/1"


class CorpusFormatError(ValueError):
    """Raised when a corpus file cannot be read back."""


@dataclass(frozen=True)
class IngestReport:
    accepted: int = 0
    duplicates: int = 0
    failed: int = 0
    warnings_total: int = 0

    @property
    def total(self) -> int:
        return self.accepted + self.duplicates + self.failed


class Corpus:
    def __init__(self) -> None:
        self._records: dict[str, GdpRecord] = {}
        self._by_airport: dict[str, list[str]] = {}
        self._by_month: dict[tuple[int, int], list[str]] = {}
        self._by_condition: dict[ConditionCategory, list[str]] = {}
        self._sorted_cache: Optional[tuple[GdpRecord, ...]] = None

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    def __iter__(self) -> Iterator[GdpRecord]:
        return iter(self.records())

    def records(self) -> tuple[GdpRecord, ...]:
        """All records in deterministic order: ascending issue_date, then id."""
        if self._sorted_cache is None:
            self._sorted_cache = tuple(
                sorted(self._records.values(), key=lambda r: (r.issue_date, r.id))
            )
        return self._sorted_cache

    def get(self, record_id: str) -> Optional[GdpRecord]:
        return self._records.get(record_id)

    def airports(self) -> dict[str, int]:
        """Record count per airport, airports sorted alphabetically."""
        return {a: len(ids) for a, ids in sorted(self._by_airport.items())}

    def add(self, record: GdpRecord) -> bool:
        """Insert one record; returns False for a content-hash duplicate."""
        if record.id in self._records:
            return False
        self._records[record.id] = record
        self._by_airport.setdefault(record.airport, []).append(record.id)
        month = (record.issue_date.year, record.issue_date.month)
        self._by_month.setdefault(month, []).append(record.id)
        self._by_condition.setdefault(record.condition.category, []).append(record.id)
        self._sorted_cache = None
        return True

    def ingest(self, outcomes: Iterable[ParseOutcome]) -> IngestReport:
        """Insert parse outcomes; failures are tallied, never raised."""
        accepted = duplicates = failed = warnings_total = 0
        for outcome in outcomes:
            warnings_total += len(outcome.warnings)
            if not outcome.ok:
                failed += 1
            elif self.add(outcome.record):
                accepted += 1
            else:
                duplicates += 1
        return IngestReport(accepted, duplicates, failed, warnings_total)

    def filter(
        self,
        airport: Optional[str] = None,
        date_range: Optional[tuple[date, date]] = None,
        condition_category: Optional[ConditionCategory] = None,
        kind: Optional[AdvisoryKind] = None,
    ) -> list[GdpRecord]:
        """Records matching the conjunction of the set filters, in order.

        The date range filters on issue_date, inclusive on both ends.
        """
        if airport is not None:
            candidate_ids = set(self._by_airport.get(airport.upper(), ()))
            pool = [r for r in self.records() if r.id in candidate_ids]
        else:
            pool = list(self.records())

        out = []
        for rec in pool:
            if date_range is not None and not (date_range[0] <= rec.issue_date <= date_range[1]):
                continue
            if condition_category is not None and rec.condition.category is not condition_category:
                continue
            if kind is not None and rec.kind is not kind:
                continue
            out.append(rec)
        return out

    def check_indexes(self) -> None:
        """Assert index consistency; used by tests and the ingest CLI."""
        ids = set(self._records)
        for name, index in (
            ("airport", self._by_airport),
            ("month", self._by_month),
            ("condition", self._by_condition),
        ):
            indexed = [i for members in index.values() for i in members]
            if set(indexed) != ids or len(indexed) != len(ids):
                raise AssertionError(f"{name} index out of sync with record set")

    # --- persistence ---------------------------------------------------------

    def save(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8") as f:
            f.write(FORMAT_HEADER + "\n")
            for record in self.records():
                f.write(encode_record(record) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        path = Path(path)
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CorpusFormatError(f"cannot read corpus file {path}: {exc}") from exc
        if not lines or lines[0] != FORMAT_HEADER:
            raise CorpusFormatError(
                f"{path}: missing format header (expected {FORMAT_HEADER!r})"
            )
        corpus = cls()
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                record = decode_record(line)
            except Exception as exc:
                raise CorpusFormatError(f"{path}: malformed record on line {lineno}: {exc}") from exc
            corpus.add(record)
        return corpus
