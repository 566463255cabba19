"""Corpus analytics: duration trends, airport shares, rate distributions.

Three numeric reports over an immutable corpus, all pure functions that a
brute-force recomputation must reproduce exactly. Quartiles use linear
interpolation between order statistics ("type 7", the numpy default);
the per-record rate statistic is the arithmetic mean of the schedule.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from typing import Optional, Sequence

from .corpus import Corpus
from .model import AdvisoryKind, GdpRecord

OTHER_LABEL = "Other"


class InsufficientDataError(ValueError):
    """Raised when a distribution is requested over zero samples."""


@dataclass(frozen=True)
class MonthlyDurationPoint:
    year: int
    month: int
    gdp_count: int
    mean_duration_hours: float


@dataclass(frozen=True)
class MonthlyDurationSeries:
    points: tuple[MonthlyDurationPoint, ...]


@dataclass(frozen=True)
class AirportShareRow:
    year: int
    airport: str          # tracked code or OTHER_LABEL
    share: float          # fraction in [0, 1]


@dataclass(frozen=True)
class AirportShareTable:
    rows: tuple[AirportShareRow, ...]


@dataclass(frozen=True)
class RateDistribution:
    airport: str
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    sample_count: int


def quantile(sorted_values: Sequence[float], q: float) -> float:
    """Type-7 quantile of pre-sorted values (linear interpolation)."""
    if not sorted_values:
        raise InsufficientDataError("insufficient data")
    if len(sorted_values) == 1:
        return float(sorted_values[0])
    h = (len(sorted_values) - 1) * q
    lo = int(h)
    frac = h - lo
    if lo + 1 == len(sorted_values):
        return float(sorted_values[lo])
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo])


def monthly_avg_duration(
    corpus: Corpus, date_range: Optional[tuple[date, date]] = None
) -> MonthlyDurationSeries:
    """Mean arrival-window length per issue month; empty months are omitted.

    The per-month GDP count is part of every point so that single-GDP
    months are visible rather than looking like robust averages.
    """
    buckets: dict[tuple[int, int], list[float]] = {}
    for rec in corpus.filter(date_range=date_range):
        key = (rec.issue_date.year, rec.issue_date.month)
        buckets.setdefault(key, []).append(rec.duration_hours)
    points = [
        MonthlyDurationPoint(year, month, len(durations), sum(durations) / len(durations))
        for (year, month), durations in sorted(buckets.items())
    ]
    return MonthlyDurationSeries(tuple(points))


def airport_share_by_year(
    corpus: Corpus,
    tracked_airports: Sequence[str],
    kind: Optional[AdvisoryKind] = None,
) -> AirportShareTable:
    """Fraction of records per tracked airport (plus Other) for each year.

    All issuance kinds count by default; pass ``kind`` to restrict.
    Tracked airports with no records in a year get an explicit 0.0 row.
    """
    if not tracked_airports:
        raise ValueError("tracked_airports must be non-empty")
    tracked = [a.upper() for a in tracked_airports]

    by_year: dict[int, list[GdpRecord]] = {}
    for rec in corpus.filter(kind=kind):
        by_year.setdefault(rec.issue_date.year, []).append(rec)

    rows: list[AirportShareRow] = []
    for year in sorted(by_year):
        records = by_year[year]
        total = len(records)
        other = total
        for airport in tracked:
            n = sum(1 for r in records if r.airport == airport)
            other -= n
            rows.append(AirportShareRow(year, airport, n / total))
        rows.append(AirportShareRow(year, OTHER_LABEL, other / total))
    return AirportShareTable(tuple(rows))


def rate_distribution(
    corpus: Corpus, airport: str, date_range: Optional[tuple[date, date]] = None
) -> RateDistribution:
    """Five-number summary of per-record mean hourly rates for one airport.

    Records without a rate schedule (cancellations) carry no rate statistic
    and are excluded from the sample.
    """
    samples = sorted(
        rec.rates.mean_rate
        for rec in corpus.filter(airport=airport, date_range=date_range)
        if rec.rates
    )
    if not samples:
        raise InsufficientDataError("insufficient data")
    return RateDistribution(
        airport=airport.upper(),
        minimum=samples[0],
        q1=quantile(samples, 0.25),
        median=quantile(samples, 0.5),
        q3=quantile(samples, 0.75),
        maximum=samples[-1],
        sample_count=len(samples),
    )


# --- CSV / HTML emitters -------------------------------------------------------

def duration_csv(series: MonthlyDurationSeries) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["year", "month", "gdp_count", "mean_duration_hours"])
    for p in series.points:
        w.writerow([p.year, p.month, p.gdp_count, f"{p.mean_duration_hours:.6f}"])
    return out.getvalue()


def share_csv(table: AirportShareTable) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["year", "airport", "share"])
    for r in table.rows:
        w.writerow([r.year, r.airport, f"{r.share:.9f}"])
    return out.getvalue()


def rates_csv(dist: RateDistribution) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["airport", "min", "q1", "median", "q3", "max", "sample_count"])
    w.writerow([
        dist.airport,
        f"{dist.minimum:.6f}", f"{dist.q1:.6f}", f"{dist.median:.6f}",
        f"{dist.q3:.6f}", f"{dist.maximum:.6f}", dist.sample_count,
    ])
    return out.getvalue()


def _svg_bars(values: list[float], labels: list[str], width: int = 900) -> str:
    if not values:
        return "<p>no data</p>"
    peak = max(values) or 1.0
    bar_w = max(4, min(40, width // max(len(values), 1) - 2))
    parts = [f'<svg viewBox="0 0 {width} 260" xmlns="http://www.w3.org/2000/svg">']
    for i, (v, label) in enumerate(zip(values, labels)):
        h = 200 * v / peak
        x = 4 + i * (bar_w + 2)
        parts.append(
            f'<rect x="{x}" y="{204 - h:.1f}" width="{bar_w}" height="{h:.1f}" '
            f'fill="#4472a8"><title>{label}: {v:.3f}</title></rect>'
        )
    parts.append(
        f'<text x="4" y="226" font-size="11" fill="#444">peak {peak:.3f} '
        f"({len(values)} buckets)</text>"
    )
    parts.append("</svg>")
    return "".join(parts)


def report_html(title: str, series: MonthlyDurationSeries | None = None,
                table: AirportShareTable | None = None,
                dist: RateDistribution | None = None) -> str:
    """Self-contained HTML page for whichever report is passed in."""
    body: list[str] = [f"<h1>{title}</h1>"]
    if series is not None:
        body.append(_svg_bars(
            [p.mean_duration_hours for p in series.points],
            [f"{p.year}-{p.month:02d} (n={p.gdp_count})" for p in series.points],
        ))
    if table is not None:
        body.append("<table border='1' cellspacing='0' cellpadding='4'>")
        body.append("<tr><th>year</th><th>airport</th><th>share</th></tr>")
        for r in table.rows:
            body.append(f"<tr><td>{r.year}</td><td>{r.airport}</td><td>{r.share:.4f}</td></tr>")
        body.append("</table>")
    if dist is not None:
        body.append(
            f"<p>{dist.airport}: min {dist.minimum:.2f}, q1 {dist.q1:.2f}, "
            f"median {dist.median:.2f}, q3 {dist.q3:.2f}, max {dist.maximum:.2f} "
            f"(n={dist.sample_count})</p>"
        )
        body.append(_svg_bars(
            [dist.minimum, dist.q1, dist.median, dist.q3, dist.maximum],
            ["min", "q1", "median", "q3", "max"],
        ))
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        f"<title>{title}</title></head><body>" + "".join(body) + "</body></html>"
    )
