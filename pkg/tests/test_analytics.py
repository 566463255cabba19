from __future__ import annotations

import random
from datetime import date, datetime, time, timedelta, timezone

import numpy as np
import pytest

from gdpdesk.analytics import (
    InsufficientDataError,
    OTHER_LABEL,
    airport_share_by_year,
    duration_csv,
    monthly_avg_duration,
    quantile,
    rate_distribution,
    report_html,
    share_csv,
)
from gdpdesk.corpus import Corpus
from gdpdesk.fixtures import build_corpus
from gdpdesk.model import (
    AdvisoryKind,
    ConditionCategory,
    GdpRecord,
    ImpactingCondition,
    ProgramRateSchedule,
    TimeWindow,
    record_id,
)


def synthetic_record(airport: str, day: date, duration_h: float, rates=(30,) * 4, n=0):
    raw = f"ATCSCC ADVZY {n} {airport}/ZZZ {day:%m/%d/%Y} GDP SYNTH {n} {duration_h}"
    start = datetime.combine(day, time(8, 0), tzinfo=timezone.utc)
    return GdpRecord(
        id=record_id(raw),
        advisory_number=n,
        airport=airport,
        center="ZZZ",
        kind=AdvisoryKind.ACTUAL,
        issue_date=day,
        arrival_window=TimeWindow(start, start + timedelta(hours=duration_h)),
        rates=ProgramRateSchedule(tuple(rates)),
        condition=ImpactingCondition(ConditionCategory.WEATHER, "fog"),
        raw_text=raw,
    )


def corpus_of(records):
    corpus = Corpus()
    for rec in records:
        assert corpus.add(rec)
    return corpus


class TestMonthlyDuration:
    def test_hand_summed_month(self):
        day = date(2020, 3, 10)
        corpus = corpus_of([
            synthetic_record("SFO", day, 9.983333333333333, n=1),
            synthetic_record("SFO", day, 4.0, n=2),
            synthetic_record("SFO", day, 2.0166666666666666, n=3),
        ])
        series = monthly_avg_duration(corpus)
        assert len(series.points) == 1
        point = series.points[0]
        assert (point.year, point.month, point.gdp_count) == (2020, 3, 3)
        assert point.mean_duration_hours == pytest.approx(5.333333333, abs=1e-9)

    def test_single_gdp_month_visible(self):
        corpus = corpus_of([synthetic_record("SFO", date(2020, 7, 15), 6.0, n=1)])
        point = monthly_avg_duration(corpus).points[0]
        assert point.gdp_count == 1
        assert point.mean_duration_hours == pytest.approx(6.0)

    def test_empty_months_omitted(self):
        corpus = corpus_of([
            synthetic_record("SFO", date(2020, 1, 5), 4.0, n=1),
            synthetic_record("SFO", date(2020, 3, 5), 4.0, n=2),
        ])
        months = [(p.year, p.month) for p in monthly_avg_duration(corpus).points]
        assert months == [(2020, 1), (2020, 3)]

    def test_empty_range_empty_series(self):
        corpus = build_corpus(3, 50)
        series = monthly_avg_duration(corpus, (date(1999, 1, 1), date(1999, 12, 31)))
        assert series.points == ()

    def test_matches_brute_force(self):
        corpus = build_corpus(17, 600)
        series = monthly_avg_duration(corpus)
        buckets = {}
        for rec in corpus.records():
            buckets.setdefault((rec.issue_date.year, rec.issue_date.month), []).append(
                rec.duration_hours
            )
        assert len(series.points) == len(buckets)
        for p in series.points:
            sample = buckets[(p.year, p.month)]
            assert p.gdp_count == len(sample)
            assert p.mean_duration_hours == pytest.approx(
                sum(sample) / len(sample), abs=1e-9
            )

    def test_permutation_invariant(self):
        corpus = build_corpus(29, 150)
        records = list(corpus.records())
        random.Random(1).shuffle(records)
        assert monthly_avg_duration(corpus_of(records)) == monthly_avg_duration(corpus)


class TestAirportShare:
    def test_counting_example(self):
        day = date(2021, 5, 1)
        records = (
            [synthetic_record("SFO", day, 4.0, n=i) for i in range(4)]
            + [synthetic_record("EWR", day, 4.0, n=i + 10) for i in range(4)]
            + [synthetic_record("XYZ", day, 4.0, n=i + 20) for i in range(2)]
        )
        table = airport_share_by_year(corpus_of(records), ["SFO", "EWR"])
        shares = {r.airport: r.share for r in table.rows}
        assert shares == {"SFO": 0.4, "EWR": 0.4, OTHER_LABEL: 0.2}

    def test_single_airport_corpus(self):
        corpus = corpus_of([synthetic_record("SFO", date(2020, 1, 1), 3.0, n=1)])
        shares = {r.airport: r.share for r in airport_share_by_year(corpus, ["SFO"]).rows}
        assert shares == {"SFO": 1.0, OTHER_LABEL: 0.0}

    def test_absent_tracked_airport_gets_zero(self):
        corpus = corpus_of([synthetic_record("SFO", date(2020, 1, 1), 3.0, n=1)])
        shares = {r.airport: r.share for r in airport_share_by_year(corpus, ["SFO", "JFK"]).rows}
        assert shares["JFK"] == 0.0

    def test_shares_sum_to_one_per_year(self):
        corpus = build_corpus(31, 800)
        table = airport_share_by_year(corpus, ["SFO", "EWR", "ORD", "ATL", "JFK", "LGA"])
        per_year: dict[int, float] = {}
        for row in table.rows:
            per_year[row.year] = per_year.get(row.year, 0.0) + row.share
        assert per_year  # at least one year present
        for year, total in per_year.items():
            assert total == pytest.approx(1.0, abs=1e-9), year

    def test_kind_filter_exposed(self):
        corpus = build_corpus(31, 300)
        table = airport_share_by_year(corpus, ["SFO"], kind=AdvisoryKind.CANCELLATION)
        for row in table.rows:
            assert 0.0 <= row.share <= 1.0

    def test_empty_tracked_rejected(self):
        with pytest.raises(ValueError):
            airport_share_by_year(build_corpus(1, 5), [])


class TestRateDistribution:
    def test_five_point_example(self):
        day = date(2020, 2, 2)
        corpus = corpus_of([
            synthetic_record("SFO", day, 4.0, rates=(m,) * 4, n=i)
            for i, m in enumerate([30, 32, 34, 36, 38])
        ])
        dist = rate_distribution(corpus, "SFO")
        assert (dist.minimum, dist.q1, dist.median, dist.q3, dist.maximum) == (
            30, 32, 34, 36, 38,
        )
        assert dist.sample_count == 5

    def test_single_record_degenerate(self):
        corpus = corpus_of([
            synthetic_record(
                "EWR", date(2022, 11, 18), 10.0,
                rates=(34, 34, 34, 38, 38, 38, 38, 38, 38, 38), n=1,
            )
        ])
        dist = rate_distribution(corpus, "EWR")
        assert dist.minimum == dist.q1 == dist.median == dist.q3 == dist.maximum
        assert dist.median == pytest.approx(36.8)

    def test_empty_sample_errors(self):
        with pytest.raises(InsufficientDataError, match="insufficient data"):
            rate_distribution(corpus_of([]), "SFO")

    def test_quartiles_match_numpy(self):
        for seed in range(20):
            rng = random.Random(seed)
            xs = sorted(rng.uniform(10, 80) for _ in range(rng.randint(1, 60)))
            for q in (0.25, 0.5, 0.75):
                assert quantile(xs, q) == pytest.approx(
                    float(np.percentile(xs, q * 100)), abs=1e-9
                )

    def test_monotone_summary(self):
        corpus = build_corpus(37, 500)
        for airport in ("SFO", "EWR", "ORD"):
            dist = rate_distribution(corpus, airport)
            assert dist.minimum <= dist.q1 <= dist.median <= dist.q3 <= dist.maximum


class TestEmitters:
    def test_duration_csv_shape(self):
        corpus = build_corpus(3, 60)
        text = duration_csv(monthly_avg_duration(corpus))
        lines = text.strip().splitlines()
        assert lines[0] == "year,month,gdp_count,mean_duration_hours"
        assert len(lines) == len(monthly_avg_duration(corpus).points) + 1

    def test_share_csv_shape(self):
        corpus = build_corpus(3, 60)
        text = share_csv(airport_share_by_year(corpus, ["SFO"]))
        assert text.splitlines()[0] == "year,airport,share"

    def test_html_self_contained(self):
        corpus = build_corpus(3, 60)
        page = report_html("durations", series=monthly_avg_duration(corpus))
        assert page.startswith("<!doctype html>")
        assert "<svg" in page and "</html>" in page
