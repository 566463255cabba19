from __future__ import annotations

import random
from datetime import date

import pytest

from gdpdesk.corpus import Corpus
from gdpdesk.fixtures import build_corpus, generate_advisories
from gdpdesk.model import ConditionCategory, word_count
from gdpdesk.parser import parse_advisory
from gdpdesk.query import (
    ContextStrategy,
    Direction,
    NoMatchError,
    QuerySpec,
    Superlative,
    SuperlativeField,
    find_examples,
    resolve_superlative,
    select_context,
    spec_from_dict,
    spec_to_dict,
)


def sup(field, direction=Direction.HIGHEST, **kw):
    return QuerySpec(superlative=Superlative(field, direction), **kw)


@pytest.fixture(scope="module")
def sfo_corpus(superlative_texts):
    corpus = Corpus()
    corpus.ingest(parse_advisory(t) for t in superlative_texts)
    return corpus


@pytest.fixture(scope="module")
def random_corpus():
    return build_corpus(77, 700)


class TestSuperlatives:
    def test_highest_max_delay_is_exact(self, sfo_corpus):
        result = resolve_superlative(
            sfo_corpus, sup(SuperlativeField.MAX_DELAY, airport="SFO", limit=1)
        )
        assert result.records[0].delays.max_delay == 1444
        assert result.ranking_key == "highest max_delay"

    def test_single_record_corpus(self, ewr_text):
        corpus = Corpus()
        corpus.ingest([parse_advisory(ewr_text)])
        for field in SuperlativeField:
            for direction in Direction:
                result = resolve_superlative(corpus, sup(field, direction))
                assert len(result.records) == 1

    def test_two_way_tie_returns_both_by_id(self, superlative_texts):
        a = parse_advisory(superlative_texts[0].replace(
            "MAX DELAY: 784 MINUTES", "MAX DELAY: 90 MINUTES"
        ).replace("AVG DELAY: 141 MINUTES", "AVG DELAY: 45 MINUTES")).record
        b = parse_advisory(superlative_texts[2].replace(
            "MAX DELAY: 105 MINUTES", "MAX DELAY: 90 MINUTES"
        ).replace("AVG DELAY: 44 MINUTES", "AVG DELAY: 45 MINUTES")).record
        corpus = Corpus()
        corpus.add(a)
        corpus.add(b)
        result = resolve_superlative(corpus, sup(SuperlativeField.MAX_DELAY, limit=2))
        assert {r.id for r in result.records} == {a.id, b.id}
        assert [r.id for r in result.records] == sorted([a.id, b.id])

    def test_ties_ordered_by_id(self):
        texts = generate_advisories(55, 40)
        corpus = Corpus()
        corpus.ingest(parse_advisory(t) for t in texts)
        # duration ties are common in generated data; ask for many
        result = resolve_superlative(
            corpus, sup(SuperlativeField.DURATION_HOURS, limit=40)
        )
        durations = [r.duration_hours for r in result.records]
        assert durations == sorted(durations, reverse=True)
        for a, b in zip(result.records, result.records[1:]):
            if a.duration_hours == b.duration_hours:
                assert a.id < b.id

    def test_empty_filter_raises(self, sfo_corpus):
        with pytest.raises(NoMatchError, match="no matching GDPs"):
            resolve_superlative(
                sfo_corpus, sup(SuperlativeField.MAX_DELAY, airport="JFK")
            )

    def test_records_without_field_skipped(self, random_corpus):
        # cancellations carry no delay stats; they must never win
        result = resolve_superlative(
            random_corpus, sup(SuperlativeField.MAX_DELAY, limit=5)
        )
        assert all(r.delays is not None for r in result.records)

    @pytest.mark.parametrize("seed", range(15))
    def test_agrees_with_brute_force(self, random_corpus, seed):
        rng = random.Random(seed)
        field = rng.choice(list(SuperlativeField))
        direction = rng.choice(list(Direction))
        airport = rng.choice([None, "SFO", "EWR", "ZZA"])
        spec = sup(field, direction, airport=airport, limit=1)

        from gdpdesk.query import _FIELD_VALUE
        values = [
            v
            for r in random_corpus.filter(airport=airport)
            if (v := _FIELD_VALUE[field](r)) is not None
        ]
        if not values:
            with pytest.raises(NoMatchError):
                resolve_superlative(random_corpus, spec)
            return
        expected = max(values) if direction is Direction.HIGHEST else min(values)
        got = resolve_superlative(random_corpus, spec).records[0]
        assert _FIELD_VALUE[field](got) == expected


class TestFindExamples:
    def test_most_recent_weather_example(self, random_corpus):
        spec = QuerySpec(
            airport="SFO", condition_category=ConditionCategory.WEATHER, limit=1
        )
        result = find_examples(random_corpus, spec)
        assert len(result.records) == 1
        top = result.records[0]
        pool = random_corpus.filter(
            airport="SFO", condition_category=ConditionCategory.WEATHER
        )
        assert top.issue_date == max(r.issue_date for r in pool)

    def test_limit_larger_than_corpus(self, sfo_corpus):
        result = find_examples(sfo_corpus, QuerySpec(limit=50))
        assert len(result.records) == len(sfo_corpus)

    def test_empty_result_is_fine(self, sfo_corpus):
        result = find_examples(
            sfo_corpus, QuerySpec(condition_category=ConditionCategory.EQUIPMENT)
        )
        assert result.records == ()

    def test_recency_ordering(self, random_corpus):
        result = find_examples(random_corpus, QuerySpec(limit=30))
        dates = [r.issue_date for r in result.records]
        assert dates == sorted(dates, reverse=True)


class TestSelectContext:
    def test_wordiest_thirteen_of_twenty(self):
        texts = generate_advisories(99, 20)
        corpus = Corpus()
        corpus.ingest(parse_advisory(t) for t in texts)
        selection = select_context(corpus, None, 13, ContextStrategy.WORDIEST)
        assert len(selection.records) == 13
        assert not selection.shortfall

        counts = [word_count(r.raw_text) for r in selection.records]
        assert counts == sorted(counts, reverse=True)
        all_counts = sorted((word_count(r.raw_text) for r in corpus.records()), reverse=True)
        assert counts == all_counts[:13]

    def test_airport_scoped(self, random_corpus):
        selection = select_context(random_corpus, "SFO", 500)
        assert all(r.airport == "SFO" for r in selection.records)
        assert len(selection.records) <= 500

    def test_shortfall_flagged(self, sfo_corpus):
        selection = select_context(sfo_corpus, None, 10)
        assert selection.shortfall
        assert len(selection.records) == 3

    def test_single_record(self, ewr_text):
        corpus = Corpus()
        corpus.ingest([parse_advisory(ewr_text)])
        selection = select_context(corpus, None, 1)
        assert len(selection.records) == 1

    def test_most_recent_strategy(self, random_corpus):
        selection = select_context(random_corpus, None, 25, ContextStrategy.MOST_RECENT)
        dates = [r.issue_date for r in selection.records]
        assert dates == sorted(dates, reverse=True)

    def test_k_validation(self, sfo_corpus):
        with pytest.raises(ValueError):
            select_context(sfo_corpus, None, 0)


class TestDeterminism:
    def test_identical_inputs_identical_outputs(self, random_corpus):
        spec = sup(SuperlativeField.AVG_DELAY, Direction.LOWEST, limit=7)
        first = resolve_superlative(random_corpus, spec)
        second = resolve_superlative(random_corpus, spec)
        assert first == second
        assert find_examples(random_corpus, QuerySpec(limit=9)) == find_examples(
            random_corpus, QuerySpec(limit=9)
        )


class TestSpecDictForm:
    def test_round_trip(self):
        spec = QuerySpec(
            airport="SFO",
            date_range=(date(2020, 1, 1), date(2020, 12, 31)),
            condition_category=ConditionCategory.WEATHER,
            superlative=Superlative(SuperlativeField.MAX_DELAY, Direction.HIGHEST),
            limit=3,
        )
        assert spec_from_dict(spec_to_dict(spec)) == spec

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError, match="unknown query fields"):
            spec_from_dict({"airprot": "SFO"})

    def test_half_date_range_rejected(self):
        with pytest.raises(ValueError, match="together"):
            spec_from_dict({"date_from": "2020-01-01"})

    def test_bad_superlative_rejected(self):
        with pytest.raises(ValueError, match="bad superlative"):
            spec_from_dict({"superlative": {"field": "wingspan", "direction": "highest"}})

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            QuerySpec(limit=0)
