from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from gdpdesk.cli import EXIT_IO, EXIT_PARSE, EXIT_USAGE, main
from gdpdesk.corpus import Corpus

from conftest import TESTDATA


def run_cli(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture()
def fixture_dir(tmp_path):
    code = main([
        "gen-fixtures", "--seed", "7", "--count", "40", "--out", str(tmp_path / "fx"),
    ])
    assert code == 0
    return tmp_path / "fx"


@pytest.fixture()
def corpus_file(tmp_path, fixture_dir, capsys):
    path = tmp_path / "corpus.jsonl"
    code, _ = run_cli(capsys, "ingest", str(fixture_dir), "--corpus", str(path))
    assert code == 0
    return path


class TestGenFixtures:
    def test_seeded_runs_byte_identical(self, tmp_path, capsys):
        for name in ("a", "b"):
            code, _ = run_cli(
                capsys, "gen-fixtures", "--seed", "7", "--count", "25",
                "--out", str(tmp_path / name),
            )
            assert code == 0
        files_a = sorted((tmp_path / "a").iterdir())
        files_b = sorted((tmp_path / "b").iterdir())
        assert [f.name for f in files_a] == [f.name for f in files_b]
        for fa, fb in zip(files_a, files_b):
            assert fa.read_bytes() == fb.read_bytes()

    def test_envelope_output(self, tmp_path, capsys):
        code, _ = run_cli(
            capsys, "gen-fixtures", "--seed", "3", "--count", "10",
            "--out", str(tmp_path / "env"), "--envelope",
        )
        assert code == 0
        assert (tmp_path / "env" / "advisories.xml").exists()


class TestIngest:
    def test_accepted_equals_fixture_count(self, fixture_dir, tmp_path, capsys):
        corpus_path = tmp_path / "c.jsonl"
        code, out = run_cli(capsys, "ingest", str(fixture_dir), "--corpus", str(corpus_path))
        assert code == 0
        assert "accepted=40" in out
        assert "failed=0" in out
        assert len(Corpus.load(corpus_path)) == 40

    def test_golden_fixture_files(self, tmp_path, capsys):
        corpus_path = tmp_path / "golden.jsonl"
        code, out = run_cli(
            capsys, "ingest",
            str(TESTDATA / "ewr_20221118.txt"),
            str(TESTDATA / "sfo_20181115.txt"),
            str(TESTDATA / "superlative"),
            "--corpus", str(corpus_path),
        )
        assert code == 0
        assert "accepted=5" in out

    def test_envelope_dispatch(self, tmp_path, capsys):
        corpus_path = tmp_path / "env.jsonl"
        code, out = run_cli(
            capsys, "ingest", str(TESTDATA / "envelope_sample.xml"),
            "--corpus", str(corpus_path),
        )
        assert code == 0
        assert "accepted=3" in out

    def test_reingest_deduplicates(self, fixture_dir, corpus_file, capsys):
        code, out = run_cli(capsys, "ingest", str(fixture_dir), "--corpus", str(corpus_file))
        assert code == 0
        assert "accepted=0" in out and "duplicates=40" in out

    def test_missing_path_exit_io(self, tmp_path, capsys):
        code, _ = run_cli(capsys, "ingest", str(tmp_path / "ghost"), "--corpus",
                          str(tmp_path / "c.jsonl"))
        assert code == EXIT_IO

    def test_malformed_envelope_exit_parse(self, tmp_path, capsys):
        bad = tmp_path / "bad.xml"
        bad.write_text("<advisories><advisory>unclosed")
        code, _ = run_cli(capsys, "ingest", str(bad), "--corpus", str(tmp_path / "c.jsonl"))
        assert code == EXIT_PARSE


class TestStats:
    def test_monthly_duration_csv(self, corpus_file, tmp_path, capsys):
        out_csv = tmp_path / "duration.csv"
        code, _ = run_cli(
            capsys, "stats", "monthly-duration", "--corpus", str(corpus_file),
            "--out", str(out_csv),
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "year,month,gdp_count,mean_duration_hours"
        assert len(lines) > 1

    def test_html_page(self, corpus_file, tmp_path, capsys):
        page = tmp_path / "report.html"
        code, _ = run_cli(
            capsys, "stats", "airport-share", "--corpus", str(corpus_file),
            "--html", str(page),
        )
        assert code == 0
        assert page.read_text().startswith("<!doctype html>")

    def test_rate_distribution_needs_airport(self, corpus_file, capsys):
        code, _ = run_cli(capsys, "stats", "rate-distribution", "--corpus", str(corpus_file))
        assert code == EXIT_USAGE

    def test_missing_corpus_exit_io(self, tmp_path, capsys):
        code, _ = run_cli(
            capsys, "stats", "monthly-duration", "--corpus", str(tmp_path / "none.jsonl")
        )
        assert code == EXIT_IO


class TestQuery:
    def test_bulleted_list_order(self, corpus_file, capsys):
        code, out = run_cli(
            capsys, "query", "--corpus", str(corpus_file),
            "--airport", "SFO", "--superlative", "max-delay",
        )
        assert code == 0
        labels = [line.split(":")[0] for line in out.splitlines() if line.startswith("- ")]
        assert labels == [
            "- date", "- start time", "- end time", "- program rate",
            "- runway configuration", "- impacting condition",
        ]

    def test_json_output(self, corpus_file, capsys):
        code, out = run_cli(
            capsys, "query", "--corpus", str(corpus_file),
            "--airport", "SFO", "--superlative", "max-delay", "--json",
        )
        assert code == 0
        body = json.loads(out)
        assert body["answer_mode"] == "deterministic"
        assert body["sources"]

    def test_free_text_query(self, corpus_file, capsys):
        code, out = run_cli(
            capsys, "query", "--corpus", str(corpus_file),
            "--airport", "SFO", "--text", "which gdp at sfo had the highest max delay",
        )
        assert code == 0
        assert "- impacting condition:" in out

    def test_text_without_airport_is_usage_error(self, corpus_file, capsys):
        code, _ = run_cli(
            capsys, "query", "--corpus", str(corpus_file), "--text", "anything"
        )
        assert code == EXIT_USAGE

    def test_remote_failure_exit_code(self, corpus_file, tmp_path, capsys):
        from gdpdesk.cli import EXIT_REMOTE
        from gdpdesk.stub_lm import StubLmServer

        with StubLmServer(mode="fault") as stub:
            config = tmp_path / "svc.ini"
            config.write_text(
                "[service]\n"
                f"corpus = {corpus_file}\n"
                "degrade = false\n\n"
                "[endpoint]\n"
                f"url = {stub.url}\n\n"
                "[instance.SFO]\n"
                "backend = remote_lm\n"
            )
            code, _ = run_cli(
                capsys, "query", "--corpus", str(corpus_file), "--airport", "SFO",
                "--config", str(config), "--text", "tell me about recent operations",
            )
        assert code == EXIT_REMOTE

    def test_remote_config_uses_stub_narrative(self, corpus_file, tmp_path, capsys):
        from gdpdesk.stub_lm import StubLmServer

        with StubLmServer(mode="fixed", fixed_text="words from the endpoint") as stub:
            config = tmp_path / "svc.ini"
            config.write_text(
                "[service]\n"
                f"corpus = {corpus_file}\n\n"
                "[endpoint]\n"
                f"url = {stub.url}\n\n"
                "[instance.SFO]\n"
                "backend = remote_lm\n"
            )
            code, out = run_cli(
                capsys, "query", "--corpus", str(corpus_file), "--airport", "SFO",
                "--config", str(config), "--text", "tell me about recent operations",
                "--json",
            )
        assert code == 0
        body = json.loads(out)
        assert body["narrative"] == "words from the endpoint"
        assert body["answer_mode"] == "remote_lm"

    def test_disclaimer_printed(self, corpus_file, capsys):
        _, out = run_cli(
            capsys, "query", "--corpus", str(corpus_file), "--airport", "SFO",
            "--superlative", "max-delay",
        )
        assert "not a predictive tool" in out


class TestEntryPoint:
    def test_usage_error_exit_code(self, capsys):
        assert main(["no-such-command"]) == EXIT_USAGE

    def test_subprocess_smoke(self, tmp_path):
        result = subprocess.run(
            [sys.executable, "-m", "gdpdesk.cli", "gen-fixtures", "--seed", "1",
             "--count", "3", "--out", str(tmp_path / "fx")],
            capture_output=True, text=True,
        )
        assert result.returncode == 0
        assert "wrote 3 advisories" in result.stdout
