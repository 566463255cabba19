"""Command-line tool: ingest, stats, query, gen-fixtures, serve.

Exit codes: 0 success, 1 usage, 2 I/O, 3 parse, 4 remote endpoint.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from datetime import date
from pathlib import Path
from typing import Optional, Sequence

from .analytics import (
    InsufficientDataError,
    airport_share_by_year,
    duration_csv,
    monthly_avg_duration,
    rate_distribution,
    rates_csv,
    report_html,
    share_csv,
)
from .assistant import (
    AssistantInstance,
    LmEndpointError,
    answer,
    answer_to_dict,
    execute_spec,
)
from .corpus import Corpus, CorpusFormatError
from .fixtures import DEFAULT_AIRPORTS, GeneratorConfig, generate_advisories
from .parser import EnvelopeError, parse_advisory, parse_envelope
from .query import (
    Direction,
    QuerySpec,
    Superlative,
    SuperlativeField,
    spec_from_dict,
)

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_REMOTE = 4

# CLI spellings for superlative fields
_FIELD_FLAGS = {
    "max-delay": SuperlativeField.MAX_DELAY,
    "avg-delay": SuperlativeField.AVG_DELAY,
    "duration": SuperlativeField.DURATION_HOURS,
    "peak-rate": SuperlativeField.PEAK_RATE,
}


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _load_corpus(path: str) -> Corpus:
    try:
        return Corpus.load(path)
    except CorpusFormatError as exc:
        raise CliError(str(exc), EXIT_IO) from exc


def _collect_texts(paths: Sequence[str]) -> list[str]:
    """Advisory texts from files and directories, extension-dispatched.

    ``.xml`` files are envelopes; anything else is one advisory per file.
    Directories are walked non-recursively in sorted order.
    """
    files: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            files.extend(sorted(child for child in p.iterdir() if child.is_file()))
        elif p.exists():
            files.append(p)
        else:
            raise CliError(f"no such file or directory: {p}", EXIT_IO)

    texts: list[str] = []
    for file in files:
        try:
            content = file.read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read {file}: {exc}", EXIT_IO) from exc
        if file.suffix.lower() == ".xml":
            try:
                envelope = parse_envelope(content)
            except EnvelopeError as exc:
                raise CliError(f"{file}: {exc}", EXIT_PARSE) from exc
            texts.extend(entry.text for entry in envelope.entries)
        else:
            texts.append(content)
    return texts


def cmd_ingest(args: argparse.Namespace) -> int:
    texts = _collect_texts(args.paths)
    corpus = _load_corpus(args.corpus) if Path(args.corpus).exists() else Corpus()
    report = corpus.ingest(parse_advisory(t) for t in texts)
    corpus.check_indexes()
    try:
        corpus.save(args.corpus)
    except OSError as exc:
        raise CliError(f"cannot write corpus: {exc}", EXIT_IO) from exc
    print(
        f"accepted={report.accepted} duplicates={report.duplicates} "
        f"failed={report.failed} warnings={report.warnings_total}"
    )
    return 0


def _month_arg(value: Optional[str], end: bool) -> Optional[date]:
    if not value:
        return None
    import calendar

    parts = value.split("-")
    try:
        if len(parts) == 2:
            year, month = int(parts[0]), int(parts[1])
            day = calendar.monthrange(year, month)[1] if end else 1
            return date(year, month, day)
        return date.fromisoformat(value)
    except ValueError as exc:
        raise CliError(f"bad date {value!r}: {exc}", EXIT_USAGE) from exc


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    date_from = _month_arg(getattr(args, "from"), end=False)
    date_to = _month_arg(args.to, end=True)
    date_range = (date_from, date_to) if date_from and date_to else None

    if args.report == "monthly-duration":
        series = monthly_avg_duration(corpus, date_range)
        csv_text = duration_csv(series)
        html = report_html("Monthly mean GDP duration", series=series)
    elif args.report == "airport-share":
        tracked = (
            [a.strip().upper() for a in args.airports.split(",") if a.strip()]
            if args.airports
            else [a for a in DEFAULT_AIRPORTS if not a.startswith("ZZ")]
        )
        table = airport_share_by_year(corpus, tracked)
        csv_text = share_csv(table)
        html = report_html("GDP share by airport", table=table)
    elif args.report == "rate-distribution":
        if not args.airport:
            raise CliError("rate-distribution requires --airport", EXIT_USAGE)
        try:
            dist = rate_distribution(corpus, args.airport, date_range)
        except InsufficientDataError as exc:
            raise CliError(str(exc), EXIT_USAGE) from exc
        csv_text = rates_csv(dist)
        html = report_html(f"GDP rate distribution at {dist.airport}", dist=dist)
    else:   # argparse choices prevent this
        raise CliError(f"unknown report {args.report}", EXIT_USAGE)

    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.html:
        Path(args.html).write_text(html, encoding="utf-8")
    return 0


def _spec_from_flags(args: argparse.Namespace) -> QuerySpec:
    superlative = None
    if args.superlative:
        superlative = {
            "field": _FIELD_FLAGS[args.superlative].value,
            "direction": args.direction,
        }
    data = {
        "airport": args.airport,
        "date_from": getattr(args, "from"),
        "date_to": args.to,
        "condition": args.condition,
        "kind": args.kind,
        "superlative": superlative,
        "limit": args.limit,
    }
    try:
        return spec_from_dict(data)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def cmd_query(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    if args.text:
        if not args.airport:
            raise CliError("--text queries need --airport for instance scope", EXIT_USAGE)
        instance = AssistantInstance(airport=args.airport)
        endpoint = None
        degrade = True
        budget = None
        if args.config:
            from .config import ConfigError, load_config

            try:
                service = load_config(args.config)
            except ConfigError as exc:
                raise CliError(str(exc), EXIT_USAGE) from exc
            configured = {i.airport: i for i in service.instances}
            instance = configured.get(args.airport.upper(), instance)
            endpoint = service.endpoint
            if endpoint is not None:
                endpoint = dataclasses.replace(
                    endpoint, credential=endpoint.resolve_credential()
                )
            degrade = service.degrade
            budget = service.context_budget
        try:
            kwargs = {"endpoint": endpoint, "degrade": degrade}
            if budget is not None:
                kwargs["char_budget"] = budget
            ans = answer(instance, corpus, args.text, **kwargs)
        except LmEndpointError as exc:
            raise CliError(str(exc), EXIT_REMOTE) from exc
    else:
        ans = execute_spec(corpus, _spec_from_flags(args))

    if args.json:
        print(json.dumps(answer_to_dict(ans), ensure_ascii=False))
    else:
        print(ans.as_text())
    return 0


def cmd_gen_fixtures(args: argparse.Namespace) -> int:
    config = GeneratorConfig(
        airports=tuple(a.strip().upper() for a in args.airports.split(",")),
        start_year=args.start_year,
        end_year=args.end_year,
    )
    texts = generate_advisories(args.seed, args.count, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.envelope:
        from .parser import EnvelopeEntry, write_envelope

        entries = [EnvelopeEntry(text=t, source_id=f"seed{args.seed}-{i+1}")
                   for i, t in enumerate(texts)]
        (out / "advisories.xml").write_text(write_envelope(entries), encoding="utf-8")
    else:
        for i, text in enumerate(texts):
            (out / f"gdp_{i+1:05d}.txt").write_text(text, encoding="utf-8")
    print(f"wrote {len(texts)} advisories to {out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app
    from .config import ConfigError, load_config

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    corpus = _load_corpus(config.corpus_path)
    endpoint = config.endpoint
    if endpoint is not None:
        # snapshot the credential once at startup; it stays out of logs
        endpoint = dataclasses.replace(endpoint, credential=endpoint.resolve_credential())
    app = create_app(
        corpus,
        list(config.instances),
        endpoint=endpoint,
        context_budget=config.context_budget,
        degrade=config.degrade,
        ui_dist=str(config.ui_dist) if config.ui_dist else None,
    )
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gdpdesk",
        description="Parse, index, and query historical GDP advisories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse advisory files into a corpus")
    p.add_argument("paths", nargs="+", help="advisory files, envelopes, or directories")
    p.add_argument("--corpus", required=True, help="corpus file to create or extend")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="emit a corpus report as CSV")
    p.add_argument("report", choices=["monthly-duration", "airport-share", "rate-distribution"])
    p.add_argument("--corpus", required=True)
    p.add_argument("--from", dest="from", default=None, metavar="YYYY-MM")
    p.add_argument("--to", default=None, metavar="YYYY-MM")
    p.add_argument("--airport", default=None, help="airport for rate-distribution")
    p.add_argument("--airports", default=None, help="comma list for airport-share")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--html", default=None, help="also write a self-contained HTML page")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("query", help="answer a structured or free-text query")
    p.add_argument("--corpus", required=True)
    p.add_argument("--text", default=None, help="free-text question (needs --airport)")
    p.add_argument("--config", default=None,
                   help="service config supplying the remote endpoint for --text")
    p.add_argument("--airport", default=None)
    p.add_argument("--from", dest="from", default=None, metavar="YYYY-MM-DD")
    p.add_argument("--to", default=None, metavar="YYYY-MM-DD")
    p.add_argument("--condition", default=None,
                   choices=["weather", "volume", "equipment", "runway_construction", "other"])
    p.add_argument("--kind", default=None,
                   choices=["proposed", "actual", "revision", "cancellation"])
    p.add_argument("--superlative", default=None, choices=sorted(_FIELD_FLAGS))
    p.add_argument("--direction", default="highest", choices=["highest", "lowest"])
    p.add_argument("--limit", type=int, default=5)
    p.add_argument("--json", action="store_true", help="emit the answer as JSON")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("gen-fixtures", help="write seeded synthetic advisories")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--airports", default=",".join(DEFAULT_AIRPORTS))
    p.add_argument("--start-year", type=int, default=2010)
    p.add_argument("--end-year", type=int, default=2023)
    p.add_argument("--envelope", action="store_true",
                   help="write one envelope file instead of per-advisory files")
    p.set_defaults(func=cmd_gen_fixtures)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
