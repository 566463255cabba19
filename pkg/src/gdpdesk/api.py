"""HTTP API: instances, queries, record lookup, and stats reports.

The service is stateless between requests; the corpus is loaded once and
treated as immutable, so restarts reproduce identical responses. Every
JSON response (including errors) carries the non-predictive disclaimer.
"""

from __future__ import annotations

import calendar
from datetime import date
from typing import Any, Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .analytics import (
    InsufficientDataError,
    airport_share_by_year,
    monthly_avg_duration,
    rate_distribution,
)
from .assistant import (
    AssistantInstance,
    DISCLAIMER,
    EndpointConfig,
    LmEndpointError,
    answer,
    answer_to_dict,
    execute_spec,
)
from .corpus import Corpus
from .fixtures import DEFAULT_AIRPORTS
from .model import record_to_dict
from .query import scoped_to_airport, spec_from_dict

STATS_REPORTS = ("monthly-duration", "airport-share", "rate-distribution")


class ApiError(Exception):
    def __init__(self, status_code: int, detail: str, **extra: Any) -> None:
        super().__init__(detail)
        self.status_code = status_code
        self.detail = detail
        self.extra = extra


def _parse_month(value: str, end: bool) -> date:
    """Accept YYYY-MM (month granularity) or a full YYYY-MM-DD date."""
    parts = value.split("-")
    try:
        if len(parts) == 2:
            year, month = int(parts[0]), int(parts[1])
            day = calendar.monthrange(year, month)[1] if end else 1
            return date(year, month, day)
        return date.fromisoformat(value)
    except ValueError as exc:
        raise ApiError(422, f"bad date filter {value!r}: {exc}") from exc


def _date_range(
    from_: Optional[str], to: Optional[str]
) -> Optional[tuple[date, date]]:
    if not from_ and not to:
        return None
    if not (from_ and to):
        raise ApiError(422, "from and to must be given together")
    return (_parse_month(from_, end=False), _parse_month(to, end=True))


def create_app(
    corpus: Corpus,
    instances: list[AssistantInstance],
    endpoint: Optional[EndpointConfig] = None,
    context_budget: int = 60_000,
    degrade: bool = True,
    ui_dist: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="gdpdesk", docs_url=None, redoc_url=None)
    by_airport = {inst.airport: inst for inst in instances}

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError) -> JSONResponse:
        body = {"detail": exc.detail, "disclaimer": DISCLAIMER, **exc.extra}
        return JSONResponse(body, status_code=exc.status_code)

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(request: Request, exc) -> JSONResponse:
        return JSONResponse(
            {"detail": exc.detail, "disclaimer": DISCLAIMER}, status_code=exc.status_code
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc) -> JSONResponse:
        return JSONResponse(
            {"detail": str(exc), "disclaimer": DISCLAIMER}, status_code=422
        )

    @app.get("/instances")
    def list_instances() -> dict:
        return {
            "instances": [
                {
                    "airport": inst.airport,
                    "record_count": len(corpus.filter(airport=inst.airport)),
                    "context_size": inst.context_size,
                    "temperature": inst.generation_temperature,
                    "backend": inst.backend.value,
                }
                for inst in instances
            ],
            "disclaimer": DISCLAIMER,
        }

    @app.post("/instances/{airport}/query")
    def query_instance(airport: str, body: dict = Body(...)) -> dict:
        inst = by_airport.get(airport.upper())
        if inst is None:
            raise ApiError(404, f"unknown instance {airport!r}")

        if "text" in body:
            text = body.get("text")
            if not isinstance(text, str) or not text.strip():
                raise ApiError(422, "empty query")
            try:
                ans = answer(
                    inst, corpus, text,
                    endpoint=endpoint, char_budget=context_budget, degrade=degrade,
                )
            except LmEndpointError as exc:
                raise ApiError(502, f"remote endpoint failure: {exc}") from exc
            return answer_to_dict(ans)

        if not body:
            raise ApiError(422, "empty query")
        try:
            spec = spec_from_dict(body)
        except ValueError as exc:
            raise ApiError(422, str(exc)) from exc
        ans = execute_spec(corpus, scoped_to_airport(spec, inst.airport))
        return answer_to_dict(ans)

    @app.get("/advisories/{record_id}")
    def get_advisory(record_id: str) -> dict:
        record = corpus.get(record_id)
        if record is None:
            raise ApiError(404, f"unknown advisory id {record_id!r}")
        return {"record": record_to_dict(record), "disclaimer": DISCLAIMER}

    @app.get("/stats/{report}")
    def get_stats(
        report: str,
        from_: Optional[str] = Query(None, alias="from"),
        to: Optional[str] = None,
        airport: Optional[str] = None,
        airports: Optional[str] = None,
    ) -> dict:
        date_range = _date_range(from_, to)
        if report == "monthly-duration":
            series = monthly_avg_duration(corpus, date_range)
            payload: Any = [
                {
                    "year": p.year,
                    "month": p.month,
                    "gdp_count": p.gdp_count,
                    "mean_duration_hours": p.mean_duration_hours,
                }
                for p in series.points
            ]
        elif report == "airport-share":
            tracked = (
                [a.strip().upper() for a in airports.split(",") if a.strip()]
                if airports
                else [a for a in DEFAULT_AIRPORTS if not a.startswith("ZZ")]
            )
            table = airport_share_by_year(corpus, tracked)
            payload = [
                {"year": r.year, "airport": r.airport, "share": r.share}
                for r in table.rows
            ]
        elif report == "rate-distribution":
            if not airport:
                raise ApiError(422, "rate-distribution requires an airport parameter")
            try:
                dist = rate_distribution(corpus, airport, date_range)
            except InsufficientDataError as exc:
                raise ApiError(404, str(exc)) from exc
            payload = {
                "airport": dist.airport,
                "min": dist.minimum,
                "q1": dist.q1,
                "median": dist.median,
                "q3": dist.q3,
                "max": dist.maximum,
                "sample_count": dist.sample_count,
            }
        else:
            raise ApiError(
                404, f"unknown report {report!r}", valid=list(STATS_REPORTS)
            )
        return {"report": report, "data": payload, "disclaimer": DISCLAIMER}

    if ui_dist:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app
