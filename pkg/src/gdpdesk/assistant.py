"""Per-airport assistant: hybrid deterministic / language-model answering.

Structured questions (superlatives, parameter lookups, example requests)
are answered entirely by the deterministic query engine. Free-form
questions go through a retrieval-plus-prompt pipeline against a pluggable
chat-completion endpoint, but the six numeric answer fields are always
back-filled from parsed records, never taken from generated text. When
the remote endpoint fails, answering degrades to the deterministic
template summarizer instead of failing the query.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
import threading
import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import requests

from .corpus import Corpus
from .model import AdvisoryKind, ConditionCategory, GdpRecord, validate_airport_code
from .parser import classify_condition, parse_issue_date
from .query import (
    ContextStrategy,
    Direction,
    NoMatchError,
    QuerySpec,
    Superlative,
    SuperlativeField,
    find_examples,
    resolve_superlative,
    scoped_to_airport,
    select_context,
)

log = logging.getLogger(__name__)

DEFAULT_CONTEXT_SIZE = 500
DEFAULT_TEMPERATURE = 0.2
DEFAULT_CONTEXT_BUDGET = 60_000   # characters of advisory text per prompt

# fixed system instructions: the six answer fields, the output shape, and
# the expectation-setting line
SYSTEM_FIELD_INSTRUCTION = (
    "Give me date, start time, end time, program rate, runway configuration "
    "and impacting condition."
)
SYSTEM_FORMAT_INSTRUCTION = "Give your response in a bulleted list."
SYSTEM_DISCLAIMER_INSTRUCTION = (
    "You summarize historical Ground Delay Program advisories only; state "
    "that you are not a predictive tool if asked about the future."
)

DISCLAIMER = (
    "Summaries describe historical Ground Delay Program advisories. "
    "This is not a predictive tool and makes no operational recommendations."
)

BULLET_LABELS = (
    "date",
    "start time",
    "end time",
    "program rate",
    "runway configuration",
    "impacting condition",
)
UNAVAILABLE = "unavailable"
NO_MATCH_NARRATIVE = "no matching GDPs found"
DEGRADED_NOTICE = "(remote language model unavailable; deterministic summary shown)"


class Backend(Enum):
    DETERMINISTIC = "deterministic"
    REMOTE_LM = "remote_lm"


class PromptError(ValueError):
    """Context assembly failed (empty corpus or budget too small)."""


class LmEndpointError(RuntimeError):
    """Remote completion failed; ``retryable`` hints whether a retry may help."""

    def __init__(self, message: str, retryable: bool) -> None:
        super().__init__(message)
        self.retryable = retryable


@dataclass(frozen=True)
class AssistantInstance:
    airport: str
    context_size: int = DEFAULT_CONTEXT_SIZE
    generation_temperature: float = DEFAULT_TEMPERATURE
    backend: Backend = Backend.DETERMINISTIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "airport", validate_airport_code(self.airport))
        if self.context_size < 1:
            raise ValueError("context_size must be >= 1")
        if not 0.0 <= self.generation_temperature <= 2.0:
            raise ValueError("generation_temperature must be within [0, 2]")


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    credential_env: str = "GDPDESK_LM_API_KEY"
    model: str = "default"
    timeout_seconds: float = 10.0
    max_in_flight: int = 4             # cap on concurrent remote calls
    credential: Optional[str] = None   # resolved at startup; never logged

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")

    def resolve_credential(self) -> Optional[str]:
        return self.credential or os.environ.get(self.credential_env)


# one shared limiter per (equal) endpoint config; concurrent calls beyond
# the cap queue here rather than piling onto the remote service
_LIMITERS: "weakref.WeakKeyDictionary[EndpointConfig, threading.BoundedSemaphore]"
_LIMITERS = weakref.WeakKeyDictionary()
_LIMITERS_LOCK = threading.Lock()


def _limiter(endpoint: EndpointConfig) -> threading.BoundedSemaphore:
    with _LIMITERS_LOCK:
        semaphore = _LIMITERS.get(endpoint)
        if semaphore is None:
            semaphore = threading.BoundedSemaphore(endpoint.max_in_flight)
            _LIMITERS[endpoint] = semaphore
        return semaphore


@dataclass(frozen=True)
class PromptBundle:
    system_lines: tuple[str, ...]
    context_block: str
    user_query: str

    def __post_init__(self) -> None:
        for required in (SYSTEM_FIELD_INSTRUCTION, SYSTEM_FORMAT_INSTRUCTION):
            if required not in self.system_lines:
                raise ValueError("prompt is missing a fixed system instruction")

    def sha256(self) -> str:
        payload = "\n".join(self.system_lines) + "\n" + self.context_block + "\n" + self.user_query
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class StructuredAnswer:
    bullets: tuple[tuple[str, str], ...]
    sources: tuple[str, ...]
    answer_mode: Backend
    narrative: Optional[str] = None
    disclaimer: str = DISCLAIMER

    def __post_init__(self) -> None:
        if tuple(label for label, _ in self.bullets) != BULLET_LABELS:
            raise ValueError("bullets must carry the six fixed labels in order")
        has_values = any(value != UNAVAILABLE for _, value in self.bullets)
        if has_values and not self.sources:
            raise ValueError("answers with field values must cite source records")

    def bullet(self, label: str) -> str:
        return dict(self.bullets)[label]

    def as_text(self) -> str:
        lines = [f"- {label}: {value}" for label, value in self.bullets]
        if self.narrative:
            lines.append("")
            lines.append(self.narrative)
        if self.sources:
            lines.append(f"sources: {', '.join(self.sources)}")
        lines.append(self.disclaimer)
        return "\n".join(lines)


@dataclass(frozen=True)
class RoutedQuery:
    spec: Optional[QuerySpec] = None   # None means free-form

    @property
    def structured(self) -> bool:
        return self.spec is not None


# --- query routing -------------------------------------------------------------

_AIRPORT_AT_RE = re.compile(r"\b(?:at|for)\s+([a-z]{3})\b")
_DATE_LITERAL_RE = re.compile(r"\b(\d{1,4}[/-]\d{1,2}[/-]\d{1,4})\b")
_DUE_TO_RE = re.compile(r"\bdue\s+to\s+([a-z ]+)")
_SUPERLATIVE_DIRECTIONS = {
    "highest": Direction.HIGHEST,
    "most": Direction.HIGHEST,
    "lowest": Direction.LOWEST,
    "least": Direction.LOWEST,
}
_SUPERLATIVE_FIELDS = (
    (re.compile(r"\bmax(?:imum)?\s+delay"), SuperlativeField.MAX_DELAY),
    (re.compile(r"\bav(?:era)?ge?\s+delay|\bavg\s+delay"), SuperlativeField.AVG_DELAY),
    (re.compile(r"\bduration|\blongest\b|\bshortest\b"), SuperlativeField.DURATION_HOURS),
    (re.compile(r"\brate"), SuperlativeField.PEAK_RATE),
)
_LOOKUP_RE = re.compile(r"\brate\s+of\b|\bwhy\s+was\b|\breason\s+for\b")
_KIND_PATTERNS = (
    (re.compile(r"\bcancell?(?:ed|ation|ations)?\b"), AdvisoryKind.CANCELLATION),
    (re.compile(r"\brevisions?\b|\brevised\b"), AdvisoryKind.REVISION),
    (re.compile(r"\bproposed\b"), AdvisoryKind.PROPOSED),
)


def route_query(text: str) -> RoutedQuery:
    """Keyword router: structured QuerySpec where possible, else free-form.

    Structured triggers are superlative phrasing, example requests,
    parameter lookups ("rate of", "why was"), date literals, and
    "due to <condition>" filters. Anything else goes to the language
    model path.
    """
    if not text.strip():
        raise ValueError("empty query")
    lowered = " ".join(text.lower().split())

    airport = None
    m = _AIRPORT_AT_RE.search(lowered)
    if m:
        airport = m.group(1).upper()

    date_range = None
    m = _DATE_LITERAL_RE.search(lowered)
    if m:
        try:
            day = parse_issue_date(m.group(1).replace("-", "/"))
            date_range = (day, day)
        except ValueError:
            date_range = None

    condition = None
    m = _DUE_TO_RE.search(lowered)
    if m:
        classified = classify_condition(m.group(1).strip())
        if classified.category is not ConditionCategory.OTHER or classified.detail:
            condition = classified.category

    kind = None
    for pattern, candidate in _KIND_PATTERNS:
        if pattern.search(lowered):
            kind = candidate
            break

    superlative = None
    for marker, direction in _SUPERLATIVE_DIRECTIONS.items():
        if re.search(rf"\b{marker}\b", lowered):
            for pattern, field_ in _SUPERLATIVE_FIELDS:
                if pattern.search(lowered):
                    superlative = Superlative(field_, direction)
                    break
            if superlative is None:
                return RoutedQuery()   # superlative phrasing we cannot pin down
            break

    wants_example = bool(re.search(r"\bexamples?\b", lowered))
    is_lookup = bool(_LOOKUP_RE.search(lowered)) or date_range is not None

    if superlative:
        return RoutedQuery(QuerySpec(
            airport=airport, date_range=date_range, condition_category=condition,
            kind=kind, superlative=superlative, limit=1,
        ))
    if wants_example:
        return RoutedQuery(QuerySpec(
            airport=airport, date_range=date_range, condition_category=condition,
            kind=kind, limit=1,
        ))
    if is_lookup or condition is not None:
        return RoutedQuery(QuerySpec(
            airport=airport, date_range=date_range, condition_category=condition,
            kind=kind,
        ))
    return RoutedQuery()


# --- prompt assembly -----------------------------------------------------------

def build_prompt(
    instance: AssistantInstance,
    corpus: Corpus,
    user_query: str,
    char_budget: int = DEFAULT_CONTEXT_BUDGET,
) -> PromptBundle:
    """Assemble the wordiest-advisory context and fixed instructions.

    Whole advisories only: the context is the longest prefix of the ranked
    selection that fits the character budget.
    """
    selection = select_context(
        corpus, instance.airport, instance.context_size, ContextStrategy.WORDIEST
    )
    if not selection.records:
        raise PromptError("no context available")

    texts: list[str] = []
    used = 0
    for record in selection.records:
        cost = len(record.raw_text) + (2 if texts else 0)   # "\n\n" separator
        if used + cost > char_budget:
            break
        texts.append(record.raw_text)
        used += cost
    if not texts:
        raise PromptError("context budget too small")

    return PromptBundle(
        system_lines=(
            SYSTEM_FIELD_INSTRUCTION,
            SYSTEM_FORMAT_INSTRUCTION,
            SYSTEM_DISCLAIMER_INSTRUCTION,
        ),
        context_block="\n\n".join(texts),
        user_query=user_query,
    )


# --- deterministic summarization -----------------------------------------------

_KIND_PHRASES = {
    AdvisoryKind.PROPOSED: "Proposed ground delay",
    AdvisoryKind.ACTUAL: "Ground delay program",
    AdvisoryKind.REVISION: "Ground delay revision",
    AdvisoryKind.CANCELLATION: "Ground delay cancellation",
}


def _end_time_text(record: GdpRecord) -> str:
    w = record.arrival_window
    text = f"{w.end:%H:%M} UTC"
    extra_days = (w.end.date() - w.start.date()).days
    if extra_days == 1:
        text += " (next day)"
    elif extra_days > 1:
        text += f" (+{extra_days} days)"
    return text


def summarize_deterministic(
    record: GdpRecord,
    extra_sources: tuple[str, ...] = (),
    answer_mode: Backend = Backend.DETERMINISTIC,
    narrative: Optional[str] = None,
) -> StructuredAnswer:
    """Template answer filled directly from one parsed record."""
    condition = record.condition
    condition_text = condition.as_text() if (condition.detail or
                                             condition.category is not ConditionCategory.OTHER) \
        else UNAVAILABLE
    bullets = (
        ("date", record.issue_date.isoformat()),
        ("start time", f"{record.arrival_window.start:%H:%M} UTC"),
        ("end time", _end_time_text(record)),
        ("program rate", record.rates.as_text() if record.rates else UNAVAILABLE),
        ("runway configuration", record.runway_configuration or UNAVAILABLE),
        ("impacting condition", condition_text),
    )
    if narrative is None:
        narrative = f"{_KIND_PHRASES[record.kind]} at {record.airport} on {record.issue_date.isoformat()}"
        if condition_text != UNAVAILABLE:
            narrative += f" due to {condition_text}"
        narrative += "."
    return StructuredAnswer(
        bullets=bullets,
        sources=(record.id, *extra_sources),
        answer_mode=answer_mode,
        narrative=narrative,
    )


def no_match_answer() -> StructuredAnswer:
    return StructuredAnswer(
        bullets=tuple((label, UNAVAILABLE) for label in BULLET_LABELS),
        sources=(),
        answer_mode=Backend.DETERMINISTIC,
        narrative=NO_MATCH_NARRATIVE,
    )


def execute_spec(corpus: Corpus, spec: QuerySpec) -> StructuredAnswer:
    """Run one structured query and render its first-ranked record.

    Additional ranked records are cited in sources. Shared by the CLI and
    the HTTP API so both surfaces answer identically.
    """
    try:
        if spec.superlative:
            result = resolve_superlative(corpus, spec)
        else:
            result = find_examples(corpus, spec)
    except NoMatchError:
        return no_match_answer()
    if not result.records:
        return no_match_answer()
    top, rest = result.records[0], result.records[1:]
    return summarize_deterministic(top, extra_sources=tuple(r.id for r in rest))


def answer_to_dict(ans: StructuredAnswer) -> dict:
    """JSON-ready encoding used by the HTTP API and the CLI --json output."""
    return {
        "bullets": [{"label": label, "value": value} for label, value in ans.bullets],
        "narrative": ans.narrative,
        "sources": list(ans.sources),
        "answer_mode": ans.answer_mode.value,
        "disclaimer": ans.disclaimer,
    }


# --- remote completion ----------------------------------------------------------

def lm_complete(endpoint: EndpointConfig, prompt: PromptBundle, temperature: float) -> str:
    """One chat-completion call; returns the completion text.

    The request is logged by prompt hash only; the credential never
    appears in logs or errors.
    """
    messages = [{"role": "system", "content": line} for line in prompt.system_lines]
    messages.append(
        {"role": "system", "content": "Historical GDP advisories:\n\n" + prompt.context_block}
    )
    messages.append({"role": "user", "content": prompt.user_query})
    payload = {"model": endpoint.model, "messages": messages, "temperature": temperature}

    headers = {}
    credential = endpoint.resolve_credential()
    if credential:
        headers["Authorization"] = f"Bearer {credential}"

    log.info(
        "lm request prompt_sha256=%s temperature=%s endpoint=%s",
        prompt.sha256(), temperature, endpoint.url,
    )
    try:
        with _limiter(endpoint):
            response = requests.post(
                endpoint.url, json=payload, headers=headers,
                timeout=endpoint.timeout_seconds,
            )
    except requests.Timeout as exc:
        raise LmEndpointError(f"endpoint timed out after {endpoint.timeout_seconds}s",
                              retryable=True) from exc
    except requests.RequestException as exc:
        raise LmEndpointError(f"endpoint unreachable: {exc.__class__.__name__}",
                              retryable=True) from exc

    if response.status_code >= 500:
        raise LmEndpointError(f"endpoint error {response.status_code}", retryable=True)
    if response.status_code >= 400:
        raise LmEndpointError(f"endpoint rejected request ({response.status_code})",
                              retryable=False)
    try:
        content = response.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise LmEndpointError("malformed completion payload", retryable=False) from exc
    log.info("lm response prompt_sha256=%s chars=%d", prompt.sha256(), len(content))
    return content


# --- top-level answering --------------------------------------------------------

def answer(
    instance: AssistantInstance,
    corpus: Corpus,
    user_query: str,
    endpoint: Optional[EndpointConfig] = None,
    char_budget: int = DEFAULT_CONTEXT_BUDGET,
    degrade: bool = True,
) -> StructuredAnswer:
    """Answer one query; numeric fields always come from parsed records.

    Structured routes never touch the network. Free-form routes consult
    the endpoint for the narrative and fall back to the deterministic
    summary when it fails (unless ``degrade`` is disabled, in which case
    the endpoint error propagates for the caller to surface).
    """
    routed = route_query(user_query)

    if routed.structured:
        return execute_spec(corpus, scoped_to_airport(routed.spec, instance.airport))

    try:
        bundle = build_prompt(instance, corpus, user_query, char_budget)
    except PromptError:
        return no_match_answer()
    top = select_context(
        corpus, instance.airport, instance.context_size, ContextStrategy.WORDIEST
    ).records[0]

    if instance.backend is Backend.REMOTE_LM and endpoint is not None:
        try:
            completion = lm_complete(endpoint, bundle, instance.generation_temperature)
            return summarize_deterministic(
                top, answer_mode=Backend.REMOTE_LM, narrative=completion
            )
        except LmEndpointError:
            if not degrade:
                raise
            fallback = summarize_deterministic(top)
            return summarize_deterministic(
                top, narrative=f"{fallback.narrative} {DEGRADED_NOTICE}"
            )
    return summarize_deterministic(top)
