"""gdpdesk: parse, index, and query historical Ground Delay Program advisories."""

from .model import (
    AdvisoryKind,
    ConditionCategory,
    DelayMode,
    DelayStats,
    GdpRecord,
    ImpactingCondition,
    ProgramRateSchedule,
    Scope,
    TimeWindow,
    decode_record,
    duration_hours,
    encode_record,
    record_id,
    word_count,
)
from .parser import ParseOutcome, parse_advisory, parse_envelope, write_envelope
from .corpus import Corpus, IngestReport
from .query import QuerySpec, RankedResult, find_examples, resolve_superlative, select_context
from .assistant import (
    AssistantInstance,
    Backend,
    EndpointConfig,
    PromptBundle,
    StructuredAnswer,
    answer,
    build_prompt,
    lm_complete,
    route_query,
    summarize_deterministic,
)

__version__ = "0.1.0"

__all__ = [
    "AdvisoryKind", "ConditionCategory", "DelayMode", "DelayStats", "GdpRecord",
    "ImpactingCondition", "ProgramRateSchedule", "Scope", "TimeWindow",
    "decode_record", "duration_hours", "encode_record", "record_id", "word_count",
    "ParseOutcome", "parse_advisory", "parse_envelope", "write_envelope",
    "Corpus", "IngestReport",
    "QuerySpec", "RankedResult", "find_examples", "resolve_superlative", "select_context",
    "AssistantInstance", "Backend", "EndpointConfig", "PromptBundle", "StructuredAnswer",
    "answer", "build_prompt", "lm_complete", "route_query", "summarize_deterministic",
    "__version__",
]
