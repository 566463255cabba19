"""Service configuration: INI-style file with one section per instance.

Example (see docs/api.md for the full key reference):

    [service]
    listen = 127.0.0.1:8080
    corpus = ./corpus.jsonl
    context_budget = 60000
    degrade = true

    [endpoint]
    url = http://lm.internal:9000/v1/chat/completions
    credential_env = GDPDESK_LM_API_KEY

    [instance.SFO]
    context_size = 500
    temperature = 0.2
    backend = remote_lm

The endpoint credential itself is only ever read from the named
environment variable, never from the file.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .assistant import (
    AssistantInstance,
    Backend,
    DEFAULT_CONTEXT_BUDGET,
    EndpointConfig,
)


class ConfigError(ValueError):
    """Raised for unusable service configuration."""


@dataclass(frozen=True)
class ServiceConfig:
    corpus_path: Path
    instances: tuple[AssistantInstance, ...]
    host: str = "127.0.0.1"
    port: int = 8080
    context_budget: int = DEFAULT_CONTEXT_BUDGET
    degrade: bool = True
    endpoint: Optional[EndpointConfig] = None
    ui_dist: Optional[Path] = None

    def __post_init__(self) -> None:
        if not self.instances:
            raise ConfigError("at least one [instance.XXX] section is required")
        airports = [i.airport for i in self.instances]
        if len(set(airports)) != len(airports):
            raise ConfigError("one instance per airport: duplicate instance section")


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    parser = configparser.ConfigParser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"cannot read config file {path}")

    service = parser["service"] if parser.has_section("service") else {}
    listen = service.get("listen", "127.0.0.1:8080")
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        raise ConfigError(f"bad listen address {listen!r} (expected host:port)")

    corpus_value = service.get("corpus")
    if not corpus_value:
        raise ConfigError("missing required key: [service] corpus")
    corpus_path = (path.parent / corpus_value).resolve()

    endpoint = None
    if parser.has_section("endpoint"):
        section = parser["endpoint"]
        if not section.get("url"):
            raise ConfigError("[endpoint] section requires a url")
        try:
            endpoint = EndpointConfig(
                url=section["url"],
                credential_env=section.get("credential_env", "GDPDESK_LM_API_KEY"),
                model=section.get("model", "default"),
                timeout_seconds=float(section.get("timeout_seconds", "10")),
                max_in_flight=int(section.get("max_in_flight", "4")),
            )
        except ValueError as exc:
            raise ConfigError(f"bad [endpoint] section: {exc}") from exc

    instances = []
    for name in parser.sections():
        if not name.startswith("instance."):
            continue
        section = parser[name]
        try:
            instances.append(
                AssistantInstance(
                    airport=name.split(".", 1)[1],
                    context_size=int(section.get("context_size", "500")),
                    generation_temperature=float(section.get("temperature", "0.2")),
                    backend=Backend(section.get("backend", "deterministic")),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"bad [{name}] section: {exc}") from exc

    ui_value = service.get("ui_dist")
    return ServiceConfig(
        corpus_path=corpus_path,
        instances=tuple(instances),
        host=host,
        port=int(port_text),
        context_budget=int(service.get("context_budget", str(DEFAULT_CONTEXT_BUDGET))),
        degrade=service.get("degrade", "true").strip().lower() not in ("false", "0", "no"),
        endpoint=endpoint,
        ui_dist=(path.parent / ui_value).resolve() if ui_value else None,
    )
