"""Bundled example domains built programmatically and shipped as JSON artifacts."""

from __future__ import annotations

import importlib.resources as resources

from ..dialogue import AnnotatedDialogue, dialogue_from_json, parse_dialogue
from ..schema import DomainSchema, parse_domain

_DATA = resources.files(__name__) / "data"


def _read(name: str) -> str:
    return (_DATA / name).read_text(encoding="utf-8")


def load_bundled_schema(domain: str) -> DomainSchema:
    return parse_domain(_read(f"{domain}_schema.json"))


def load_bundled_corpus(domain: str, which: str, schema: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    """``which`` is "seeds" or "challenge"."""
    import json

    out = []
    for line in _read(f"{domain}_{which}.jsonl").splitlines():
        if not line.strip():
            continue
        if schema is not None:
            out.append(parse_dialogue(line, schema))
        else:
            out.append(dialogue_from_json(json.loads(line)))
    return out


BUNDLED_DOMAINS = ("pizzabot", "ticketbot")
