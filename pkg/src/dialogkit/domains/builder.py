"""Compact authoring helpers for hand-written dialogues.

User utterances use inline markup for entity spans::

    "how long is [la la land|Movie|mt1]"
    "actually make it [small|Size|s2|OrderPizza.size]"

The bracketed form is ``[surface|Type|variable]`` with an optional trailing
``Api.arg`` slot tag. The builder strips the markup, computes token spans and
maintains the variable table.
"""

from __future__ import annotations

import re

from ..dialogue import (
    AnnotatedDialogue,
    ApiCall,
    Binding,
    EndDialogue,
    EndTurn,
    EntityAnnotation,
    NlgCall,
    UserUtterance,
    Variable,
)
from ..schema import DomainSchema
from ..tokenizer import tokenize

_MARK_RE = re.compile(r"\[([^|\]]+)\|(\w+)\|(\w+)(?:\|([\w.]+))?\]")


def parse_marked_utterance(marked: str) -> tuple[str, list[EntityAnnotation]]:
    text_parts: list[str] = []
    annotations: list[EntityAnnotation] = []
    n_tokens = 0
    pos = 0
    for m in _MARK_RE.finditer(marked):
        before = marked[pos : m.start()]
        text_parts.append(before)
        n_tokens += len(tokenize(before))
        surface, etype, var, slot = m.group(1), m.group(2), m.group(3), m.group(4)
        span_len = len(tokenize(surface))
        annotations.append(
            EntityAnnotation(
                start=n_tokens,
                end=n_tokens + span_len,
                entity_type=etype,
                variable=var,
                slot=slot,
            )
        )
        text_parts.append(surface)
        n_tokens += span_len
        pos = m.end()
    text_parts.append(marked[pos:])
    return "".join(text_parts), annotations


def _binding(value) -> Binding:
    if isinstance(value, tuple) and len(value) == 2 and value[0] == "lit":
        return Binding(lit=value[1])
    if isinstance(value, list):
        return Binding(vars=list(value))
    return Binding(var=value)


class DialogueBuilder:
    def __init__(self, schema: DomainSchema):
        self.schema = schema
        self.events: list = []
        self.variables: dict[str, Variable] = {}

    def user(self, marked: str) -> "DialogueBuilder":
        text, annotations = parse_marked_utterance(marked)
        for ann in annotations:
            surface_tokens = tokenize(text)[ann.start : ann.end]
            value = " ".join(surface_tokens)
            existing = self.variables.get(ann.variable)
            if existing is None:
                self.variables[ann.variable] = Variable(ann.entity_type, value)
        self.events.append(UserUtterance(text=text, annotations=annotations))
        return self

    def api(self, name: str, args: dict | None = None, ret: tuple[str, str] | None = None,
            success: bool = True) -> "DialogueBuilder":
        api = self.schema.api(name)
        if api is None:
            raise ValueError(f"unknown API {name!r}")
        if ret is not None:
            var, value = ret
            self.variables[var] = Variable(api.return_type, value)
        self.events.append(
            ApiCall(
                name=name,
                args={k: _binding(v) for k, v in (args or {}).items()},
                return_var=ret[0] if ret else None,
                success=success,
            )
        )
        return self

    def nlg(self, name: str, args: dict | None = None) -> "DialogueBuilder":
        if self.schema.nlg(name) is None:
            raise ValueError(f"unknown NLG {name!r}")
        self.events.append(NlgCall(name=name, args={k: _binding(v) for k, v in (args or {}).items()}))
        return self

    def end_turn(self) -> "DialogueBuilder":
        self.events.append(EndTurn())
        return self

    def end_dialogue(self) -> "DialogueBuilder":
        self.events.append(EndDialogue())
        return self

    def build(self) -> AnnotatedDialogue:
        return AnnotatedDialogue(events=self.events, variables=self.variables)
