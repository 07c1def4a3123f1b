"""Dialogue context extraction: the feature bundle behind every prediction.

A DialogueContext is a snapshot of the dialogue prefix at a prediction point:
the turn in progress (tokens + entity mentions so far), windowed past
utterances and actions, every entity mention with provenance, and the API
return environment. Mentions are enumerated densely in chronological order;
the reserved optional-token slot sits at the end of the mention list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dialogue import AnnotatedDialogue, ApiCall, EndDialogue, EndTurn, NlgCall, UserUtterance
from .schema import DomainSchema
from .tokenizer import fold, tokenize


@dataclass
class EntityMention:
    value: str
    entity_type: str
    source: str  # user | agent | api_return
    turn_index: int
    position: int  # dense index within the context mention list
    variable: str | None = None


@dataclass
class DialogueContext:
    current_user_utterance: list[str]
    current_entities: list[EntityMention]
    past_user_utterances: list[list[str]]
    past_actions: list[str]
    past_entities: list[EntityMention]
    api_returns: dict[str, tuple[str, str]]  # var -> (entity type, value)
    current_turn_index: int = 0

    def mentions(self) -> list[EntityMention]:
        return self.past_entities + self.current_entities

    def optional_position(self) -> int:
        return len(self.past_entities) + len(self.current_entities)

    def dynamic_catalogs(self) -> dict[str, list[str]]:
        """Session catalogs: values the agent mentioned or APIs returned."""
        out: dict[str, list[str]] = {}
        for m in self.mentions():
            if m.source in ("agent", "api_return"):
                bucket = out.setdefault(m.entity_type, [])
                if m.value not in bucket:
                    bucket.append(m.value)
        return out


def _binding_mentions(event, schema: DomainSchema, variables, turn_index: int,
                      source: str) -> list[EntityMention]:
    out = []
    action = schema.action(event.name)
    if action is None:
        return out
    for arg_name, binding in event.args.items():
        arg = action.arg(arg_name)
        etype = arg.entity_type if arg else ""
        if binding.var is not None:
            var = variables.get(binding.var)
            if var:
                out.append(EntityMention(str(var.value), var.entity_type, source, turn_index, -1, binding.var))
        elif binding.vars is not None:
            for v in binding.vars:
                var = variables.get(v)
                if var:
                    out.append(EntityMention(str(var.value), var.entity_type, source, turn_index, -1, v))
        elif binding.lit is not None:
            items = binding.lit if isinstance(binding.lit, (list, tuple)) else [binding.lit]
            for item in items:
                out.append(EntityMention(str(item), etype, source, turn_index, -1, None))
    return out


def extract_features(
    d: AnnotatedDialogue,
    end: int,
    schema: DomainSchema,
    window: int = 8,
) -> DialogueContext:
    """Context for a prediction at event index ``end`` (events [0, end) are
    visible). Utterance/action sequences are truncated to the most recent
    ``window`` turns; the mention list spans the full history."""
    end = min(end, len(d.events))
    turn_index = 0
    turn_utterances: dict[int, list[str]] = {}
    turn_user_mentions: dict[int, list[EntityMention]] = {}
    turn_agent_mentions: dict[int, list[EntityMention]] = {}
    turn_actions: dict[int, list[str]] = {}
    api_returns: dict[str, tuple[str, str]] = {}
    saw_user: dict[int, bool] = {}

    for i in range(end):
        e = d.events[i]
        if isinstance(e, UserUtterance):
            toks = [fold(t) for t in tokenize(e.text)]
            turn_utterances[turn_index] = toks
            saw_user[turn_index] = True
            mentions = []
            all_toks = tokenize(e.text)
            for ann in e.annotations:
                surface = " ".join(all_toks[ann.start : ann.end])
                mentions.append(
                    EntityMention(surface, ann.entity_type, "user", turn_index, -1, ann.variable)
                )
            turn_user_mentions[turn_index] = mentions
        elif isinstance(e, ApiCall):
            turn_actions.setdefault(turn_index, []).append(e.name)
            if e.return_var is not None and e.return_var in d.variables:
                var = d.variables[e.return_var]
                turn_agent_mentions.setdefault(turn_index, []).append(
                    EntityMention(str(var.value), var.entity_type, "api_return", turn_index, -1, e.return_var)
                )
                api_returns[e.return_var] = (var.entity_type, str(var.value))
        elif isinstance(e, NlgCall):
            turn_actions.setdefault(turn_index, []).append(e.name)
            turn_agent_mentions.setdefault(turn_index, []).extend(
                _binding_mentions(e, schema, d.variables, turn_index, "agent")
            )
        elif isinstance(e, EndTurn):
            turn_actions.setdefault(turn_index, []).append("EndTurn")
            turn_index += 1
        elif isinstance(e, EndDialogue):
            turn_actions.setdefault(turn_index, []).append("EndDialogue")
            turn_index += 1

    current = turn_index  # turn in progress at the prediction point
    lo = max(0, current - window)

    past_utterances = [turn_utterances[t] for t in range(lo, current) if t in turn_utterances]
    past_actions: list[str] = []
    for t in range(lo, current):
        past_actions.extend(turn_actions.get(t, []))
    past_actions.extend(turn_actions.get(current, []))  # actions already taken this turn

    past_entities: list[EntityMention] = []
    for t in range(current):
        past_entities.extend(turn_user_mentions.get(t, []))
        past_entities.extend(turn_agent_mentions.get(t, []))
    current_entities = list(turn_user_mentions.get(current, [])) + list(
        turn_agent_mentions.get(current, [])
    )
    for pos, m in enumerate(past_entities + current_entities):
        m.position = pos

    return DialogueContext(
        current_user_utterance=turn_utterances.get(current, []),
        current_entities=current_entities,
        past_user_utterances=past_utterances,
        past_actions=past_actions,
        past_entities=past_entities,
        api_returns=api_returns,
        current_turn_index=current,
    )
