"""Annotated dialogues: the event stream shared by seeds, simulator and runtime.

A dialogue is an ordered list of events — user utterances with entity span
annotations, API calls, NLG calls, and end markers — plus a variable table.
Variables let later events refer to entities introduced earlier (anaphora).

On disk a corpus is JSON Lines, one dialogue per line, versioned with
``dml_version``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .schema import ApiDef, DomainSchema, NlgDef
from .tokenizer import fold, tokenize

DML_VERSION = 1


class DialogueError(ValueError):
    """Hard parse/validation failure; carries the offending finding."""

    def __init__(self, finding: "Finding"):
        super().__init__(f"[event {finding.event_index}] {finding.code}: {finding.message}")
        self.finding = finding


@dataclass
class Variable:
    entity_type: str
    value: str


@dataclass
class EntityAnnotation:
    start: int
    end: int
    entity_type: str
    variable: str
    # Optional "Api.arg" tag recording which semantic slot this mention fills;
    # written by the simulator for informs/corrections, optional in seeds.
    slot: str | None = None


@dataclass
class UserUtterance:
    text: str
    annotations: list[EntityAnnotation] = field(default_factory=list)
    kind: str = field(default="user", init=False)


@dataclass
class Binding:
    """Argument value: a variable, a list of variables, or a literal."""

    var: str | None = None
    vars: list[str] | None = None
    lit: object = None

    def referenced(self) -> list[str]:
        if self.var is not None:
            return [self.var]
        if self.vars is not None:
            return list(self.vars)
        return []

    def resolve(self, variables: dict[str, Variable]):
        if self.var is not None:
            return variables[self.var].value
        if self.vars is not None:
            return [variables[v].value for v in self.vars]
        return self.lit


@dataclass
class ApiCall:
    name: str
    args: dict[str, Binding] = field(default_factory=dict)
    return_var: str | None = None
    success: bool = True
    kind: str = field(default="api", init=False)


@dataclass
class NlgCall:
    name: str
    args: dict[str, Binding] = field(default_factory=dict)
    kind: str = field(default="nlg", init=False)


@dataclass
class EndTurn:
    kind: str = field(default="end_turn", init=False)


@dataclass
class EndDialogue:
    kind: str = field(default="end_dialogue", init=False)


Event = UserUtterance | ApiCall | NlgCall | EndTurn | EndDialogue


@dataclass
class AnnotatedDialogue:
    events: list[Event] = field(default_factory=list)
    variables: dict[str, Variable] = field(default_factory=dict)

    def api_skeleton(self) -> list[tuple[str, tuple[str, ...]]]:
        """(API name, sorted arg-name set) per call, in order."""
        return [
            (e.name, tuple(sorted(e.args)))
            for e in self.events
            if isinstance(e, ApiCall)
        ]


@dataclass
class Finding:
    event_index: int
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, event_index: int, code: str, message: str) -> None:
        self.findings.append(Finding(event_index, code, message))


@dataclass
class Turn:
    """One user utterance plus the agent events that answer it.

    Turn 0 is the agent-only opening (welcome) and has ``user is None``.
    ``agent_events`` includes the terminating EndTurn/EndDialogue.
    """

    index: int
    user: UserUtterance | None
    user_index: int | None
    agent_events: list[Event] = field(default_factory=list)
    agent_indices: list[int] = field(default_factory=list)


def turns(d: AnnotatedDialogue) -> list[Turn]:
    out: list[Turn] = []
    current: Turn | None = None
    for i, e in enumerate(d.events):
        if isinstance(e, UserUtterance):
            if current is not None:
                out.append(current)
            current = Turn(index=len(out), user=e, user_index=i)
        else:
            if current is None:
                current = Turn(index=0, user=None, user_index=None)
            current.agent_events.append(e)
            current.agent_indices.append(i)
            if isinstance(e, (EndTurn, EndDialogue)):
                out.append(current)
                current = None
    if current is not None:
        out.append(current)
    return out


def _check_call_args(
    report: ValidationReport,
    i: int,
    action: ApiDef | NlgDef,
    args: dict[str, Binding],
    defined: dict[str, str],
    variables: dict[str, Variable],
    what: str,
) -> None:
    for arg_name, binding in args.items():
        arg = action.arg(arg_name)
        if arg is None:
            report.add(i, "unknown_argument", f"{what} {action.name} has no argument {arg_name!r}")
            continue
        for v in binding.referenced():
            if v not in defined:
                report.add(
                    i,
                    "use_before_definition",
                    f"variable {v!r} used in {action.name}.{arg_name} before any definition",
                )
            elif variables[v].entity_type != arg.entity_type:
                report.add(
                    i,
                    "arg_type_mismatch",
                    f"{action.name}.{arg_name} expects {arg.entity_type}, "
                    f"variable {v!r} is {variables[v].entity_type}",
                )
        if arg.multi_valued:
            if binding.var is not None or (
                binding.vars is None and not isinstance(binding.lit, (list, tuple))
            ):
                report.add(
                    i,
                    "arity_mismatch",
                    f"{action.name}.{arg_name} is multi-valued and needs a list binding",
                )
        else:
            if binding.vars is not None or isinstance(binding.lit, (list, tuple)):
                report.add(
                    i,
                    "arity_mismatch",
                    f"{action.name}.{arg_name} is single-valued but got a list binding",
                )
    for arg in action.args:
        if arg.required and arg.name not in args:
            report.add(
                i,
                "missing_required_argument",
                f"{what} {action.name} is missing required argument {arg.name!r}",
            )


def validate_dialogue(d: AnnotatedDialogue, schema: DomainSchema,
                      partial: bool = False) -> ValidationReport:
    """Check every dialogue invariant; findings are data, not exceptions.

    ``partial`` validates an in-progress prefix (a live session history):
    everything is checked except the requirement to end with EndDialogue.
    """
    report = ValidationReport()
    defined: dict[str, str] = {}  # variable -> defining event index (as str for reuse)
    phase = "agent_opening"  # agent_opening -> (user -> agent)* -> done

    for v, var in d.variables.items():
        if schema.entity_type(var.entity_type) is None:
            report.add(-1, "unknown_entity_type", f"variable {v!r} has unknown type {var.entity_type!r}")

    for i, e in enumerate(d.events):
        if phase == "done":
            report.add(i, "event_after_end", "events continue after EndDialogue")
            break
        if isinstance(e, UserUtterance):
            if phase == "agent":
                report.add(i, "phase_violation", "user utterance before the agent ended its turn")
            phase = "agent"
            toks = tokenize(e.text)
            spans: list[tuple[int, int]] = []
            for ann in sorted(e.annotations, key=lambda a: (a.start, a.end)):
                if not (0 <= ann.start < ann.end <= len(toks)):
                    report.add(
                        i,
                        "span_out_of_bounds",
                        f"span [{ann.start}, {ann.end}) outside utterance of {len(toks)} tokens",
                    )
                    continue
                if spans and ann.start < spans[-1][1]:
                    report.add(i, "overlapping_spans", f"span [{ann.start}, {ann.end}) overlaps a previous span")
                spans.append((ann.start, ann.end))
                if schema.entity_type(ann.entity_type) is None:
                    report.add(i, "unknown_entity_type", f"unknown entity type {ann.entity_type!r}")
                var = d.variables.get(ann.variable)
                if var is None:
                    report.add(i, "unknown_variable", f"annotation variable {ann.variable!r} not in variable table")
                    continue
                if var.entity_type != ann.entity_type:
                    report.add(
                        i,
                        "arg_type_mismatch",
                        f"annotation typed {ann.entity_type} but variable {ann.variable!r} is {var.entity_type}",
                    )
                surface = " ".join(toks[ann.start : ann.end])
                if ann.variable in defined:
                    # re-mention of an existing entity: surface must match up to case
                    if fold(surface) != fold(" ".join(tokenize(str(var.value)))):
                        report.add(
                            i,
                            "value_span_mismatch",
                            f"re-mention of {ann.variable!r} reads {surface!r} but value is {var.value!r}",
                        )
                else:
                    if fold(surface) != fold(" ".join(tokenize(str(var.value)))):
                        report.add(
                            i,
                            "value_span_mismatch",
                            f"span reads {surface!r} but variable {ann.variable!r} holds {var.value!r}",
                        )
                    defined[ann.variable] = str(i)
        elif isinstance(e, ApiCall):
            if phase == "user":
                report.add(i, "phase_violation", "agent event while waiting for the user")
            api = schema.api(e.name)
            if api is None:
                report.add(i, "unknown_action", f"unknown API {e.name!r}")
                continue
            _check_call_args(report, i, api, e.args, defined, d.variables, "API")
            if e.return_var is not None:
                if api.return_type is None:
                    report.add(i, "unexpected_return", f"API {e.name} declares no return type")
                elif e.return_var in defined:
                    report.add(i, "duplicate_definition", f"return variable {e.return_var!r} already defined")
                else:
                    var = d.variables.get(e.return_var)
                    if var is None:
                        report.add(i, "unknown_variable", f"return variable {e.return_var!r} not in variable table")
                    else:
                        if var.entity_type != api.return_type:
                            report.add(
                                i,
                                "arg_type_mismatch",
                                f"return of {e.name} should be {api.return_type}, got {var.entity_type}",
                            )
                        defined[e.return_var] = str(i)
        elif isinstance(e, NlgCall):
            if phase == "user":
                report.add(i, "phase_violation", "agent event while waiting for the user")
            nlg = schema.nlg(e.name)
            if nlg is None:
                report.add(i, "unknown_action", f"unknown NLG response {e.name!r}")
                continue
            _check_call_args(report, i, nlg, e.args, defined, d.variables, "NLG")
        elif isinstance(e, EndTurn):
            if phase == "user":
                report.add(i, "phase_violation", "EndTurn while waiting for the user")
            phase = "user"
        elif isinstance(e, EndDialogue):
            phase = "done"

    if phase != "done" and not partial:
        report.add(len(d.events) - 1, "missing_end_dialogue", "dialogue does not end with EndDialogue")
    return report


def resolve_references(d: AnnotatedDialogue) -> list[dict]:
    """Visible environment per event index.

    Entry ``i`` holds the variables defined by events strictly before ``i``
    plus a slot view mapping ``Api.arg`` to the latest variable bound to it
    (corrections shadow earlier bindings).
    """
    envs: list[dict] = []
    visible: dict[str, Variable] = {}
    slots: dict[str, str] = {}
    for e in d.events:
        envs.append({"variables": dict(visible), "slots": dict(slots)})
        if isinstance(e, UserUtterance):
            for ann in e.annotations:
                if ann.variable in d.variables:
                    visible[ann.variable] = d.variables[ann.variable]
                if ann.slot:
                    slots[ann.slot] = ann.variable
        elif isinstance(e, ApiCall):
            for arg_name, binding in e.args.items():
                for v in binding.referenced():
                    slots[f"{e.name}.{arg_name}"] = v
            if e.return_var is not None and e.return_var in d.variables:
                visible[e.return_var] = d.variables[e.return_var]
    envs.append({"variables": dict(visible), "slots": dict(slots)})
    return envs


# ---------------------------------------------------------------------------
# JSON Lines (de)serialization
# ---------------------------------------------------------------------------


def _binding_to_json(b: Binding):
    if b.var is not None:
        return {"var": b.var}
    if b.vars is not None:
        return {"vars": list(b.vars)}
    return {"lit": b.lit}


def _binding_from_json(obj, where: str) -> Binding:
    if not isinstance(obj, dict):
        raise DialogueError(Finding(-1, "syntax_error", f"{where}: binding must be an object"))
    if "var" in obj:
        return Binding(var=str(obj["var"]))
    if "vars" in obj:
        return Binding(vars=[str(v) for v in obj["vars"]])
    if "lit" in obj:
        return Binding(lit=obj["lit"])
    raise DialogueError(Finding(-1, "syntax_error", f"{where}: binding needs var, vars or lit"))


def dialogue_to_json(d: AnnotatedDialogue) -> dict:
    events = []
    for e in d.events:
        if isinstance(e, UserUtterance):
            events.append(
                {
                    "kind": "user",
                    "text": e.text,
                    "annotations": [
                        {
                            "start": a.start,
                            "end": a.end,
                            "entity_type": a.entity_type,
                            "variable": a.variable,
                            **({"slot": a.slot} if a.slot else {}),
                        }
                        for a in e.annotations
                    ],
                }
            )
        elif isinstance(e, ApiCall):
            events.append(
                {
                    "kind": "api",
                    "name": e.name,
                    "args": {k: _binding_to_json(v) for k, v in e.args.items()},
                    "return": e.return_var,
                    **({"success": False} if not e.success else {}),
                }
            )
        elif isinstance(e, NlgCall):
            events.append(
                {"kind": "nlg", "name": e.name, "args": {k: _binding_to_json(v) for k, v in e.args.items()}}
            )
        elif isinstance(e, EndTurn):
            events.append({"kind": "end_turn"})
        elif isinstance(e, EndDialogue):
            events.append({"kind": "end_dialogue"})
    return {
        "dml_version": DML_VERSION,
        "events": events,
        "variables": {
            v: {"entity_type": var.entity_type, "value": var.value}
            for v, var in d.variables.items()
        },
    }


def serialize_dialogue(d: AnnotatedDialogue) -> str:
    return json.dumps(dialogue_to_json(d), ensure_ascii=False, separators=(",", ": "))


def dialogue_from_json(doc: dict) -> AnnotatedDialogue:
    version = doc.get("dml_version")
    if version != DML_VERSION:
        raise DialogueError(Finding(-1, "version_mismatch", f"unsupported dml_version {version!r}"))
    events: list[Event] = []
    for i, raw in enumerate(doc.get("events", [])):
        kind = raw.get("kind")
        if kind == "user":
            anns = [
                EntityAnnotation(
                    start=int(a["start"]),
                    end=int(a["end"]),
                    entity_type=str(a["entity_type"]),
                    variable=str(a["variable"]),
                    slot=a.get("slot"),
                )
                for a in raw.get("annotations", [])
            ]
            events.append(UserUtterance(text=str(raw.get("text", "")), annotations=anns))
        elif kind == "api":
            events.append(
                ApiCall(
                    name=str(raw.get("name", "")),
                    args={
                        k: _binding_from_json(v, f"event {i}") for k, v in raw.get("args", {}).items()
                    },
                    return_var=raw.get("return"),
                    success=bool(raw.get("success", True)),
                )
            )
        elif kind == "nlg":
            events.append(
                NlgCall(
                    name=str(raw.get("name", "")),
                    args={
                        k: _binding_from_json(v, f"event {i}") for k, v in raw.get("args", {}).items()
                    },
                )
            )
        elif kind == "end_turn":
            events.append(EndTurn())
        elif kind == "end_dialogue":
            events.append(EndDialogue())
        else:
            raise DialogueError(Finding(i, "syntax_error", f"unknown event kind {kind!r}"))
    variables = {
        str(v): Variable(entity_type=str(spec["entity_type"]), value=spec["value"])
        for v, spec in doc.get("variables", {}).items()
    }
    return AnnotatedDialogue(events=events, variables=variables)


def parse_dialogue(source: str | dict, schema: DomainSchema) -> AnnotatedDialogue:
    """Parse one dialogue document and validate it against the schema.

    Raises DialogueError on the first finding so that seed files fail loudly.
    """
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise DialogueError(Finding(-1, "syntax_error", f"{e.msg} (line {e.lineno}, column {e.colno})")) from e
    else:
        doc = source
    d = dialogue_from_json(doc)
    report = validate_dialogue(d, schema)
    if not report.ok:
        raise DialogueError(report.findings[0])
    return d


def load_corpus(path, schema: DomainSchema | None = None) -> list[AnnotatedDialogue]:
    """Read a JSON Lines corpus; validates each line when a schema is given."""
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if schema is not None:
                out.append(parse_dialogue(line, schema))
            else:
                out.append(dialogue_from_json(json.loads(line)))
    return out


def save_corpus(dialogues, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for d in dialogues:
            f.write(serialize_dialogue(d))
            f.write("\n")
