"""Domain schema: entity types, APIs, NLG responses and user templates.

The on-disk format is a JSON document with top-level keys ``entity_types``,
``apis``, ``nlg_responses``, ``user_templates`` and ``paraphrases``. Parsing
resolves every cross-reference eagerly so downstream components can assume a
consistent schema.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

# Dialogue-act labels exchanged between the simulated user and system.
ACT_LABELS = (
    "inform",
    "request",
    "confirm",
    "affirm",
    "deny",
    "correct",
    "offer",
    "accept_offer",
    "decline_offer",
    "notify_result",
    "bye",
)

# Extra NLG-matching keys that are not dialogue acts proper: the session
# opener, the low-confidence fallback, and the failure face of notify_result.
NLG_ONLY_LABELS = ("welcome", "cannot_handle", "no_result")

USER_ACT_LABELS = (
    "request",
    "inform",
    "correct",
    "affirm",
    "deny",
    "bye",
    "accept_offer",
    "decline_offer",
)
NLG_ACT_LABELS = (
    "request",
    "confirm",
    "notify_result",
    "no_result",
    "offer",
    "bye",
    "welcome",
    "cannot_handle",
)

_PLACEHOLDER_RE = re.compile(r"\$(\w+)(\.\w+)?")
_ACT_KEY_RE = re.compile(r"^(\w+)(?:\(([\w.]+)\))?$")
_IDENT_RE = re.compile(r"^\w+$")


class SchemaError(ValueError):
    """Raised for malformed or inconsistent schema documents."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


@dataclass
class EntityTypeDef:
    name: str
    catalog: list[str] = field(default_factory=list)
    description: str = ""
    # Extra values only used when sampling API returns; lets simulated APIs
    # return entities the static catalog does not cover.
    return_pool: list[str] = field(default_factory=list)

    def sampler_values(self) -> list[str]:
        return list(self.catalog) + list(self.return_pool)


@dataclass
class ArgDef:
    name: str
    entity_type: str
    required: bool = True
    multi_valued: bool = False


@dataclass
class ApiDef:
    name: str
    args: list[ArgDef] = field(default_factory=list)
    return_type: str | None = None
    confirm_before_call: bool = False
    # Entity type whose catalog + return_pool supplies simulated returns.
    return_sampler: str | None = None

    def arg(self, name: str) -> ArgDef | None:
        for a in self.args:
            if a.name == name:
                return a
        return None

    def required_args(self) -> list[ArgDef]:
        return [a for a in self.args if a.required]

    def optional_args(self) -> list[ArgDef]:
        return [a for a in self.args if not a.required]


@dataclass
class NlgDef:
    name: str
    args: list[ArgDef] = field(default_factory=list)
    template_texts: list[str] = field(default_factory=list)
    acts: list[str] = field(default_factory=list)

    def arg(self, name: str) -> ArgDef | None:
        for a in self.args:
            if a.name == name:
                return a
        return None


@dataclass
class UserTemplateDef:
    text: str
    acts: list[str] = field(default_factory=list)
    paraphrases: list[str] = field(default_factory=list)

    def act_keys(self) -> tuple[str, ...]:
        return tuple(sorted(self.acts))

    def surfaces(self) -> list[str]:
        return [self.text] + list(self.paraphrases)


def parse_act_key(key: str) -> tuple[str, str | None]:
    """Split an act key like ``request(OrderPizza.size)`` into (label, qualifier)."""
    m = _ACT_KEY_RE.match(key)
    if not m:
        raise SchemaError(f"malformed act key {key!r}")
    return m.group(1), m.group(2)


@dataclass
class DomainSchema:
    entity_types: list[EntityTypeDef]
    apis: list[ApiDef]
    nlg_responses: list[NlgDef]
    user_templates: list[UserTemplateDef]

    def __post_init__(self) -> None:
        self._types = {t.name: t for t in self.entity_types}
        self._apis = {a.name: a for a in self.apis}
        self._nlgs = {n.name: n for n in self.nlg_responses}

    def entity_type(self, name: str) -> EntityTypeDef | None:
        return self._types.get(name)

    def api(self, name: str) -> ApiDef | None:
        return self._apis.get(name)

    def nlg(self, name: str) -> NlgDef | None:
        return self._nlgs.get(name)

    def action(self, name: str) -> ApiDef | NlgDef | None:
        return self._apis.get(name) or self._nlgs.get(name)

    def action_names(self) -> list[str]:
        """All predictable actions: APIs, NLG responses, end markers."""
        return (
            [a.name for a in self.apis]
            + [n.name for n in self.nlg_responses]
            + ["EndTurn", "EndDialogue"]
        )

    def type_names(self) -> list[str]:
        return [t.name for t in self.entity_types]

    def nlg_for_act(self, label: str, qualifier: str | None = None) -> NlgDef | None:
        key = f"{label}({qualifier})" if qualifier else label
        for n in self.nlg_responses:
            if key in n.acts:
                return n
        return None

    def counts(self) -> tuple[int, int]:
        """(number of APIs, number of entity types)."""
        return len(self.apis), len(self.entity_types)


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise SchemaError(f"{where}: missing required key {key!r}")
    return obj[key]


def _check_ident(name: str, where: str) -> str:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise SchemaError(f"{where}: {name!r} is not a valid identifier")
    return name


def _parse_args(raw: list, where: str) -> list[ArgDef]:
    args = []
    seen: set[str] = set()
    for a in raw:
        name = _check_ident(_require(a, "name", where), where)
        if name in seen:
            raise SchemaError(f"{where}: duplicate argument {name!r}")
        seen.add(name)
        args.append(
            ArgDef(
                name=name,
                entity_type=_require(a, "entity_type", f"{where}.{name}"),
                required=bool(a.get("required", True)),
                multi_valued=bool(a.get("multi_valued", False)),
            )
        )
    return args


def _placeholders(text: str, where: str) -> list[str]:
    names = []
    for m in _PLACEHOLDER_RE.finditer(text):
        if m.group(2):
            raise SchemaError(
                f"{where}: field access {m.group(0)!r} is unsupported; "
                "API returns are opaque single entities"
            )
        names.append(m.group(1))
    return names


def parse_domain(source: str | dict) -> DomainSchema:
    """Parse and validate a schema document (JSON text or already-decoded dict)."""
    if isinstance(source, str):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as e:
            raise SchemaError(f"schema syntax error: {e.msg}", e.lineno, e.colno) from e
    else:
        doc = source
    if not isinstance(doc, dict):
        raise SchemaError("schema document must be a JSON object")

    entity_types: list[EntityTypeDef] = []
    seen: set[str] = set()
    for raw in doc.get("entity_types", []):
        name = _check_ident(_require(raw, "name", "entity_types"), "entity_types")
        if name in seen:
            raise SchemaError(f"duplicate entity type {name!r}")
        seen.add(name)
        entity_types.append(
            EntityTypeDef(
                name=name,
                catalog=[str(v) for v in raw.get("catalog", [])],
                description=raw.get("description", ""),
                return_pool=[str(v) for v in raw.get("return_pool", [])],
            )
        )
    type_names = {t.name for t in entity_types}

    def resolve_type(name: str, where: str) -> str:
        if name not in type_names:
            raise SchemaError(f"{where}: unresolved entity type reference {name!r}")
        return name

    apis: list[ApiDef] = []
    action_names: set[str] = set()
    for raw in doc.get("apis", []):
        name = _check_ident(_require(raw, "name", "apis"), "apis")
        if name in action_names:
            raise SchemaError(f"duplicate API {name!r}")
        action_names.add(name)
        args = _parse_args(raw.get("args", []), f"api {name}")
        for a in args:
            resolve_type(a.entity_type, f"api {name}, arg {a.name}")
        rtype = raw.get("return_type")
        if rtype is not None:
            resolve_type(rtype, f"api {name} return_type")
        sampler = raw.get("return_sampler", rtype)
        if sampler is not None:
            resolve_type(sampler, f"api {name} return_sampler")
        apis.append(
            ApiDef(
                name=name,
                args=args,
                return_type=rtype,
                confirm_before_call=bool(raw.get("confirm_before_call", False)),
                return_sampler=sampler,
            )
        )

    nlgs: list[NlgDef] = []
    for raw in doc.get("nlg_responses", []):
        name = _check_ident(_require(raw, "name", "nlg_responses"), "nlg_responses")
        if name in action_names:
            raise SchemaError(f"duplicate action name {name!r}")
        action_names.add(name)
        args = _parse_args(raw.get("args", []), f"nlg {name}")
        for a in args:
            resolve_type(a.entity_type, f"nlg {name}, arg {a.name}")
        texts = [str(t) for t in raw.get("template_texts", [])]
        if not texts:
            raise SchemaError(f"nlg {name}: at least one template text is required")
        arg_names = {a.name for a in args}
        for t in texts:
            for ph in _placeholders(t, f"nlg {name}"):
                if ph not in arg_names:
                    raise SchemaError(
                        f"nlg {name}: placeholder ${ph} does not match any declared argument"
                    )
        acts = [str(k) for k in raw.get("acts", [])]
        nlgs.append(NlgDef(name=name, args=args, template_texts=texts, acts=acts))

    para_table = doc.get("paraphrases", {})
    if not isinstance(para_table, dict):
        raise SchemaError("paraphrases must map template text to a list of alternatives")

    templates: list[UserTemplateDef] = []
    for raw in doc.get("user_templates", []):
        text = str(_require(raw, "text", "user_templates"))
        acts = [str(k) for k in raw.get("acts", [])]
        paraphrases = [str(p) for p in para_table.get(text, [])]
        templates.append(UserTemplateDef(text=text, acts=acts, paraphrases=paraphrases))

    schema = DomainSchema(entity_types, apis, nlgs, templates)
    _validate_acts(schema)
    _validate_templates(schema)
    return schema


def _validate_acts(schema: DomainSchema) -> None:
    for nlg in schema.nlg_responses:
        for key in nlg.acts:
            label, qual = parse_act_key(key)
            if label not in NLG_ACT_LABELS:
                raise SchemaError(f"nlg {nlg.name}: unknown act label {label!r}")
            if label in ("confirm", "notify_result", "no_result", "offer"):
                if qual is None or schema.api(qual) is None:
                    raise SchemaError(f"nlg {nlg.name}: act {key!r} must name a known API")
            if label == "request":
                api_name, _, arg_name = (qual or "").partition(".")
                api = schema.api(api_name)
                if api is None or not arg_name or api.arg(arg_name) is None:
                    raise SchemaError(f"nlg {nlg.name}: act {key!r} must name Api.arg")
    for tpl in schema.user_templates:
        for key in tpl.acts:
            label, qual = parse_act_key(key)
            if label not in USER_ACT_LABELS:
                raise SchemaError(f"user template {tpl.text!r}: unknown act label {label!r}")
            if label == "request":
                if qual is None or schema.api(qual) is None:
                    raise SchemaError(
                        f"user template {tpl.text!r}: act {key!r} must name a known API"
                    )
            if label in ("inform", "correct"):
                api_name, _, arg_name = (qual or "").partition(".")
                api = schema.api(api_name)
                if api is None or not arg_name or api.arg(arg_name) is None:
                    raise SchemaError(
                        f"user template {tpl.text!r}: act {key!r} must name Api.arg"
                    )


def template_slots(tpl: UserTemplateDef) -> dict[str, str]:
    """Placeholder name -> ``Api.arg`` slot, derived from inform/correct acts."""
    slots: dict[str, str] = {}
    for key in tpl.acts:
        label, qual = parse_act_key(key)
        if label in ("inform", "correct") and qual:
            arg_name = qual.split(".", 1)[1]
            slots[arg_name] = qual
    return slots


def _validate_templates(schema: DomainSchema) -> None:
    for tpl in schema.user_templates:
        slots = template_slots(tpl)
        for surface in tpl.surfaces():
            for ph in _placeholders(surface, f"user template {tpl.text!r}"):
                if ph not in slots:
                    raise SchemaError(
                        f"user template {tpl.text!r}: placeholder ${ph} has no "
                        "matching inform/correct act to type it"
                    )
        # every placeholder must sit on its own token boundary
        for surface in tpl.surfaces():
            for m in _PLACEHOLDER_RE.finditer(surface):
                before = surface[: m.start()]
                after = surface[m.end() :]
                if (before and before[-1].isalnum()) or (after and after[0].isalnum()):
                    raise SchemaError(
                        f"user template {tpl.text!r}: placeholder ${m.group(1)} "
                        "must be delimited by spaces or punctuation"
                    )


def slot_arg(schema: DomainSchema, slot: str) -> ArgDef:
    """Resolve an ``Api.arg`` slot string to its ArgDef."""
    api_name, _, arg_name = slot.partition(".")
    api = schema.api(api_name)
    if api is None:
        raise SchemaError(f"unknown API in slot {slot!r}")
    arg = api.arg(arg_name)
    if arg is None:
        raise SchemaError(f"unknown argument in slot {slot!r}")
    return arg


def serialize_domain(schema: DomainSchema) -> str:
    """Canonical JSON rendering; parse(serialize(s)) == s."""
    doc = {
        "entity_types": [
            {
                "name": t.name,
                "catalog": list(t.catalog),
                **({"description": t.description} if t.description else {}),
                **({"return_pool": list(t.return_pool)} if t.return_pool else {}),
            }
            for t in schema.entity_types
        ],
        "apis": [
            {
                "name": a.name,
                "args": [
                    {
                        "name": g.name,
                        "entity_type": g.entity_type,
                        "required": g.required,
                        "multi_valued": g.multi_valued,
                    }
                    for g in a.args
                ],
                "return_type": a.return_type,
                "confirm_before_call": a.confirm_before_call,
                "return_sampler": a.return_sampler,
            }
            for a in schema.apis
        ],
        "nlg_responses": [
            {
                "name": n.name,
                "args": [
                    {
                        "name": g.name,
                        "entity_type": g.entity_type,
                        "required": g.required,
                        "multi_valued": g.multi_valued,
                    }
                    for g in n.args
                ],
                "template_texts": list(n.template_texts),
                "acts": list(n.acts),
            }
            for n in schema.nlg_responses
        ],
        "user_templates": [
            {"text": t.text, "acts": list(t.acts)} for t in schema.user_templates
        ],
        "paraphrases": {
            t.text: list(t.paraphrases) for t in schema.user_templates if t.paraphrases
        },
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_domain(path) -> DomainSchema:
    with open(path, encoding="utf-8") as f:
        return parse_domain(f.read())


def schema_fingerprint(schema: DomainSchema) -> str:
    import hashlib

    return hashlib.sha256(serialize_domain(schema).encode("utf-8")).hexdigest()
