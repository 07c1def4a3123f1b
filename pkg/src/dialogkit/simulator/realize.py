"""Surface realization: dialogue acts -> text with aligned entity annotations.

User-side realization picks a template whose declared acts cover the act list
(exact multiset match, falling back to one single-act template per act,
concatenated) and substitutes goal values into its placeholders. In full mode
the surface is drawn uniformly from the template text plus its paraphrases;
base mode sticks to template texts.

System-side realization renders an NLG response from its argument bindings;
every substituted value is reported as a template-tagged entity.
"""

from __future__ import annotations

import re

import numpy as np

from ..acts import DialogueAct
from ..dialogue import EntityAnnotation, UserUtterance
from ..schema import DomainSchema, NlgDef, UserTemplateDef
from ..tokenizer import tokenize

_PLACEHOLDER_RE = re.compile(r"\$(\w+)")


class GenerationError(ValueError):
    pass


def _act_key_multiset(acts: list[DialogueAct]) -> tuple[str, ...]:
    return tuple(sorted(a.key() for a in acts))


def template_index(schema: DomainSchema) -> dict[tuple[str, ...], list[UserTemplateDef]]:
    index: dict[tuple[str, ...], list[UserTemplateDef]] = {}
    for tpl in schema.user_templates:
        index.setdefault(tuple(sorted(tpl.acts)), []).append(tpl)
    return index


def _value_items(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [str(value)]


def _join_items(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def _render_surface(
    surface: str,
    acts: list[DialogueAct],
    var_factory,
) -> tuple[str, list[EntityAnnotation]]:
    """Substitute placeholders, computing token spans and fresh variables.

    Enriches inform/correct acts in place with .var (single) or .vars (multi).
    """
    by_arg: dict[str, DialogueAct] = {}
    for act in acts:
        if act.label in ("inform", "correct") and act.slot:
            by_arg.setdefault(act.slot.split(".", 1)[1], act)

    text_parts: list[str] = []
    annotations: list[EntityAnnotation] = []
    n_tokens = 0
    pos = 0
    for m in _PLACEHOLDER_RE.finditer(surface):
        before = surface[pos : m.start()]
        text_parts.append(before)
        n_tokens += len(tokenize(before))
        ph = m.group(1)
        act = by_arg.get(ph)
        if act is None:
            raise GenerationError(f"no act provides a value for placeholder ${ph}")
        items = _value_items(act.value)
        etype = act.entity_type  # attached by _attach_types
        item_vars: list[str] = []
        for j, item in enumerate(items):
            if j:
                sep = ", " if j < len(items) - 1 else " and "
                text_parts.append(sep)
                n_tokens += len(tokenize(sep))
            var = var_factory(etype, item)
            item_vars.append(var)
            span_len = len(tokenize(item))
            annotations.append(
                EntityAnnotation(
                    start=n_tokens,
                    end=n_tokens + span_len,
                    entity_type=etype,
                    variable=var,
                    slot=act.slot,
                )
            )
            text_parts.append(item)
            n_tokens += span_len
        if isinstance(act.value, (list, tuple)):
            act.vars = item_vars  # type: ignore[attr-defined]
        else:
            act.var = item_vars[0]  # type: ignore[attr-defined]
        pos = m.end()
    text_parts.append(surface[pos:])
    return "".join(text_parts), annotations


def _attach_types(acts: list[DialogueAct], schema: DomainSchema) -> None:
    from ..schema import slot_arg

    for act in acts:
        if act.label in ("inform", "correct") and act.slot:
            act.entity_type = slot_arg(schema, act.slot).entity_type  # type: ignore[attr-defined]


def realize_user_acts(
    acts: list[DialogueAct],
    schema: DomainSchema,
    rng: np.random.Generator,
    var_factory,
    mode: str = "full",
    index: dict | None = None,
) -> UserUtterance:
    """Realize a user act list into an annotated utterance."""
    if not acts:
        return UserUtterance(text="", annotations=[])
    _attach_types(acts, schema)
    index = index if index is not None else template_index(schema)
    key = _act_key_multiset(acts)
    candidates = index.get(key)
    if candidates:
        tpl = candidates[int(rng.integers(0, len(candidates)))]
        surfaces = tpl.surfaces() if mode == "full" else [tpl.text]
        surface = surfaces[int(rng.integers(0, len(surfaces)))]
        text, annotations = _render_surface(surface, acts, var_factory)
        return UserUtterance(text=text, annotations=annotations)

    # composition fallback: one single-act template per act, concatenated
    parts: list[str] = []
    annotations = []
    n_tokens = 0
    for act in acts:
        sub = index.get((act.key(),))
        if not sub:
            raise GenerationError(f"no user template covers act {act.key()!r}")
        tpl = sub[int(rng.integers(0, len(sub)))]
        surfaces = tpl.surfaces() if mode == "full" else [tpl.text]
        surface = surfaces[int(rng.integers(0, len(surfaces)))]
        text, anns = _render_surface(surface, [act], var_factory)
        for a in anns:
            a.start += n_tokens
            a.end += n_tokens
        annotations.extend(anns)
        parts.append(text)
        n_tokens += len(tokenize(text))
    return UserUtterance(text=" ".join(parts), annotations=annotations)


def render_nlg(
    nlg: NlgDef,
    values: dict[str, object],
    rng: np.random.Generator,
) -> tuple[str, list[tuple[str, str, object]]]:
    """Render an NLG response from resolved argument values.

    Returns the text and the template-tagged entities as (arg, entity_type,
    value-or-items) tuples; span positions are not needed on the agent side
    since agent text is never re-tagged.
    """
    surface = nlg.template_texts[int(rng.integers(0, len(nlg.template_texts)))]
    mentioned: list[tuple[str, str, object]] = []

    def sub(m: re.Match) -> str:
        arg_name = m.group(1)
        arg = nlg.arg(arg_name)
        if arg is None or arg_name not in values:
            raise GenerationError(f"NLG {nlg.name} is missing a value for ${arg_name}")
        items = _value_items(values[arg_name])
        mentioned.append((arg_name, arg.entity_type, values[arg_name]))
        return _join_items(items)

    return _PLACEHOLDER_RE.sub(sub, surface), mentioned


def realize(acts: list[DialogueAct], side: str, schema: DomainSchema,
            rng: np.random.Generator, mode: str = "full"):
    """Spec-level entry point covering both sides.

    User side returns an annotated UserUtterance built from fresh variables;
    system side expects exactly one act resolvable to an NLG response and
    returns (text, tagged entities).
    """
    if side == "user":
        counter = [0]

        def var_factory(etype: str, value: str) -> str:
            counter[0] += 1
            return f"u{counter[0]}"

        return realize_user_acts([a for a in acts], schema, rng, var_factory, mode=mode)
    if side != "system":
        raise ValueError("side must be 'user' or 'system'")
    if not acts:
        return "", []
    act = acts[0]
    label, qual = act.key(), None
    if "(" in label:
        label, qual = label[: label.index("(")], label[label.index("(") + 1 : -1]
    nlg = schema.nlg_for_act(label, qual)
    if nlg is None:
        raise GenerationError(f"no NLG response expresses act {act.key()!r}")
    values = {k: v for k, v in act.bindings.items() if k != "__return__"}
    if act.label == "notify_result" and act.action and "__return__" in act.bindings:
        api = schema.api(act.action)
        if api is not None and api.return_type is not None:
            for arg in nlg.args:
                if arg.name not in values and arg.entity_type == api.return_type:
                    values[arg.name] = act.bindings["__return__"]
    return render_nlg(nlg, values, rng)
