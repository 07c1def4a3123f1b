"""Dialogue generation: the self-play loop, the base-sampler baseline, and
corpus assembly with generation statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dialogue import (
    AnnotatedDialogue,
    ApiCall,
    EndTurn,
    NlgCall,
    UserUtterance,
    Variable,
)
from ..schema import DomainSchema
from ..tokenizer import tokenize, tokenize_with_offsets
from .goals import FromReturn, sample_goal
from .policies import SystemAgentState, UserAgentState, system_step, user_step
from .realize import realize_user_acts, template_index


@dataclass
class SimConfig:
    seed: int = 0
    num_dialogues: int = 1
    p_correction: float = 0.3
    p_over_cooperative: float = 0.25
    p_under_cooperative: float = 0.15
    p_proactive_offer: float = 0.3
    p_api_failure: float = 0.05
    mode: str = "full"  # full | base
    turn_cap: int = 30
    # per-entity-type override of API return values (test-time novel entities)
    return_pools: dict[str, list[str]] | None = None

    def __post_init__(self) -> None:
        for name in ("p_correction", "p_over_cooperative", "p_under_cooperative",
                     "p_proactive_offer", "p_api_failure"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if self.mode not in ("full", "base"):
            raise ValueError(f"mode must be 'full' or 'base', got {self.mode!r}")


def offer_cooccurrence(seeds: list[AnnotatedDialogue]) -> dict[str, list[str]]:
    """API -> APIs that follow it in any seed (proactive-offer candidates)."""
    out: dict[str, list[str]] = {}
    for seed in seeds:
        calls = [e.name for e in seed.events if isinstance(e, ApiCall)]
        for i, name in enumerate(calls):
            for later in calls[i + 1 :]:
                bucket = out.setdefault(name, [])
                if later not in bucket and later != name:
                    bucket.append(later)
    return out


class GoalNotAttainedError(RuntimeError):
    pass


def _check_attainment(goal, user_state, executed) -> None:
    """Every target call must have run with its post-revision bindings."""
    pos = 0
    for idx, call in enumerate(goal.target_calls):
        want = goal.post_revision_bindings(idx)
        resolved = {}
        for arg, value in want.items():
            if isinstance(value, FromReturn):
                value = user_state.return_values.get(value.call_index)
                if value is None:
                    continue  # producing call failed; user improvised, skip
            resolved[arg] = value
        found = None
        while pos < len(executed):
            api_name, values, _ret, _success = executed[pos]
            pos += 1
            if api_name == call.api:
                found = values
                break
        if found is None:
            raise GoalNotAttainedError(f"target call {call.api} never executed")
        for arg, value in resolved.items():
            got = found.get(arg)
            if isinstance(value, list):
                if not isinstance(got, list) or sorted(map(str, got)) != sorted(map(str, value)):
                    raise GoalNotAttainedError(
                        f"{call.api}.{arg}: wanted {value!r}, executed {got!r}")
            elif str(got) != str(value):
                raise GoalNotAttainedError(
                    f"{call.api}.{arg}: wanted {value!r}, executed {got!r}")


class TurnCapExceeded(RuntimeError):
    pass


def simulate_dialogue(
    seeds: list[AnnotatedDialogue],
    schema: DomainSchema,
    cfg: SimConfig,
    rng: np.random.Generator,
    index: dict | None = None,
    offer_map: dict | None = None,
):
    """One full-mode self-play dialogue. Returns (dialogue, info)."""
    index = index if index is not None else template_index(schema)
    offer_map = offer_map if offer_map is not None else offer_cooccurrence(seeds)
    goal = sample_goal(seeds, schema, cfg, rng)

    events: list = []
    variables: dict[str, Variable] = {}
    if schema.nlg_for_act("welcome") is not None:
        events.append(NlgCall(name=schema.nlg_for_act("welcome").name, args={}))
        events.append(EndTurn())

    user_state = UserAgentState(goal=goal, rng=rng)
    sys_state = SystemAgentState(schema=schema, rng=rng)

    counter = [0]

    def var_factory(etype: str, value: str) -> str:
        counter[0] += 1
        var = f"u{counter[0]}"
        variables[var] = Variable(entity_type=etype, value=value)
        return var

    incoming: list = []
    for _turn in range(cfg.turn_cap):
        user_acts = user_step(user_state, incoming, schema, index, rng)
        if not user_acts:
            raise TurnCapExceeded("user policy has nothing to say")
        utt = realize_user_acts(user_acts, schema, rng, var_factory, mode="full", index=index)
        events.append(utt)
        sys_acts, sys_events, new_vars = system_step(
            sys_state, user_acts, schema, cfg, rng, offer_map=offer_map
        )
        for var, (etype, value) in new_vars.items():
            variables[var] = Variable(entity_type=etype, value=value)
        events.extend(sys_events)
        if sys_state.ended:
            break
        incoming = sys_acts
    else:
        raise TurnCapExceeded(f"no EndDialogue within {cfg.turn_cap} turns")

    _check_attainment(goal, user_state, sys_state.executed)
    dialogue = AnnotatedDialogue(events=events, variables=variables)
    info = {
        "corrections": user_state.fired_corrections,
        "offers": sys_state.offers_count,
        "offers_accepted": user_state.accepted_offers,
        "cooperation": goal.cooperation,
        "api_failures": sys_state.failures_count,
        "num_calls": len(sys_state.executed),
    }
    return dialogue, info


# ---------------------------------------------------------------------------
# Base sampler: structure-preserving seed transformation
# ---------------------------------------------------------------------------


def _collapse_multi_runs(utt: UserUtterance) -> list[tuple[list, str]]:
    """Group annotations into placeholder units: runs of same-slot mentions
    separated only by ',' / 'and' collapse into one multi-valued unit."""
    toks = tokenize(utt.text)
    anns = sorted(utt.annotations, key=lambda a: a.start)
    units: list[tuple[list, str]] = []
    i = 0
    while i < len(anns):
        run = [anns[i]]
        j = i
        while j + 1 < len(anns) and anns[j + 1].slot == anns[i].slot and anns[i].slot:
            gap = toks[anns[j].end : anns[j + 1].start]
            if all(t in (",", "and") for t in gap):
                run.append(anns[j + 1])
                j += 1
            else:
                break
        slot = anns[i].slot or ""
        units.append((run, slot))
        i = j + 1
    return units


def _utterance_pattern(utt: UserUtterance) -> tuple[str, list] | None:
    """Rebuild the template pattern behind an annotated utterance, e.g.
    "how long is $movieTitle". None when any span lacks a slot tag."""
    toks = tokenize_with_offsets(utt.text)
    units = _collapse_multi_runs(utt)
    if any(not slot for _, slot in units):
        return None
    parts: list[str] = []
    pos = 0
    for run, slot in units:
        start_char = toks[run[0].start].start
        end_char = toks[run[-1].end - 1].end
        parts.append(utt.text[pos:start_char])
        parts.append("$" + slot.split(".", 1)[1])
        pos = end_char
    parts.append(utt.text[pos:])
    return "".join(parts), units


def _rerender_utterance(
    utt: UserUtterance,
    new_values: dict[str, str],
    schema: DomainSchema,
    index: dict,
    rng: np.random.Generator,
) -> UserUtterance:
    """Re-render with resampled values; template swap when the original text
    pattern-matches a known template, literal span substitution otherwise."""
    pattern = _utterance_pattern(utt)
    if pattern is not None:
        text_pattern, units = pattern
        matched = None
        for tpl in schema.user_templates:
            if tpl.text == text_pattern:
                matched = tpl
                break
        if matched is not None:
            candidates = index.get(tuple(sorted(matched.acts)), [matched])
            tpl = candidates[int(rng.integers(0, len(candidates)))]
            by_arg = {slot.split(".", 1)[1]: (run, slot) for run, slot in units}
            return _render_pattern(tpl.text, by_arg, new_values, utt)
    # fallback: splice new values into the original text
    toks = tokenize_with_offsets(utt.text)
    anns = sorted(utt.annotations, key=lambda a: a.start)
    parts = []
    new_anns = []
    pos = 0
    n_tokens = 0
    for ann in anns:
        before = utt.text[pos : toks[ann.start].start]
        parts.append(before)
        n_tokens += len(tokenize(before))
        value = new_values[ann.variable]
        span_len = len(tokenize(value))
        new_anns.append(
            type(ann)(start=n_tokens, end=n_tokens + span_len, entity_type=ann.entity_type,
                      variable=ann.variable, slot=ann.slot)
        )
        parts.append(value)
        n_tokens += span_len
        pos = toks[ann.end - 1].end
    parts.append(utt.text[pos:])
    return UserUtterance(text="".join(parts), annotations=new_anns)


def _render_pattern(surface: str, by_arg: dict, new_values: dict[str, str],
                    original: UserUtterance) -> UserUtterance:
    import re

    parts: list[str] = []
    new_anns = []
    n_tokens = 0
    pos = 0
    for m in re.finditer(r"\$(\w+)", surface):
        before = surface[pos : m.start()]
        parts.append(before)
        n_tokens += len(tokenize(before))
        run, slot = by_arg[m.group(1)]
        for k, ann in enumerate(run):
            if k:
                sep = ", " if k < len(run) - 1 else " and "
                parts.append(sep)
                n_tokens += len(tokenize(sep))
            value = new_values[ann.variable]
            span_len = len(tokenize(value))
            new_anns.append(
                type(ann)(start=n_tokens, end=n_tokens + span_len,
                          entity_type=ann.entity_type, variable=ann.variable, slot=ann.slot)
            )
            parts.append(value)
            n_tokens += span_len
        pos = m.end()
    parts.append(surface[pos:])
    return UserUtterance(text="".join(parts), annotations=new_anns)


def transform_seed(
    seed: AnnotatedDialogue,
    schema: DomainSchema,
    rng: np.random.Generator,
    index: dict,
    return_pools: dict | None = None,
) -> AnnotatedDialogue:
    """Base-sampler resample: identical event structure, values redrawn from
    catalogs (returns from return samplers), user texts re-rendered."""
    return_defined = set()
    for e in seed.events:
        if isinstance(e, ApiCall) and e.return_var:
            return_defined.add(e.return_var)

    groups: dict[str, list[str]] = {}
    group_of: dict[str, str] = {}
    group_has_return: dict[str, bool] = {}
    group_type: dict[str, str] = {}
    for var, spec in seed.variables.items():
        key = f"{spec.entity_type}::{str(spec.value).casefold()}"
        groups.setdefault(key, []).append(var)
        group_of[var] = key
        group_type[key] = spec.entity_type
        group_has_return[key] = group_has_return.get(key, False) or var in return_defined

    used_per_type: dict[str, set] = {}
    group_value: dict[str, str] = {}
    for key in groups:
        etype = group_type[key]
        ent = schema.entity_type(etype)
        if group_has_return[key]:
            pool = None if not return_pools else return_pools.get(etype)
            values = list(pool) if pool is not None else ent.sampler_values()
        else:
            values = list(ent.catalog)
        used = used_per_type.setdefault(etype, set())
        fresh = [v for v in values if v not in used] or values
        choice = fresh[int(rng.integers(0, len(fresh)))]
        used.add(choice)
        group_value[key] = choice

    new_values = {var: group_value[group_of[var]] for var in seed.variables}
    variables = {
        var: Variable(entity_type=spec.entity_type, value=new_values[var])
        for var, spec in seed.variables.items()
    }
    events: list = []
    for e in seed.events:
        if isinstance(e, UserUtterance):
            events.append(_rerender_utterance(e, new_values, schema, index, rng))
        else:
            events.append(e)
    return AnnotatedDialogue(events=events, variables=variables)


def generate_dataset(
    seeds: list[AnnotatedDialogue],
    schema: DomainSchema,
    cfg: SimConfig,
) -> tuple[list[AnnotatedDialogue], dict]:
    """Deterministic corpus generation; dialogue i uses rng seeded (seed, i)."""
    if cfg.num_dialogues < 1:
        raise ValueError("num_dialogues must be >= 1")
    if not seeds:
        raise ValueError("at least one seed dialogue is required")
    index = template_index(schema)
    offer_map = offer_cooccurrence(seeds)
    dialogues: list[AnnotatedDialogue] = []
    stats = {
        "mode": cfg.mode,
        "num_dialogues": cfg.num_dialogues,
        "dialogues_with_corrections": 0,
        "corrections": 0,
        "offers": 0,
        "offers_accepted": 0,
        "api_failures": 0,
        "cooperation": {"over": 0, "exact": 0, "under": 0},
        "discards": 0,
    }
    for i in range(cfg.num_dialogues):
        rng = np.random.default_rng([cfg.seed, i])
        if cfg.mode == "base":
            seed = seeds[int(rng.integers(0, len(seeds)))]
            d = transform_seed(seed, schema, rng, index, cfg.return_pools)
            dialogues.append(d)
            stats["cooperation"]["exact"] += 1
            continue
        for attempt in range(50):
            try:
                d, info = simulate_dialogue(seeds, schema, cfg, rng, index, offer_map)
                break
            except TurnCapExceeded:
                stats["discards"] += 1
        else:
            raise RuntimeError(f"dialogue {i}: exceeded 50 generation attempts")
        dialogues.append(d)
        stats["corrections"] += info["corrections"]
        stats["dialogues_with_corrections"] += int(info["corrections"] > 0)
        stats["offers"] += info["offers"]
        stats["offers_accepted"] += info["offers_accepted"]
        stats["api_failures"] += info["api_failures"]
        stats["cooperation"][info["cooperation"]] += 1
    return dialogues, stats
