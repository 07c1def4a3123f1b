"""Heuristic user and system policies for dual-agent self-play.

The agents exchange dialogue acts. The user gradually reveals a fixed sampled
goal; the system merges what it hears into a goal estimate, requests missing
required arguments one at a time (schema order), confirms when the API asks
for it, executes with simulated returns, and occasionally makes proactive
offers. The system's emitted events double as supervised training labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..acts import DialogueAct
from ..dialogue import ApiCall, EndDialogue, EndTurn, NlgCall, Binding
from ..schema import ApiDef, DomainSchema, parse_act_key
from .goals import FromReturn, Goal, Revision
from .realize import GenerationError

API_FAILURE = object()  # sentinel return for failed simulated calls


def simulate_api(api: ApiDef, bindings: dict, schema: DomainSchema,
                 rng: np.random.Generator, p_failure: float = 0.0,
                 return_pools: dict[str, list[str]] | None = None):
    """Sampled return value, a failure marker, or None for void APIs."""
    if p_failure and rng.random() < p_failure:
        return API_FAILURE
    if api.return_type is None:
        return None
    pool = None
    if return_pools:
        pool = return_pools.get(api.return_sampler or api.return_type)
    if pool is None:
        pool = schema.entity_type(api.return_sampler or api.return_type).sampler_values()
    if not pool:
        raise ValueError(f"API {api.name} has a return type but an empty return catalog")
    return pool[int(rng.integers(0, len(pool)))]


def _values_equal(a, b) -> bool:
    if isinstance(a, (list, tuple)) or isinstance(b, (list, tuple)):
        if not isinstance(a, (list, tuple)) or not isinstance(b, (list, tuple)):
            return False
        return sorted(map(str, a)) == sorted(map(str, b))
    return str(a) == str(b)


def carryover_candidates(api: ApiDef,
                         prior_calls: list[tuple[str, dict[str, object]]],
                         last_return: tuple[str, object] | None,
                         schema: DomainSchema) -> dict[str, object]:
    """Values the system would silently pre-bind for a newly active call.

    Required args only: same-named same-typed argument of any earlier call
    (most recent wins), or the immediately preceding call's return value when
    the entity type matches.
    """
    out: dict[str, object] = {}
    for arg in api.required_args():
        for prior_api_name, bindings in reversed(prior_calls):
            prior_api = schema.api(prior_api_name)
            prior_arg = prior_api.arg(arg.name) if prior_api else None
            if prior_arg is not None and prior_arg.entity_type == arg.entity_type \
                    and arg.name in bindings:
                out[arg.name] = bindings[arg.name]
                break
        if arg.name not in out and last_return is not None:
            rtype, rvalue = last_return
            if rtype == arg.entity_type and rvalue is not None:
                out[arg.name] = rvalue
    return out


# ---------------------------------------------------------------------------
# User agent
# ---------------------------------------------------------------------------


@dataclass
class UserAgentState:
    goal: Goal
    rng: np.random.Generator
    call_idx: int = 0
    engaged: set = field(default_factory=set)          # goal call indices invoked
    revealed: set = field(default_factory=set)         # (call_idx, arg)
    return_values: dict = field(default_factory=dict)  # goal call idx -> value
    consumed_revisions: set = field(default_factory=set)
    pending_extra: str | None = None                   # accepted offered API
    observed_calls: list = field(default_factory=list)  # (api, {arg: value})
    last_return: tuple | None = None                   # (entity type, value)
    fired_corrections: int = 0
    accepted_offers: int = 0
    said_bye: bool = False

    def current_call(self):
        if self.call_idx < len(self.goal.target_calls):
            return self.goal.target_calls[self.call_idx]
        return None


def _resolve_binding(state: UserAgentState, schema: DomainSchema, call_idx: int, arg_name: str):
    """Concrete value for a goal binding; FromReturn links read the observed
    return, improvising a catalog value if the producing call failed."""
    call = state.goal.target_calls[call_idx]
    value = call.bindings.get(arg_name)
    api = schema.api(call.api)
    arg = api.arg(arg_name)
    if isinstance(value, FromReturn):
        got = state.return_values.get(value.call_index)
        if got is None:
            catalog = schema.entity_type(arg.entity_type).catalog
            got = catalog[int(state.rng.integers(0, len(catalog)))]
        call.bindings[arg_name] = got
        return got
    if value is None:
        catalog = schema.entity_type(arg.entity_type).catalog
        if arg.multi_valued:
            value = [catalog[int(state.rng.integers(0, len(catalog)))]]
        else:
            value = catalog[int(state.rng.integers(0, len(catalog)))]
        call.bindings[arg_name] = value  # keep the simulation total
    return value


def _armed_revision(state: UserAgentState, api_name: str | None = None) -> Revision | None:
    for i, rev in enumerate(state.goal.revisions):
        if i in state.consumed_revisions:
            continue
        if rev.call_index != state.call_idx:
            continue  # only the active call can be corrected
        call = state.goal.target_calls[rev.call_index]
        if api_name is not None and call.api != api_name:
            continue
        state._armed_index = i  # type: ignore[attr-defined]
        return rev
    return None


def _mandatory_informs(state: UserAgentState, schema: DomainSchema) -> list[str]:
    """Args the user must volunteer for the current call: optional goal args
    (the system never requests those), required args whose value would be
    carried over incorrectly, and — half the time — an explicit re-mention of
    a value the agent itself introduced ("showtimes for a star is born")."""
    call = state.current_call()
    api = schema.api(call.api)
    mandatory: list[str] = []
    carry = carryover_candidates(api, state.observed_calls, state.last_return, schema)
    for arg in api.required_args():
        if arg.name not in call.bindings:
            continue
        desired = call.bindings[arg.name]
        is_return_ref = isinstance(desired, FromReturn)
        if is_return_ref:
            desired = state.return_values.get(desired.call_index)
            if desired is None:
                desired = _resolve_binding(state, schema, state.call_idx, arg.name)
        if arg.name in carry and not _values_equal(carry[arg.name], desired):
            mandatory.append(arg.name)  # must override stale carryover
        elif is_return_ref and state.rng.random() < 0.5:
            mandatory.append(arg.name)  # voluntary re-mention of a returned value
    for arg in api.optional_args():
        if arg.name in call.bindings:
            mandatory.append(arg.name)  # optional args are never requested
    return mandatory


def _invocation_acts(state: UserAgentState, schema: DomainSchema, index) -> list[DialogueAct]:
    call = state.current_call()
    api = schema.api(call.api)
    mandatory = _mandatory_informs(state, schema)

    informable = [a for a in call.bindings if schema.api(call.api).arg(a) is not None]
    key_prefix = f"request({call.api})"
    options: list[frozenset] = []
    for key_tuple, _tpls in index.items():
        if key_prefix not in key_tuple:
            continue
        slots = set()
        ok = True
        for k in key_tuple:
            label, qual = parse_act_key(k)
            if label == "request":
                continue
            if label != "inform" or not qual or not qual.startswith(call.api + "."):
                ok = False
                break
            slots.add(qual.split(".", 1)[1])
        if ok and set(mandatory) <= slots <= set(informable):
            options.append(frozenset(slots))
    if options:
        coop = state.goal.cooperation
        if coop == "over":
            best = max(len(s) for s in options)
            options = [s for s in options if len(s) == best]
        elif coop == "under":
            best = min(len(s) for s in options)
            options = [s for s in options if len(s) == best]
        options.sort(key=sorted)
        informs = sorted(options[int(state.rng.integers(0, len(options)))])
    else:
        informs = list(dict.fromkeys(mandatory))

    acts = [DialogueAct("request", action=call.api)]
    for arg_name in informs:
        value = _resolve_binding(state, schema, state.call_idx, arg_name)
        acts.append(DialogueAct("inform", slot=f"{call.api}.{arg_name}", value=value))
        state.revealed.add((state.call_idx, arg_name))
    state.engaged.add(state.call_idx)
    return acts


def user_step(state: UserAgentState, incoming: list[DialogueAct], schema: DomainSchema,
              index, rng: np.random.Generator | None = None) -> list[DialogueAct]:
    """One user move: react to the system's acts, else push the goal forward."""
    rng = rng or state.rng
    responses: list[DialogueAct] = []
    answered_request = False

    for act in incoming:
        if act.label == "notify_result":
            bindings = {k: v for k, v in act.bindings.items() if k != "__return__"}
            state.observed_calls.append((act.action, bindings))
            api = schema.api(act.action)
            ret = act.bindings.get("__return__")
            if api and api.return_type:
                state.last_return = (api.return_type, ret if act.success else None)
            if state.pending_extra == act.action:
                state.pending_extra = None
            else:
                cur = state.current_call()
                if cur is not None and cur.api == act.action:
                    if act.success and ret is not None:
                        state.return_values[state.call_idx] = ret
                    state.call_idx += 1
        elif act.label == "confirm":
            rev = _armed_revision(state, act.action)
            if rev is not None:
                state.consumed_revisions.add(state._armed_index)
                state.goal.target_calls[rev.call_index].bindings[rev.arg] = rev.new_value
                state.fired_corrections += 1
                responses.append(DialogueAct("deny"))
                responses.append(DialogueAct(
                    "correct",
                    slot=f"{state.goal.target_calls[rev.call_index].api}.{rev.arg}",
                    value=rev.new_value,
                ))
            else:
                responses.append(DialogueAct("affirm"))
        elif act.label == "request":
            api_name, _, arg_name = (act.slot or "").partition(".")
            cur = state.current_call()
            if state.pending_extra == api_name:
                catalog_type = schema.api(api_name).arg(arg_name).entity_type
                catalog = schema.entity_type(catalog_type).catalog
                value = catalog[int(rng.integers(0, len(catalog)))]
            elif cur is not None and cur.api == api_name:
                value = _resolve_binding(state, schema, state.call_idx, arg_name)
                state.revealed.add((state.call_idx, arg_name))
            else:
                arg_def = schema.api(api_name).arg(arg_name)
                catalog = schema.entity_type(arg_def.entity_type).catalog
                value = catalog[int(rng.integers(0, len(catalog)))]
            responses.append(DialogueAct("inform", slot=f"{api_name}.{arg_name}", value=value))
            answered_request = True
            if state.goal.cooperation == "over" and cur is not None and cur.api == api_name:
                extras = [
                    a for a in cur.bindings
                    if a != arg_name and (state.call_idx, a) not in state.revealed
                ][:2]
                for extra in extras:
                    value = _resolve_binding(state, schema, state.call_idx, extra)
                    responses.append(DialogueAct("inform", slot=f"{api_name}.{extra}", value=value))
                    state.revealed.add((state.call_idx, extra))
        elif act.label == "offer":
            cur = state.current_call()
            remaining = {c.api for c in state.goal.target_calls[state.call_idx :]}
            if cur is not None and act.action == cur.api and state.call_idx not in state.engaged:
                # the offer matches the user's next planned call: adopt it
                responses.append(DialogueAct("accept_offer"))
                state.accepted_offers += 1
                state.engaged.add(state.call_idx)
                for arg_name in _mandatory_informs(state, schema):
                    value = _resolve_binding(state, schema, state.call_idx, arg_name)
                    responses.append(
                        DialogueAct("inform", slot=f"{cur.api}.{arg_name}", value=value)
                    )
                    state.revealed.add((state.call_idx, arg_name))
            elif act.action in remaining:
                responses.append(DialogueAct("decline_offer"))
            elif rng.random() < 0.5:
                responses.append(DialogueAct("accept_offer"))
                state.pending_extra = act.action
                state.accepted_offers += 1
            else:
                responses.append(DialogueAct("decline_offer"))

    if answered_request or state.pending_extra is not None:
        return responses
    if any(r.label in ("deny", "correct", "affirm", "accept_offer") for r in responses):
        return responses

    # a revision on a no-confirm API fires right after the slot was informed
    rev = _armed_revision(state)
    if rev is not None:
        call = state.goal.target_calls[rev.call_index]
        api = schema.api(call.api)
        if not api.confirm_before_call and (rev.call_index, rev.arg) in state.revealed \
                and rev.call_index >= state.call_idx:
            state.consumed_revisions.add(state._armed_index)
            call.bindings[rev.arg] = rev.new_value
            state.fired_corrections += 1
            responses.append(DialogueAct("correct", slot=f"{call.api}.{rev.arg}", value=rev.new_value))
            return responses

    cur = state.current_call()
    if cur is not None and state.call_idx not in state.engaged:
        responses.extend(_invocation_acts(state, schema, index))
        return responses
    if cur is None and not state.said_bye:
        state.said_bye = True
        responses.append(DialogueAct("bye"))
        return responses
    return responses


# ---------------------------------------------------------------------------
# System agent
# ---------------------------------------------------------------------------


@dataclass
class _CallInstance:
    api: str
    bindings: dict = field(default_factory=dict)  # arg -> (value, varspec)
    confirmed: bool = False
    carryover_applied: bool = False


@dataclass
class SystemAgentState:
    schema: DomainSchema
    rng: np.random.Generator
    agenda: list = field(default_factory=list)           # _CallInstance queue
    executed: list = field(default_factory=list)         # (api, {arg: value}, value|None, success)
    executed_vars: list = field(default_factory=list)    # (api, {arg: varspec})
    last_return: tuple | None = None                     # (type, value, var)
    offered: str | None = None
    offers_made: set = field(default_factory=set)
    awaiting_confirm: str | None = None
    ended: bool = False
    var_count: int = 0
    offers_count: int = 0
    failures_count: int = 0

    def new_var(self, prefix: str = "v") -> str:
        self.var_count += 1
        return f"{prefix}{self.var_count}"

    def instance_for(self, api_name: str) -> "_CallInstance | None":
        for inst in self.agenda:
            if inst.api == api_name:
                return inst
        return None


def _nlg_event(schema: DomainSchema, label: str, qualifier: str | None,
               values: dict, varspecs: dict, return_info=None) -> NlgCall:
    nlg = schema.nlg_for_act(label, qualifier)
    if nlg is None:
        key = f"{label}({qualifier})" if qualifier else label
        raise GenerationError(f"no NLG response expresses act {key!r}")
    args: dict[str, Binding] = {}
    for arg in nlg.args:
        if arg.name in varspecs:
            spec = varspecs[arg.name]
            args[arg.name] = Binding(vars=list(spec)) if isinstance(spec, list) else Binding(var=spec)
        elif return_info is not None and return_info[0] == arg.entity_type:
            args[arg.name] = Binding(var=return_info[1])
        elif arg.required:
            raise GenerationError(f"NLG {nlg.name}: cannot bind required argument {arg.name!r}")
    return NlgCall(name=nlg.name, args=args)


def system_step(state: SystemAgentState, incoming: list[DialogueAct], schema: DomainSchema,
                cfg, rng: np.random.Generator | None = None,
                offer_map: dict[str, list[str]] | None = None):
    """One system move. Returns (acts to the user, emitted DialogueEvents,
    new variables dict). The events are the supervised training labels."""
    rng = rng or state.rng
    acts_out: list[DialogueAct] = []
    events: list = []
    new_vars: dict[str, tuple[str, str]] = {}  # var -> (entity type, value)

    for act in incoming:
        if act.label == "bye":
            try:
                events.append(_nlg_event(schema, "bye", None, {}, {}))
            except GenerationError:
                pass
            events.append(EndDialogue())
            state.ended = True
            return acts_out, events, new_vars
        if act.label == "request" and act.action:
            state.agenda.append(_CallInstance(api=act.action))
        elif act.label in ("inform", "correct") and act.slot:
            api_name, _, arg_name = act.slot.partition(".")
            inst = state.instance_for(api_name)
            if inst is None:
                inst = _CallInstance(api=api_name)
                state.agenda.append(inst)
            varspec = getattr(act, "vars", None) if isinstance(act.value, (list, tuple)) \
                else getattr(act, "var", None)
            inst.bindings[arg_name] = (act.value, varspec)
            if act.label == "correct" and state.awaiting_confirm == api_name:
                inst.confirmed = False
        elif act.label == "affirm":
            if state.awaiting_confirm:
                inst = state.instance_for(state.awaiting_confirm)
                if inst is not None:
                    inst.confirmed = True
                state.awaiting_confirm = None
        elif act.label == "deny":
            pass  # a correct act follows and triggers re-confirmation
        elif act.label == "accept_offer":
            if state.offered:
                state.agenda.append(_CallInstance(api=state.offered))
                state.offered = None
        elif act.label == "decline_offer":
            state.offered = None

    while True:
        if not state.agenda:
            events.append(EndTurn())
            return acts_out, events, new_vars
        inst = state.agenda[0]
        api = schema.api(inst.api)
        if api is None:
            state.agenda.pop(0)
            continue

        if not inst.carryover_applied:
            prior = [(a, b) for a, b, _v, _s in state.executed]
            last_ret = None
            if state.last_return is not None and state.last_return[1] is not None:
                last_ret = (state.last_return[0], state.last_return[1])
            for arg_name, value in carryover_candidates(api, prior, last_ret, schema).items():
                if arg_name not in inst.bindings:
                    inst.bindings[arg_name] = (value, _lookup_varspec(state, arg_name, value))
            inst.carryover_applied = True

        missing = [a for a in api.required_args() if a.name not in inst.bindings]
        if missing:
            slot = f"{api.name}.{missing[0].name}"
            acts_out.append(DialogueAct("request", slot=slot))
            events.append(_nlg_event(schema, "request", slot, {}, {}))
            events.append(EndTurn())
            return acts_out, events, new_vars

        if api.confirm_before_call and not inst.confirmed:
            values = {a: v for a, (v, _) in inst.bindings.items()}
            varspecs = {a: vs for a, (_, vs) in inst.bindings.items() if vs is not None}
            acts_out.append(DialogueAct("confirm", action=api.name, bindings=values))
            events.append(_nlg_event(schema, "confirm", api.name, values, varspecs))
            events.append(EndTurn())
            state.awaiting_confirm = api.name
            return acts_out, events, new_vars

        # execute
        values = {a: v for a, (v, _) in inst.bindings.items()}
        varspecs = {a: vs for a, (_, vs) in inst.bindings.items() if vs is not None}
        result = simulate_api(api, values, schema, rng, cfg.p_api_failure, cfg.return_pools)
        success = result is not API_FAILURE
        return_var = None
        return_value = None
        if success and api.return_type is not None:
            return_value = result
            return_var = state.new_var()
            new_vars[return_var] = (api.return_type, return_value)
        event_args = {}
        for a, (_v, vs) in inst.bindings.items():
            if vs is None:
                event_args[a] = Binding(lit=_v)
            elif isinstance(vs, list):
                event_args[a] = Binding(vars=list(vs))
            else:
                event_args[a] = Binding(var=vs)
        events.append(ApiCall(name=api.name, args=event_args, return_var=return_var, success=success))
        state.executed.append((api.name, values, return_value, success))
        state.executed_vars.append((api.name, varspecs))
        if api.return_type is not None:
            state.last_return = (api.return_type, return_value if success else None, return_var)
        if not success:
            state.failures_count += 1
        state.agenda.pop(0)

        notify_bindings = dict(values)
        notify_bindings["__return__"] = return_value
        acts_out.append(DialogueAct("notify_result", action=api.name,
                                    bindings=notify_bindings, success=success))
        face = "notify_result" if success else "no_result"
        ret_info = (api.return_type, return_var) if return_var is not None else None
        events.append(_nlg_event(schema, face, api.name, values, varspecs, return_info=ret_info))

        if success and offer_map and state.offered is None:
            candidates = [
                c for c in offer_map.get(api.name, [])
                if schema.nlg_for_act("offer", c) is not None
                and state.instance_for(c) is None
            ]
            if candidates and rng.random() < cfg.p_proactive_offer:
                choice = candidates[int(rng.integers(0, len(candidates)))]
                state.offered = choice
                state.offers_made.add(choice)
                state.offers_count += 1
                acts_out.append(DialogueAct("offer", action=choice))
                events.append(_nlg_event(schema, "offer", choice, {}, {}))
                events.append(EndTurn())
                return acts_out, events, new_vars


def _lookup_varspec(state: SystemAgentState, arg_name: str, value) -> object:
    """Variable behind a carryover value: same-named arg of an earlier call,
    else the last return's variable."""
    for (a_name, values, _r, _s), (_a2, varspecs) in zip(
        reversed(state.executed), reversed(state.executed_vars)
    ):
        if arg_name in varspecs and _values_equal(values.get(arg_name), value):
            return varspecs[arg_name]
    if state.last_return is not None and state.last_return[1] is not None \
            and _values_equal(state.last_return[1], value):
        return state.last_return[2]
    return None
