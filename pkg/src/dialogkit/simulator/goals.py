"""User goals and goal sampling.

A goal is an ordered list of API calls with desired argument values, plus
optional mid-dialogue revisions and a cooperation profile. Sampling is biased
toward the seed dialogues: skeletons are whole seeds, contiguous
sub-sequences, or concatenations of two seeds, with values resampled from the
catalogs and the variable-sharing structure of the seeds preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dialogue import AnnotatedDialogue, ApiCall
from ..schema import DomainSchema


@dataclass(frozen=True)
class FromReturn:
    """Desired value = whatever the call at this goal index returns at runtime."""

    call_index: int


@dataclass
class TargetCall:
    api: str
    bindings: dict[str, object] = field(default_factory=dict)  # arg -> value | [values] | FromReturn


@dataclass
class Revision:
    call_index: int
    arg: str
    new_value: object


@dataclass
class Goal:
    target_calls: list[TargetCall]
    revisions: list[Revision] = field(default_factory=list)
    cooperation: str = "exact"  # over | exact | under

    def post_revision_bindings(self, call_index: int) -> dict:
        out = dict(self.target_calls[call_index].bindings)
        for rev in self.revisions:
            if rev.call_index == call_index:
                out[rev.arg] = rev.new_value
        return out


@dataclass
class _SeedSkeleton:
    """One seed reduced to its calls, variable identity and value preserved."""

    calls: list[tuple[str, dict[str, object]]]  # (api, arg -> var | [vars] | ("lit", v))
    var_types: dict[str, str]
    var_values: dict[str, str]
    return_vars: dict[str, int]  # var -> producing call index
    groups: dict[str, str]  # var -> value-sharing group key


def _skeleton(seed: AnnotatedDialogue) -> _SeedSkeleton:
    calls = []
    return_vars: dict[str, int] = {}
    for e in seed.events:
        if isinstance(e, ApiCall):
            args: dict[str, object] = {}
            for name, b in e.args.items():
                if b.var is not None:
                    args[name] = b.var
                elif b.vars is not None:
                    args[name] = list(b.vars)
                else:
                    args[name] = ("lit", b.lit)
            if e.return_var is not None:
                return_vars[e.return_var] = len(calls)
            calls.append((e.name, args))
    var_types = {v: var.entity_type for v, var in seed.variables.items()}
    var_values = {v: str(var.value) for v, var in seed.variables.items()}
    groups = {
        v: f"{var.entity_type}::{str(var.value).casefold()}" for v, var in seed.variables.items()
    }
    return _SeedSkeleton(calls, var_types, var_values, return_vars, groups)


def _first_informed_vars(seed: AnnotatedDialogue) -> dict[str, list[str]]:
    """Slot tag -> chronological list of distinct variables informing it."""
    history: dict[str, list[str]] = {}
    for e in seed.events:
        for ann in getattr(e, "annotations", []):
            if not ann.slot:
                continue
            bucket = history.setdefault(ann.slot, [])
            if ann.variable not in bucket:
                bucket.append(ann.variable)
    return history


def _sample_value(schema: DomainSchema, type_name: str, rng: np.random.Generator,
                  exclude: str | None = None) -> str:
    catalog = schema.entity_type(type_name).catalog
    if not catalog:
        raise ValueError(f"entity type {type_name!r} has an empty catalog")
    candidates = [v for v in catalog if v != exclude] or list(catalog)
    return candidates[int(rng.integers(0, len(candidates)))]


def _sample_multi(schema: DomainSchema, type_name: str, rng: np.random.Generator) -> list[str]:
    catalog = list(schema.entity_type(type_name).catalog)
    k = int(rng.integers(1, min(3, len(catalog)) + 1))
    idx = rng.choice(len(catalog), size=k, replace=False)
    return [catalog[i] for i in sorted(int(i) for i in idx)]


class _PieceSampler:
    """Materializes one skeleton piece; tracks per-group resampled values."""

    def __init__(self, sk: _SeedSkeleton, schema: DomainSchema, rng: np.random.Generator, prefix: str):
        self.sk = sk
        self.schema = schema
        self.rng = rng
        self.prefix = prefix
        self.group_values: dict[str, object] = {}

    def group(self, var: str) -> str:
        return self.prefix + self.sk.groups.get(var, var)

    def value_for(self, var: str, type_name: str) -> object:
        g = self.group(var)
        if g not in self.group_values:
            self.group_values[g] = _sample_value(self.schema, type_name, self.rng)
        return self.group_values[g]

    def multi_value_for(self, var_list: list[str], type_name: str) -> list[str]:
        g = self.prefix + "||".join(sorted(self.sk.groups.get(v, v) for v in var_list))
        if g not in self.group_values:
            self.group_values[g] = _sample_multi(self.schema, type_name, self.rng)
        return list(self.group_values[g])

    def materialize(self, keep: list[int], base_offset: int,
                    slot_overrides: dict[tuple[int, str], str] | None = None) -> list[TargetCall]:
        kept_offsets = {orig: base_offset + pos for pos, orig in enumerate(keep)}
        out: list[TargetCall] = []
        for orig_idx in keep:
            api_name, args = self.sk.calls[orig_idx]
            api = self.schema.api(api_name)
            bindings: dict[str, object] = {}
            for arg_name, spec in args.items():
                if slot_overrides and (orig_idx, arg_name) in slot_overrides:
                    spec = slot_overrides[(orig_idx, arg_name)]
                arg = api.arg(arg_name)
                if isinstance(spec, tuple) and spec and spec[0] == "lit":
                    bindings[arg_name] = spec[1]
                    continue
                if isinstance(spec, list):
                    bindings[arg_name] = self.multi_value_for(spec, arg.entity_type)
                    continue
                link = self._return_link(spec, kept_offsets, base_offset + len(out))
                if link is not None:
                    bindings[arg_name] = FromReturn(link)
                else:
                    bindings[arg_name] = self.value_for(spec, arg.entity_type)
            out.append(TargetCall(api=api_name, bindings=bindings))
        return out

    def _return_link(self, var: str, kept_offsets: dict[int, int], position: int) -> int | None:
        group = self.sk.groups.get(var, var)
        best = None
        for other, idx in self.sk.return_vars.items():
            if self.sk.groups.get(other, other) == group and idx in kept_offsets:
                off = kept_offsets[idx]
                if off < position and (best is None or off < best):
                    best = off
        return best


def extract_goal(seed: AnnotatedDialogue, schema: DomainSchema,
                 resample: bool = False, rng: np.random.Generator | None = None) -> Goal:
    """The goal a seed encodes: calls with pre-correction desired values and
    the corrections as revisions. ``resample`` redraws values from catalogs
    while preserving the seed's value-sharing structure."""
    sk = _skeleton(seed)
    keep = list(range(len(sk.calls)))
    informs = _first_informed_vars(seed)

    # slots informed by several distinct variables were corrected mid-dialogue:
    # desired value is the first one, the last becomes the revision target
    slot_overrides: dict[tuple[int, str], str] = {}
    revision_specs: list[tuple[int, str, str]] = []  # (call_idx, arg, final_var)
    api_to_call: dict[str, int] = {}
    for i, (api_name, _) in enumerate(sk.calls):
        api_to_call.setdefault(api_name, i)
    for slot, var_list in informs.items():
        if len(var_list) < 2:
            continue
        api_name, _, arg = slot.partition(".")
        if api_name not in api_to_call:
            continue
        call_idx = api_to_call[api_name]
        arg_def = schema.api(api_name).arg(arg)
        if arg_def is None or arg_def.multi_valued:
            continue  # multi-value corrections are handled as whole-list rebinds
        slot_overrides[(call_idx, arg)] = var_list[0]
        revision_specs.append((call_idx, arg, var_list[-1]))

    if resample:
        sampler = _PieceSampler(sk, schema, rng or np.random.default_rng(0), "")
        calls = sampler.materialize(keep, 0, slot_overrides)
        revisions = []
        for call_idx, arg, final_var in revision_specs:
            type_name = sk.var_types[final_var]
            old = calls[call_idx].bindings.get(arg)
            new = _sample_value(schema, type_name, sampler.rng,
                                exclude=old if isinstance(old, str) else None)
            revisions.append(Revision(call_idx, arg, new))
    else:
        calls = []
        for orig_idx, (api_name, args) in enumerate(sk.calls):
            bindings = {}
            for arg_name, spec in args.items():
                if (orig_idx, arg_name) in slot_overrides:
                    spec = slot_overrides[(orig_idx, arg_name)]
                if isinstance(spec, tuple) and spec and spec[0] == "lit":
                    bindings[arg_name] = spec[1]
                elif isinstance(spec, list):
                    bindings[arg_name] = [sk.var_values[v] for v in spec]
                else:
                    produced = sk.return_vars.get(spec)
                    if produced is not None and produced < orig_idx:
                        bindings[arg_name] = FromReturn(produced)
                    else:
                        bindings[arg_name] = sk.var_values[spec]
            calls.append(TargetCall(api=api_name, bindings=bindings))
        revisions = [
            Revision(ci, arg, sk.var_values[fv]) for ci, arg, fv in revision_specs
        ]
    return Goal(target_calls=calls, revisions=revisions, cooperation="exact")


def correctable_slots(schema: DomainSchema, goal_calls: list[TargetCall]) -> list[tuple[int, str]]:
    """(call index, arg) pairs a revision can target: the API confirms before
    calling and the domain ships a correct() template for the slot."""
    template_keys = {key for tpl in schema.user_templates for key in tpl.acts}
    out = []
    for i, call in enumerate(goal_calls):
        api = schema.api(call.api)
        if api is None or not api.confirm_before_call:
            continue
        for arg_name, value in call.bindings.items():
            if isinstance(value, FromReturn):
                continue
            if f"correct({call.api}.{arg_name})" in template_keys:
                out.append((i, arg_name))
    return out


def sample_goal(
    seeds: list[AnnotatedDialogue],
    schema: DomainSchema,
    cfg,
    rng: np.random.Generator,
) -> Goal:
    """Draw a goal biased toward the seed skeletons (see module docstring)."""
    if not seeds:
        raise ValueError("goal sampling needs at least one seed dialogue")
    if cfg.mode == "base":
        seed = seeds[int(rng.integers(0, len(seeds)))]
        return extract_goal(seed, schema, resample=True, rng=rng)

    roll = rng.random()
    pieces: list[tuple[_SeedSkeleton, list[int]]] = []
    if roll < 0.8 or len(seeds) == 1:
        sk = _skeleton(seeds[int(rng.integers(0, len(seeds)))])
        n = len(sk.calls)
        if n == 0:
            raise ValueError("seed has no API calls")
        if roll < 0.6:
            keep = list(range(n))
        else:
            length = int(rng.integers(1, n + 1))
            start = int(rng.integers(0, n - length + 1))
            keep = list(range(start, start + length))
        pieces.append((sk, keep))
    else:
        for _ in range(2):
            sk = _skeleton(seeds[int(rng.integers(0, len(seeds)))])
            pieces.append((sk, list(range(len(sk.calls)))))

    target_calls: list[TargetCall] = []
    for pi, (sk, keep) in enumerate(pieces):
        sampler = _PieceSampler(sk, schema, rng, f"p{pi}::")
        target_calls.extend(sampler.materialize(keep, len(target_calls)))

    coop = "exact"
    r = rng.random()
    if r < cfg.p_over_cooperative:
        coop = "over"
    elif r < cfg.p_over_cooperative + cfg.p_under_cooperative:
        coop = "under"
    if coop == "under":
        for call in target_calls:
            api = schema.api(call.api)
            for arg in list(call.bindings):
                arg_def = api.arg(arg)
                if arg_def is not None and not arg_def.required:
                    del call.bindings[arg]
    elif coop == "over":
        for call in target_calls:
            api = schema.api(call.api)
            for arg in api.optional_args():
                if arg.name not in call.bindings and rng.random() < 0.5:
                    call.bindings[arg.name] = (
                        _sample_multi(schema, arg.entity_type, rng)
                        if arg.multi_valued
                        else _sample_value(schema, arg.entity_type, rng)
                    )

    revisions: list[Revision] = []
    if rng.random() < cfg.p_correction:
        slots = correctable_slots(schema, target_calls)
        if slots:
            call_idx, arg = slots[int(rng.integers(0, len(slots)))]
            arg_def = schema.api(target_calls[call_idx].api).arg(arg)
            old = target_calls[call_idx].bindings.get(arg)
            if arg_def.multi_valued:
                new_value: object = _sample_multi(schema, arg_def.entity_type, rng)
            else:
                new_value = _sample_value(schema, arg_def.entity_type, rng,
                                          exclude=old if isinstance(old, str) else None)
            revisions.append(Revision(call_idx, arg, new_value))

    return Goal(target_calls=target_calls, revisions=revisions, cooperation=coop)
