"""Live dialogue engine: per-session state and the NER -> (AP -> AF ->
execute)* action loop.

Each user utterance is tagged, then actions are predicted one at a time; each
executed action is appended to the session history and so shapes the next
prediction, until EndTurn/EndDialogue or the per-turn action cap. Entities
mentioned by the agent or returned by APIs feed the session's dynamic
catalogue, which the tagger consumes on later turns.
"""

from __future__ import annotations

import concurrent.futures
import uuid
from dataclasses import dataclass, field

import numpy as np

from .context import extract_features
from .dialogue import (
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
from .models.action import select_action
from .models.argfill import ActionSignature, MissingArgument, resolve_signature_values
from .models.bundle import BundleError, ModelBundle
from .schema import ApiDef, DomainSchema, NlgDef, schema_fingerprint
from .simulator.realize import render_nlg
from .tokenizer import fold


class SessionEnded(RuntimeError):
    pass


class ActionCapExceeded(RuntimeError):
    pass


@dataclass
class RuntimeConfig:
    action_cap: int = 8
    fallback_nlg: str = "cannot_handle"
    api_timeout: float = 5.0
    debug: bool = False


API_FAILURE = object()


class ApiExecutor:
    """Dispatches API calls to registered handlers, or samples mock returns.

    Handlers take the resolved bindings dict and return the value; raising or
    exceeding the timeout counts as a failure and routes to the no-result
    response.
    """

    def __init__(self, schema: DomainSchema, mode: str = "mock",
                 handlers: dict | None = None, rng: np.random.Generator | None = None,
                 timeout: float = 5.0):
        self.schema = schema
        self.mode = mode
        self.handlers = handlers or {}
        self.rng = rng or np.random.default_rng(0)
        self.timeout = timeout
        if mode == "live":
            missing = [a.name for a in schema.apis if a.name not in self.handlers]
            if missing:
                raise ValueError(f"live executor is missing handlers for: {', '.join(missing)}")
            self._pool = concurrent.futures.ThreadPoolExecutor(max_workers=4)

    def execute(self, api: ApiDef, bindings: dict):
        if self.mode == "mock":
            handler = self.handlers.get(api.name)
            if handler is None:
                if api.return_type is None:
                    return None
                pool = self.schema.entity_type(api.return_sampler or api.return_type).sampler_values()
                if not pool:
                    raise ValueError(f"API {api.name} has no return catalog to sample")
                return pool[int(self.rng.integers(0, len(pool)))]
        else:
            handler = self.handlers[api.name]
        future = getattr(self, "_pool", None)
        if future is None:
            try:
                return handler(bindings)
            except Exception:
                return API_FAILURE
        task = self._pool.submit(handler, bindings)
        try:
            return task.result(timeout=self.timeout)
        except Exception:
            return API_FAILURE


@dataclass
class StepTrace:
    distribution: dict[str, float]
    bin: str  # high | medium | low-fallback
    chosen: str
    bindings: dict | None = None
    pointer_scores: dict | None = None  # arg -> ranked (mention value, score)


@dataclass
class TurnResult:
    executed: list[dict]  # {"name", "args" (resolved values), "return", "success"}
    agent_text: str
    ended: bool
    mentions: list[dict] = field(default_factory=list)
    steps: list[StepTrace] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class Session:
    session_id: str
    schema: DomainSchema
    bundle: ModelBundle
    executor: ApiExecutor
    config: RuntimeConfig
    rng: np.random.Generator
    history: AnnotatedDialogue = field(default_factory=AnnotatedDialogue)
    status: str = "active"
    var_count: int = 0
    welcome_text: str = ""

    def new_var(self) -> str:
        self.var_count += 1
        return f"r{self.var_count}"

    def dynamic_catalog(self) -> dict[str, list[str]]:
        ctx = extract_features(self.history, len(self.history.events), self.schema)
        return ctx.dynamic_catalogs()


def create_session(
    schema: DomainSchema,
    bundle: ModelBundle,
    executor: ApiExecutor | None = None,
    config: RuntimeConfig | None = None,
    seed: int = 0,
    session_id: str | None = None,
) -> Session:
    """New session; emits the schema's welcome response if one is declared."""
    if bundle.fingerprint != schema_fingerprint(schema):
        raise BundleError("model bundle was trained against a different schema")
    config = config or RuntimeConfig()
    rng = np.random.default_rng([seed, 977])
    session = Session(
        session_id=session_id or uuid.uuid4().hex[:12],
        schema=schema,
        bundle=bundle,
        executor=executor or ApiExecutor(schema, rng=np.random.default_rng([seed, 1311])),
        config=config,
        rng=rng,
    )
    welcome = schema.nlg_for_act("welcome")
    if welcome is not None:
        text, _tagged = render_nlg(welcome, {}, session.rng)
        session.history.events.append(NlgCall(name=welcome.name, args={}))
        session.history.events.append(EndTurn())
        session.welcome_text = text
    return session


def _bindings_to_event_args(sig: ActionSignature, ctx, history: AnnotatedDialogue) -> dict[str, Binding]:
    mentions = ctx.mentions()
    args: dict[str, Binding] = {}
    for arg, pos in sig.bindings.items():
        if pos is None:
            continue
        if isinstance(pos, list):
            seen: dict[str, str] = {}
            for p in pos:
                m = mentions[p]
                if m.variable:
                    seen.setdefault(fold(m.value), m.variable)
            if seen:
                args[arg] = Binding(vars=list(seen.values()))
            else:
                args[arg] = Binding(lit=[mentions[p].value for p in pos])
        else:
            m = mentions[pos]
            args[arg] = Binding(var=m.variable) if m.variable else Binding(lit=m.value)
    return args


def execute_action(session: Session, sig: ActionSignature) -> tuple[object, str, bool]:
    """Run one predicted action. Returns (event, rendered text, success)."""
    schema = session.schema
    ctx = extract_features(session.history, len(session.history.events), schema,
                           window=session.bundle.train_config.window)
    values = resolve_signature_values(ctx, sig)
    event_args = _bindings_to_event_args(sig, ctx, session.history)
    action = schema.action(sig.action)
    if isinstance(action, ApiDef):
        result = session.executor.execute(action, values)
        success = result is not API_FAILURE
        return_var = None
        if success and action.return_type is not None and result is not None:
            return_var = session.new_var()
            session.history.variables[return_var] = Variable(action.return_type, str(result))
        event = ApiCall(name=action.name, args=event_args, return_var=return_var, success=success)
        session.history.events.append(event)
        return event, "", success
    if isinstance(action, NlgDef):
        try:
            text, _tagged = render_nlg(action, values, session.rng)
        except Exception:
            text = ""
        event = NlgCall(name=action.name, args=event_args)
        session.history.events.append(event)
        return event, text, True
    raise ValueError(f"unknown action {sig.action!r}")


def _emit_nlg(session: Session, nlg: NlgDef, values: dict | None = None) -> str:
    text, _tagged = render_nlg(nlg, values or {}, session.rng)
    session.history.events.append(NlgCall(name=nlg.name, args={}))
    return text


def handle_utterance(session: Session, text: str) -> TurnResult:
    """One full turn: NER, then the action loop until EndTurn/EndDialogue."""
    if session.status != "active":
        raise SessionEnded(f"session {session.session_id} has ended")
    schema = session.schema
    bundle = session.bundle
    cfg = session.config
    window = bundle.train_config.window

    ner_ctx = extract_features(session.history, len(session.history.events), schema, window=window)
    mentions = bundle.ner.tag(text, ner_ctx)
    annotations = []
    for m in mentions:
        var = session.new_var()
        session.history.variables[var] = Variable(m.entity_type, m.value)
        annotations.append(EntityAnnotation(start=m.span[0], end=m.span[1],
                                            entity_type=m.entity_type, variable=var))
    session.history.events.append(UserUtterance(text=text, annotations=annotations))

    result = TurnResult(executed=[], agent_text="", ended=False,
                        mentions=[{"start": m.span[0], "end": m.span[1],
                                   "entity_type": m.entity_type, "value": m.value}
                                  for m in mentions])
    texts: list[str] = []
    for _step in range(cfg.action_cap):
        ctx = extract_features(session.history, len(session.history.events), schema, window=window)
        dist = bundle.ap.predict(ctx)
        tau_high = bundle.train_config.tau_high
        tau_low = bundle.train_config.tau_low
        chosen = select_action(dist, tau_high, tau_low, session.rng, fallback=None)
        if chosen is None:
            bin_name = "low-fallback"
            fallback = schema.nlg_for_act("cannot_handle") or schema.nlg(cfg.fallback_nlg)
            if fallback is not None:
                texts.append(_emit_nlg(session, fallback))
                result.executed.append({"name": fallback.name, "args": {}, "return": None, "success": True})
            session.history.events.append(EndTurn())
            result.executed.append({"name": "EndTurn", "args": {}, "return": None, "success": True})
            result.steps.append(StepTrace(dist, bin_name, fallback.name if fallback else "EndTurn"))
            break
        bin_name = "high" if dist[chosen] >= tau_high else "medium"
        if chosen == "EndTurn":
            session.history.events.append(EndTurn())
            result.executed.append({"name": "EndTurn", "args": {}, "return": None, "success": True})
            result.steps.append(StepTrace(dist, bin_name, chosen))
            break
        if chosen == "EndDialogue":
            session.history.events.append(EndDialogue())
            result.executed.append({"name": "EndDialogue", "args": {}, "return": None, "success": True})
            result.steps.append(StepTrace(dist, bin_name, chosen))
            session.status = "ended"
            result.ended = True
            break
        pointer_scores: dict = {}
        sig = bundle.af.fill(ctx, chosen, schema, collect_scores=pointer_scores)
        if isinstance(sig, MissingArgument):
            request = schema.nlg_for_act("request", f"{sig.action}.{sig.arg}")
            result.diagnostics.append(f"missing argument {sig.action}.{sig.arg}")
            if request is not None:
                texts.append(_emit_nlg(session, request))
                result.executed.append({"name": request.name, "args": {}, "return": None, "success": True})
                result.steps.append(StepTrace(dist, bin_name, request.name))
            session.history.events.append(EndTurn())
            result.executed.append({"name": "EndTurn", "args": {}, "return": None, "success": True})
            break
        values = resolve_signature_values(ctx, sig)
        event, text_out, success = execute_action(session, sig)
        if text_out:
            texts.append(text_out)
        return_value = None
        if isinstance(event, ApiCall) and event.return_var:
            return_value = session.history.variables[event.return_var].value
        result.executed.append({"name": sig.action, "args": values,
                                "return": return_value, "success": success})
        result.steps.append(StepTrace(dist, bin_name, chosen, bindings=values,
                                      pointer_scores=pointer_scores or None))
    else:
        result.diagnostics.append(f"action cap {cfg.action_cap} reached; turn forced closed")
        session.history.events.append(EndTurn())
        result.executed.append({"name": "EndTurn", "args": {}, "return": None, "success": True})

    result.agent_text = " ".join(t for t in texts if t)
    return result
