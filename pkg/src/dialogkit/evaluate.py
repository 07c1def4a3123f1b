"""Turn-level evaluation of a model bundle against a gold corpus.

Every prediction is conditioned on the gold context: NER tags each user
utterance given the gold prefix; the agent action at every decision point is
predicted given the gold events before it (teacher forcing within the turn),
and argument filling runs on correctly predicted actions with gold mentions.
"""

from __future__ import annotations

import numpy as np

from .context import extract_features
from .dialogue import AnnotatedDialogue, ApiCall, EndDialogue, EndTurn, NlgCall, UserUtterance, turns
from .metrics import TurnEval, asp_accuracy, span_f1
from .models.argfill import MissingArgument, resolve_signature_values
from .models.bundle import ModelBundle


def _event_action_name(e) -> str | None:
    if isinstance(e, (ApiCall, NlgCall)):
        return e.name
    if isinstance(e, EndTurn):
        return "EndTurn"
    if isinstance(e, EndDialogue):
        return "EndDialogue"
    return None


def _gold_bindings(e, d: AnnotatedDialogue) -> dict | None:
    if not isinstance(e, (ApiCall, NlgCall)):
        return None
    return {arg: binding.resolve(d.variables) for arg, binding in e.args.items()}


def evaluate_ner(bundle: ModelBundle, corpus: list[AnnotatedDialogue],
                 utterance_filter=None, entity_type: str | None = None):
    """Aggregate span F1 over user utterances.

    ``utterance_filter(dialogue, event_index, event)`` selects utterances;
    ``entity_type`` restricts scoring to spans of one type (slot-level F1).
    """
    gold_all: list[tuple] = []
    pred_all: list[tuple] = []
    n_utts = 0
    for di, d in enumerate(corpus):
        for i, e in enumerate(d.events):
            if not isinstance(e, UserUtterance) or not e.text:
                continue
            if utterance_filter is not None and not utterance_filter(d, i, e):
                continue
            n_utts += 1
            ctx = extract_features(d, i, bundle.schema, window=bundle.train_config.window)
            pred = bundle.ner.tag(e.text, ctx)
            for m in pred:
                if entity_type is None or m.entity_type == entity_type:
                    pred_all.append((di, i, m.span[0], m.span[1], m.entity_type))
            for ann in e.annotations:
                if entity_type is None or ann.entity_type == entity_type:
                    gold_all.append((di, i, ann.start, ann.end, ann.entity_type))
    precision, recall, f1 = span_f1(gold_all, pred_all)
    return {"precision": precision, "recall": recall, "f1": f1,
            "utterances": n_utts, "gold_spans": len(gold_all), "pred_spans": len(pred_all)}


def build_turn_evals(bundle: ModelBundle, corpus: list[AnnotatedDialogue],
                     batch_size: int = 64) -> list[TurnEval]:
    window = bundle.train_config.window
    schema = bundle.schema
    # collect every agent decision point with its gold
    points = []  # (dialogue idx, turn idx, event idx, gold action, event)
    for di, d in enumerate(corpus):
        for turn in turns(d):
            if turn.user is None:
                continue
            for j, e in zip(turn.agent_indices, turn.agent_events):
                name = _event_action_name(e)
                if name is None:
                    continue
                points.append((di, turn.index, j, name, e))

    contexts = [extract_features(corpus[di], j, schema, window=window)
                for di, _t, j, _n, _e in points]
    pred_ids = np.zeros(len(points), dtype=np.int64)
    for lo in range(0, len(points), batch_size):
        chunk = contexts[lo : lo + batch_size]
        probs = bundle.ap.predict_batch(chunk)
        pred_ids[lo : lo + len(chunk)] = probs.argmax(axis=1)
    action_names = bundle.vocab.actions

    evals: dict[tuple[int, int], TurnEval] = {}
    for k, (di, ti, j, gold_name, e) in enumerate(points):
        ev = evals.get((di, ti))
        if ev is None:
            ev = evals[(di, ti)] = TurnEval(di, ti, [], [], [], [])
        pred_name = action_names[pred_ids[k]]
        ev.gold_actions.append(gold_name)
        ev.pred_actions.append(pred_name)
        gold_b = _gold_bindings(e, corpus[di])
        ev.gold_bindings.append(gold_b)
        if pred_name != gold_name or gold_b is None:
            ev.pred_bindings.append(None if gold_b is not None else None)
            continue
        sig = bundle.af.fill(contexts[k], pred_name, schema)
        if isinstance(sig, MissingArgument):
            ev.pred_bindings.append({})
            continue
        ev.pred_bindings.append(resolve_signature_values(contexts[k], sig))
    return [evals[k] for k in sorted(evals)]


def evaluate_bundle(bundle: ModelBundle, corpus: list[AnnotatedDialogue]) -> dict:
    ner = evaluate_ner(bundle, corpus)
    evals = build_turn_evals(bundle, corpus)
    ap, asp = asp_accuracy(evals)
    return {
        "ner": ner,
        "ap_accuracy": ap,
        "asp_accuracy": asp,
        "turns": len(evals),
        "dialogues": len(corpus),
    }
