"""Argument filling: a pointer over entity mentions in the dialogue context.

Each mention is scored against the (action, argument) pair through a bilinear
form; mentions whose entity type differs from the argument's are masked out.
A reserved optional token closes the candidate list: optional arguments point
at it to stay unfilled, and multi-valued arguments select every mention that
outscores it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..context import DialogueContext
from ..encoder import ContextEncoder, EncoderConfig
from ..nn import Embedding, ParamStore, softmax
from ..schema import DomainSchema
from .vocab import Vocab

UNFILLED = None
MASK = -1e30


@dataclass
class MissingArgument:
    """A required argument with zero type-compatible mentions; the runtime
    turns this into a slot request."""

    action: str
    arg: str


MISSING_ARGUMENT = MissingArgument  # legacy alias for isinstance checks


@dataclass
class ActionSignature:
    action: str
    bindings: dict[str, object] = field(default_factory=dict)  # arg -> position | [positions] | None


def resolve_signature_values(context: DialogueContext, sig: "ActionSignature") -> dict:
    """Positions -> surface values. Multi-valued selections deduplicate by
    case-folded value (several mentions of one entity are one argument value)."""
    from ..tokenizer import fold

    mentions = context.mentions()
    out: dict[str, object] = {}
    for arg, pos in sig.bindings.items():
        if pos is None:
            out[arg] = None
        elif isinstance(pos, list):
            seen: dict[str, str] = {}
            for p in pos:
                value = mentions[p].value
                seen.setdefault(fold(value), value)
            out[arg] = list(seen.values())
        else:
            out[arg] = mentions[pos].value
    return out


@dataclass
class AfConfig:
    encoder: EncoderConfig = field(default_factory=lambda: EncoderConfig(blocks=()))
    action_dim: int = 16
    arg_dim: int = 16


class AfModel:
    def __init__(self, vocab: Vocab, cfg: AfConfig, seed: int = 0):
        cfg.encoder.blocks = ()
        self.cfg = cfg
        self.vocab = vocab
        self.store = ParamStore(seed=seed)
        self.encoder = ContextEncoder(self.store, vocab, cfg.encoder, prefix="enc")
        dm = cfg.encoder.mention_dim
        q = cfg.action_dim + cfg.arg_dim
        self.action_emb = Embedding(self.store, "action_emb", len(vocab.actions), cfg.action_dim)
        self.arg_emb = Embedding(self.store, "arg_emb", max(len(vocab.args), 1), cfg.arg_dim)
        self.W = self.store.add("pointer.W", (q, dm))
        self.optional_vec = self.store.add("optional_token", (dm,))

    # --------------------------------------------------------------- scoring

    def _mention_matrix(self, batch: dict, menc: np.ndarray):
        """Append the optional token after each row's last real mention."""
        B, M, dm = menc.shape
        full = np.zeros((B, M + 1, dm))
        full[:, :M, :] = menc
        n = batch["n_mentions"]
        full[np.arange(B), n, :] = self.optional_vec.value
        mask = np.zeros((B, M + 1))
        mask[:, :M] = batch["men_mask"]
        mask[np.arange(B), n] = 1.0
        return full, mask

    def scores(self, batch: dict, menc: np.ndarray, action_ids: np.ndarray, arg_ids: np.ndarray):
        full, mask = self._mention_matrix(batch, menc)
        a_vec, a_cache = self.action_emb.forward(action_ids)
        r_vec, r_cache = self.arg_emb.forward(arg_ids)
        q = np.concatenate([a_vec, r_vec], axis=1)  # [B, q]
        proj = q @ self.W.value  # [B, dm]
        scores = np.einsum("bmd,bd->bm", full, proj)
        cache = (full, mask, q, proj, a_cache, r_cache, batch, menc.shape)
        return scores, mask, cache

    def scores_backward(self, cache, dscores: np.ndarray):
        full, mask, q, proj, a_cache, r_cache, batch, menc_shape = cache
        B, M, dm = menc_shape
        dfull = dscores[:, :, None] * proj[:, None, :]
        dproj = np.einsum("bmd,bm->bd", full, dscores)
        self.W.grad += q.T @ dproj
        dq = dproj @ self.W.value.T
        self.action_emb.backward(a_cache, dq[:, : self.cfg.action_dim])
        self.arg_emb.backward(r_cache, dq[:, self.cfg.action_dim :])
        n = batch["n_mentions"]
        self.optional_vec.grad += dfull[np.arange(B), n, :].sum(axis=0)
        dmenc = dfull[:, :M, :] * batch["men_mask"][:, :, None]
        return dmenc

    # -------------------------------------------------------------- training

    def loss_batch(self, contexts, action_ids, arg_ids, gold_positions,
                   type_masks, packed: dict | None = None) -> float:
        """Mean over examples of the mean NLL of each gold pointer position.

        ``type_masks`` is [B, M+1] with 1 where a position is a legal
        candidate (type-compatible mention or the optional token).
        """
        batch = packed if packed is not None else self.encoder.encode_examples(contexts)
        _ctx, menc, enc_cache = self.encoder.forward(batch)
        scores, mask, cache = self.scores(batch, menc, action_ids, arg_ids)
        allowed = mask * type_masks
        masked = np.where(allowed > 0, scores, MASK)
        probs = softmax(masked, axis=1)
        B = scores.shape[0]
        loss = 0.0
        dscores = np.zeros_like(scores)
        for i, golds in enumerate(gold_positions):
            p = probs[i]
            target = np.zeros_like(p)
            target[golds] = 1.0 / len(golds)
            loss -= float(np.sum(target * np.log(np.maximum(p, 1e-300))))
            dscores[i] = (p - target) / B
        dscores *= (allowed > 0)
        loss /= B
        dmenc = self.scores_backward(cache, dscores)
        self.encoder.backward(enc_cache, None, dmenc)
        return loss

    # -------------------------------------------------------------- decoding

    def type_mask(self, context: DialogueContext, entity_type: str, M: int) -> np.ndarray:
        mask = np.zeros(M + 1)
        for m in context.mentions():
            if m.entity_type == entity_type:
                mask[m.position] = 1.0
        mask[len(context.mentions())] = 1.0  # optional token always scoreable
        return mask

    def fill(self, context: DialogueContext, action_name: str,
             schema: DomainSchema, collect_scores: dict | None = None) -> "ActionSignature | MissingArgument":
        """Point every argument of the action at a mention (or leave optional
        arguments unfilled). Returns MissingArgument when a required argument
        has no type-compatible mention. ``collect_scores`` (arg -> ranked
        (label, score) list) fills a debug view of the pointer."""
        action = schema.action(action_name)
        if action is None:
            raise ValueError(f"unknown action {action_name!r}")
        if not action.args:
            return ActionSignature(action=action_name, bindings={})
        batch = self.encoder.encode_examples([context])
        _ctx, menc, _cache = self.encoder.forward(batch)
        M = menc.shape[1]
        n_mentions = len(context.mentions())
        sig = ActionSignature(action=action_name, bindings={})
        for arg in action.args:
            arg_key = f"{action_name}.{arg.name}"
            action_ids = np.array([self.vocab.action_id(action_name)])
            arg_ids = np.array([self.vocab.arg_id(arg_key)])
            scores, mask, _sc = self.scores(batch, menc, action_ids, arg_ids)
            allowed = self.type_mask(context, arg.entity_type, M)
            allowed[:n_mentions] *= mask[0, :n_mentions]
            s = np.where(allowed > 0, scores[0], MASK)
            optional_pos = n_mentions
            optional_score = s[optional_pos]
            real = [p for p in range(n_mentions) if allowed[p] > 0]
            if collect_scores is not None:
                ranked = sorted(real, key=lambda p: -s[p])[:3]
                view = [(context.mentions()[p].value, float(s[p])) for p in ranked]
                view.append(("<optional>", float(optional_score)))
                collect_scores[arg.name] = view
            if arg.required:
                if not real:
                    return MissingArgument(action=action_name, arg=arg.name)
                if arg.multi_valued:
                    chosen = [p for p in real if s[p] > optional_score]
                    if not chosen:
                        chosen = [max(real, key=lambda p: s[p])]
                    sig.bindings[arg.name] = chosen
                else:
                    sig.bindings[arg.name] = max(real, key=lambda p: s[p])
            else:
                if arg.multi_valued:
                    chosen = [p for p in real if s[p] > optional_score]
                    sig.bindings[arg.name] = chosen if chosen else UNFILLED
                else:
                    best = max(real + [optional_pos], key=lambda p: s[p])
                    sig.bindings[arg.name] = UNFILLED if best == optional_pos else best
        return sig
