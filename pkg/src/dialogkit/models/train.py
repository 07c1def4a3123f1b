"""Supervised training of the three models from a simulated corpus.

NER trains with CRF negative log-likelihood on user utterances; action
prediction with cross-entropy over the next agent event at every decision
point (EndTurn/EndDialogue included); argument filling with cross-entropy
over gold pointer positions (the mention bound to each argument, or the
optional token for unbound optional arguments).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..context import extract_features
from ..dialogue import AnnotatedDialogue, ApiCall, EndDialogue, EndTurn, NlgCall, UserUtterance, turns
from ..encoder import EncoderConfig
from ..nn import AdamConfig, optimizer_step
from ..schema import DomainSchema
from ..tokenizer import fold, tokenize
from .action import ApConfig, ApModel
from .argfill import AfConfig, AfModel
from .ner import NerConfig, NerModel
from .vocab import Vocab, build_vocab


@dataclass
class TrainConfig:
    seed: int = 0
    emb_dim: int = 32
    hidden: int = 64
    tagger_hidden: int = 64
    action_dim: int = 16
    arg_dim: int = 16
    window: int = 8
    epochs: int = 3
    batch_size: int = 64
    lr: float = 3e-3
    clip_norm: float = 5.0
    holdout_fraction: float = 0.05
    max_examples_per_epoch: int = 0  # 0 = use everything
    use_dynamic_catalogs: bool = True
    tau_high: float = 0.7
    tau_low: float = 0.3

    def encoder_config(self, blocks=None) -> EncoderConfig:
        cfg = EncoderConfig(emb_dim=self.emb_dim, hidden=self.hidden,
                            action_dim=self.action_dim, window=self.window)
        if blocks is not None:
            cfg.blocks = tuple(blocks)
        return cfg

    def to_dict(self) -> dict:
        from dataclasses import asdict

        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        return cls(**{k: v for k, v in doc.items() if k in cls.__dataclass_fields__})


# ------------------------------------------------------------------ examples


def ner_examples(d: AnnotatedDialogue, schema: DomainSchema, model: NerModel,
                 window: int) -> list[dict]:
    out = []
    for i, e in enumerate(d.events):
        if not isinstance(e, UserUtterance) or not e.text:
            continue
        ctx = extract_features(d, i, schema, window=window)
        tokens = tokenize(e.text)
        out.append({
            "context": ctx,
            "tokens": [fold(t) for t in tokens],
            "feats": model.features_for(tokens, ctx),
            "tags": model.gold_tags(tokens, e.annotations),
        })
    return out


def ap_examples(d: AnnotatedDialogue, schema: DomainSchema, vocab: Vocab,
                window: int) -> list[dict]:
    out = []
    for turn in turns(d):
        if turn.user is None:
            continue  # the scripted welcome turn is never predicted
        for j, e in zip(turn.agent_indices, turn.agent_events):
            if isinstance(e, (ApiCall, NlgCall)):
                name = e.name
            elif isinstance(e, EndTurn):
                name = "EndTurn"
            elif isinstance(e, EndDialogue):
                name = "EndDialogue"
            else:
                continue
            out.append({
                "context": extract_features(d, j, schema, window=window),
                "gold": vocab.action_id(name),
            })
    return out


def af_examples(d: AnnotatedDialogue, schema: DomainSchema, vocab: Vocab,
                window: int) -> list[dict]:
    out = []
    for turn in turns(d):
        if turn.user is None:
            continue
        for j, e in zip(turn.agent_indices, turn.agent_events):
            if not isinstance(e, (ApiCall, NlgCall)):
                continue
            action = schema.action(e.name)
            if action is None or not action.args:
                continue
            ctx = extract_features(d, j, schema, window=window)
            mentions = ctx.mentions()
            by_var: dict[str, list[int]] = {}
            by_value: dict[tuple[str, str], list[int]] = {}
            for m in mentions:
                if m.variable:
                    by_var.setdefault(m.variable, []).append(m.position)
                by_value.setdefault((m.entity_type, fold(m.value)), []).append(m.position)
            optional_pos = ctx.optional_position()
            for arg in action.args:
                binding = e.args.get(arg.name)
                golds: list[int] = []
                if binding is None:
                    if arg.required:
                        continue
                    golds = [optional_pos]
                else:
                    for v in binding.referenced():
                        golds.extend(by_var.get(v, []))
                        var = d.variables.get(v)
                        if var is not None:
                            golds.extend(by_value.get((var.entity_type, fold(str(var.value))), []))
                    if binding.lit is not None:
                        items = binding.lit if isinstance(binding.lit, (list, tuple)) else [binding.lit]
                        for item in items:
                            golds.extend(by_value.get((arg.entity_type, fold(str(item))), []))
                    golds = sorted(set(golds))
                    if not golds:
                        continue
                out.append({
                    "context": ctx,
                    "action_id": vocab.action_id(e.name),
                    "arg_id": vocab.arg_id(f"{e.name}.{arg.name}"),
                    "entity_type": arg.entity_type,
                    "golds": golds,
                })
    return out


# ------------------------------------------------------------------ training


def _epoch_order(n: int, cap: int, rng: np.random.Generator) -> np.ndarray:
    order = rng.permutation(n)
    if cap and n > cap:
        order = order[:cap]
    return order


def _train_ner(model: NerModel, examples: list[dict], heldout: list[dict],
               cfg: TrainConfig, report: dict) -> None:
    adam = AdamConfig(lr=cfg.lr, clip_norm=cfg.clip_norm)
    rng = np.random.default_rng([cfg.seed, 101])
    buckets: dict[int, list[int]] = {}
    for i, ex in enumerate(examples):
        buckets.setdefault(len(ex["tokens"]), []).append(i)
    for epoch in range(cfg.epochs):
        order = _epoch_order(len(examples), cfg.max_examples_per_epoch, rng)
        chosen = set(order.tolist())
        losses = []
        for length in sorted(buckets):
            idx = [i for i in buckets[length] if i in chosen]
            for lo in range(0, len(idx), cfg.batch_size):
                batch = [examples[i] for i in idx[lo : lo + cfg.batch_size]]
                losses.append(model.loss_batch(batch))
                optimizer_step(model.store, adam)
        entry = {"epoch": epoch, "loss": float(np.mean(losses)) if losses else 0.0}
        if heldout:
            entry["heldout_f1"] = _ner_heldout_f1(model, heldout)
        report.setdefault("ner", []).append(entry)


def _ner_heldout_f1(model: NerModel, heldout: list[dict]) -> float:
    tp_like = []
    for ex in heldout[:200]:
        pred = model.tag(ex["tokens"], ex["context"])
        pred_spans = [(m.span[0], m.span[1], m.entity_type) for m in pred]
        gold_spans = []
        tags = ex["tags"]
        i = 0
        while i < len(tags):
            if tags[i] > 0 and (tags[i] - 1) % 2 == 0:
                t = model.types[(tags[i] - 1) // 2]
                j = i + 1
                while j < len(tags) and tags[j] == tags[i] + 1:
                    j += 1
                gold_spans.append((i, j, t))
                i = j
            else:
                i += 1
        tp_like.append((gold_spans, pred_spans))
    agg_gold = sum(len(g) for g, _ in tp_like)
    agg_pred = sum(len(p) for _, p in tp_like)
    agg_tp = sum(len(set(g) & set(p)) for g, p in tp_like)
    precision = agg_tp / agg_pred if agg_pred else 0.0
    recall = agg_tp / agg_gold if agg_gold else 0.0
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def _train_ap(model: ApModel, examples: list[dict], heldout: list[dict],
              cfg: TrainConfig, report: dict) -> None:
    adam = AdamConfig(lr=cfg.lr, clip_norm=cfg.clip_norm)
    rng = np.random.default_rng([cfg.seed, 202])
    for epoch in range(cfg.epochs):
        order = _epoch_order(len(examples), cfg.max_examples_per_epoch, rng)
        losses = []
        for lo in range(0, len(order), cfg.batch_size):
            batch = [examples[i] for i in order[lo : lo + cfg.batch_size]]
            gold = np.array([ex["gold"] for ex in batch])
            losses.append(model.loss_batch([ex["context"] for ex in batch], gold))
            optimizer_step(model.store, adam)
        entry = {"epoch": epoch, "loss": float(np.mean(losses)) if losses else 0.0}
        if heldout:
            sample = heldout[:300]
            probs = model.predict_batch([ex["context"] for ex in sample])
            pred = probs.argmax(axis=1)
            entry["heldout_acc"] = float(np.mean(pred == np.array([ex["gold"] for ex in sample])))
        report.setdefault("ap", []).append(entry)


def _train_af(model: AfModel, examples: list[dict], heldout: list[dict],
              cfg: TrainConfig, report: dict) -> None:
    adam = AdamConfig(lr=cfg.lr, clip_norm=cfg.clip_norm)
    rng = np.random.default_rng([cfg.seed, 303])
    for epoch in range(cfg.epochs):
        order = _epoch_order(len(examples), cfg.max_examples_per_epoch, rng)
        losses = []
        for lo in range(0, len(order), cfg.batch_size):
            batch = [examples[i] for i in order[lo : lo + cfg.batch_size]]
            contexts = [ex["context"] for ex in batch]
            packed = model.encoder.encode_examples(contexts)
            M = packed["men_ids"].shape[1]
            type_masks = np.zeros((len(batch), M + 1))
            for i, ex in enumerate(batch):
                type_masks[i] = model.type_mask(ex["context"], ex["entity_type"], M)
            action_ids = np.array([ex["action_id"] for ex in batch])
            arg_ids = np.array([ex["arg_id"] for ex in batch])
            golds = [ex["golds"] for ex in batch]
            losses.append(model.loss_batch(contexts, action_ids, arg_ids, golds,
                                           type_masks, packed=packed))
            optimizer_step(model.store, adam)
        entry = {"epoch": epoch, "loss": float(np.mean(losses)) if losses else 0.0}
        if heldout:
            entry["heldout_acc"] = _af_heldout_acc(model, heldout[:300])
        report.setdefault("af", []).append(entry)


def _af_heldout_acc(model: AfModel, heldout: list[dict]) -> float:
    if not heldout:
        return 0.0
    correct = 0
    for ex in heldout:
        ctx = ex["context"]
        batch = model.encoder.encode_examples([ctx])
        _c, menc, _cache = model.encoder.forward(batch)
        M = menc.shape[1]
        scores, mask, _sc = model.scores(
            batch, menc, np.array([ex["action_id"]]), np.array([ex["arg_id"]]))
        allowed = model.type_mask(ctx, ex["entity_type"], M)
        allowed[: len(ctx.mentions())] *= mask[0, : len(ctx.mentions())]
        s = np.where(allowed > 0, scores[0], -1e30)
        correct += int(int(np.argmax(s)) in ex["golds"])
    return correct / len(heldout)


def train_models(
    corpus: list[AnnotatedDialogue],
    schema: DomainSchema,
    cfg: TrainConfig,
    vocab: Vocab | None = None,
):
    """Train NER, AP and AF on a corpus. Returns (bundle, report)."""
    from .bundle import ModelBundle

    if not corpus:
        raise ValueError("training corpus is empty")
    vocab = vocab or build_vocab(schema, [corpus])

    n_hold = int(len(corpus) * cfg.holdout_fraction)
    train_dialogues = corpus[: len(corpus) - n_hold] if n_hold else corpus
    hold_dialogues = corpus[len(corpus) - n_hold :] if n_hold else []

    ner = NerModel(vocab, schema,
                   NerConfig(encoder=cfg.encoder_config(), tagger_hidden=cfg.tagger_hidden,
                             use_dynamic=cfg.use_dynamic_catalogs),
                   seed=cfg.seed)
    ap = ApModel(vocab, ApConfig(encoder=cfg.encoder_config(), tau_high=cfg.tau_high,
                                 tau_low=cfg.tau_low), seed=cfg.seed + 1)
    af = AfModel(vocab, AfConfig(encoder=cfg.encoder_config(blocks=()),
                                 action_dim=cfg.action_dim, arg_dim=cfg.arg_dim),
                 seed=cfg.seed + 2)

    report: dict = {"examples": {}}
    ner_train, ner_hold, ap_train, ap_hold, af_train, af_hold = [], [], [], [], [], []
    for d in train_dialogues:
        ner_train.extend(ner_examples(d, schema, ner, cfg.window))
        ap_train.extend(ap_examples(d, schema, vocab, cfg.window))
        af_train.extend(af_examples(d, schema, vocab, cfg.window))
    for d in hold_dialogues:
        ner_hold.extend(ner_examples(d, schema, ner, cfg.window))
        ap_hold.extend(ap_examples(d, schema, vocab, cfg.window))
        af_hold.extend(af_examples(d, schema, vocab, cfg.window))
    report["examples"] = {
        "ner": len(ner_train), "ap": len(ap_train), "af": len(af_train),
        "heldout_dialogues": len(hold_dialogues),
    }

    _train_ner(ner, ner_train, ner_hold, cfg, report)
    _train_ap(ap, ap_train, ap_hold, cfg, report)
    _train_af(af, af_train, af_hold, cfg, report)

    bundle = ModelBundle(schema=schema, vocab=vocab, ner=ner, ap=ap, af=af,
                         train_config=cfg)
    return bundle, report
