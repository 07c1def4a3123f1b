"""Next-action prediction: context vector -> linear -> softmax over actions,
plus the confidence-binning selection rule used at serving time."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..context import DialogueContext
from ..encoder import ALL_BLOCKS, ContextEncoder, EncoderConfig
from ..nn import Linear, ParamStore, softmax, softmax_xent
from .vocab import Vocab


@dataclass
class ApConfig:
    encoder: EncoderConfig = field(default_factory=lambda: EncoderConfig(blocks=ALL_BLOCKS))
    tau_high: float = 0.7
    tau_low: float = 0.3


class ApModel:
    def __init__(self, vocab: Vocab, cfg: ApConfig, seed: int = 0):
        cfg.encoder.blocks = ALL_BLOCKS
        self.cfg = cfg
        self.vocab = vocab
        self.store = ParamStore(seed=seed)
        self.encoder = ContextEncoder(self.store, vocab, cfg.encoder, prefix="enc")
        self.out = Linear(self.store, "out", cfg.encoder.ctx_dim, len(vocab.actions))

    def loss_batch(self, contexts: list[DialogueContext], gold: np.ndarray,
                   packed: dict | None = None) -> float:
        batch = packed if packed is not None else self.encoder.encode_examples(contexts)
        ctx, _menc, cache = self.encoder.forward(batch)
        logits, ocache = self.out.forward(ctx)
        loss, dlogits, _ = softmax_xent(logits, gold)
        dctx = self.out.backward(ocache, dlogits)
        self.encoder.backward(cache, dctx, None)
        return loss

    def predict_batch(self, contexts: list[DialogueContext], packed: dict | None = None) -> np.ndarray:
        batch = packed if packed is not None else self.encoder.encode_examples(contexts)
        ctx, _menc, _cache = self.encoder.forward(batch)
        logits, _ = self.out.forward(ctx)
        return softmax(logits, axis=-1)

    def predict(self, context: DialogueContext) -> dict[str, float]:
        probs = self.predict_batch([context])[0]
        return {name: float(p) for name, p in zip(self.vocab.actions, probs)}


def select_action(
    dist: dict[str, float],
    tau_high: float = 0.7,
    tau_low: float = 0.3,
    rng: np.random.Generator | None = None,
    fallback: str | None = None,
) -> str | None:
    """Confidence binning: take the best high-confidence action; sample the
    medium bin proportionally when the high bin is empty; reject the rest."""
    if not 0.0 <= tau_low < tau_high <= 1.0:
        raise ValueError("need 0 <= tau_low < tau_high <= 1")
    names = list(dist)
    high = [n for n in names if dist[n] >= tau_high]
    if high:
        return max(high, key=lambda n: (dist[n], -names.index(n)))
    medium = [n for n in names if tau_low <= dist[n] < tau_high]
    if medium:
        weights = np.array([dist[n] for n in medium])
        weights = weights / weights.sum()
        rng = rng or np.random.default_rng(0)
        return medium[int(rng.choice(len(medium), p=weights))]
    return fallback
