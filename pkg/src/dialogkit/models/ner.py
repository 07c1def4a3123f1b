"""Entity recognizer: context-conditioned BiLSTM-CRF with catalogue features.

Per-token input is [word embedding; static+dynamic catalogue indicators;
encoded dialogue context]. BIO tags over the schema's entity types; decoding
masks structurally invalid transitions so spans are always well formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..context import DialogueContext, EntityMention
from ..encoder import ContextEncoder, EncoderConfig
from ..nn import BiLstm, CrfLayer, Linear, ParamStore, crf_viterbi
from ..nn.crf import NEG_INF, crf_nll_batch
from ..schema import DomainSchema
from ..tokenizer import span_surface, tokenize
from .features import catalogue_features, static_catalog_index
from .vocab import Vocab

NER_BLOCKS = ("past_utts", "past_acts", "past_ents")


@dataclass
class NerConfig:
    encoder: EncoderConfig = field(default_factory=lambda: EncoderConfig(blocks=NER_BLOCKS))
    tagger_hidden: int = 64
    window_n: int = 3
    fuzzy_threshold: float = 0.8
    use_dynamic: bool = True


def tag_names(types: list[str]) -> list[str]:
    out = ["O"]
    for t in types:
        out += [f"B-{t}", f"I-{t}"]
    return out


class NerModel:
    def __init__(self, vocab: Vocab, schema: DomainSchema, cfg: NerConfig, seed: int = 0):
        cfg.encoder.blocks = NER_BLOCKS
        self.cfg = cfg
        self.vocab = vocab
        self.store = ParamStore(seed=seed)
        self.encoder = ContextEncoder(self.store, vocab, cfg.encoder, prefix="enc")
        self.types = list(vocab.types)
        self.tags = tag_names(self.types)
        self.T = len(self.tags)
        self.static_index = static_catalog_index(schema)
        self.K = 2 * len(self.static_index)
        d_in = cfg.encoder.emb_dim + self.K + cfg.encoder.ctx_dim
        self.bilstm = BiLstm(self.store, "tagger", d_in, cfg.tagger_hidden)
        self.out = Linear(self.store, "emit", 2 * cfg.tagger_hidden, self.T)
        self.crf = CrfLayer(self.store, "crf", self.T)
        self._build_decode_masks()

    def _build_decode_masks(self) -> None:
        T = self.T
        self.start_mask = np.zeros(T)
        self.trans_mask = np.zeros((T, T))
        for i, t in enumerate(self.types):
            i_tag = 2 + 2 * i
            b_tag = 1 + 2 * i
            self.start_mask[i_tag] = NEG_INF
            for s in range(T):
                if s not in (b_tag, i_tag):
                    self.trans_mask[s, i_tag] = NEG_INF

    # ----------------------------------------------------------------- data

    def features_for(self, tokens: list[str], context: DialogueContext) -> np.ndarray:
        dynamic = context.dynamic_catalogs() if self.cfg.use_dynamic else {}
        return catalogue_features(
            tokens, self.static_index, dynamic,
            window=self.cfg.window_n, fuzzy_threshold=self.cfg.fuzzy_threshold,
            type_order=[name for name, _ in self.static_index],
        )

    def gold_tags(self, tokens: list[str], annotations) -> np.ndarray:
        tags = np.zeros(len(tokens), dtype=np.int64)
        for ann in annotations:
            b = 1 + 2 * self.types.index(ann.entity_type)
            tags[ann.start] = b
            tags[ann.start + 1 : ann.end] = b + 1
        return tags

    # -------------------------------------------------------------- training

    def loss_batch(self, examples: list[dict]) -> float:
        """Examples share one utterance length. Accumulates gradients."""
        B = len(examples)
        L = len(examples[0]["tokens"])
        ids = np.zeros((B, L), dtype=np.int64)
        feats = np.zeros((B, L, self.K))
        tags = np.zeros((B, L), dtype=np.int64)
        for i, ex in enumerate(examples):
            ids[i] = [self.vocab.token_id(t) for t in ex["tokens"]]
            feats[i] = ex["feats"]
            tags[i] = ex["tags"]
        ctx, _menc, enc_cache = self.encoder.forward(self._ctx_batch(examples))
        emissions, caches = self._emissions(ids, feats, ctx, L)
        loss, dem = crf_nll_batch(self.crf, emissions, tags)
        self._emissions_backward(dem, caches, enc_cache)
        return loss

    def _ctx_batch(self, examples: list[dict]):
        return self.encoder.encode_examples([ex["context"] for ex in examples])

    def _emissions(self, ids: np.ndarray, feats: np.ndarray, ctx: np.ndarray, L: int):
        vecs, ecache = self.encoder.word_emb.forward(ids)
        ctx_tiled = np.repeat(ctx[:, None, :], L, axis=1)
        x = np.concatenate([vecs, feats, ctx_tiled], axis=2)
        hs, _finals, bcache = self.bilstm.forward(x)
        emissions, ocache = self.out.forward(hs)
        return emissions, (ecache, bcache, ocache, L)

    def _emissions_backward(self, dem: np.ndarray, caches, enc_cache) -> None:
        ecache, bcache, ocache, L = caches
        dhs = self.out.backward(ocache, dem)
        dx = self.bilstm.backward(bcache, dhs)
        e = self.cfg.encoder.emb_dim
        self.encoder.word_emb.backward(ecache, dx[:, :, :e])
        dctx = dx[:, :, e + self.K :].sum(axis=1)
        self.encoder.backward(enc_cache, dctx, None)

    # -------------------------------------------------------------- decoding

    def tag(self, text_or_tokens, context: DialogueContext) -> list[EntityMention]:
        """BIO-decode one utterance into user-sourced entity mentions."""
        if isinstance(text_or_tokens, str):
            text = text_or_tokens
            tokens = tokenize(text)
        else:
            text = " ".join(text_or_tokens)
            tokens = list(text_or_tokens)
        if not tokens:
            return []
        ids = np.array([[self.vocab.token_id(t) for t in tokens]])
        feats = self.features_for(tokens, context)[None]
        ctx, _menc, _cache = self.encoder.forward(self.encoder.encode_examples([context]))
        emissions, _caches = self._emissions(ids, feats, ctx, len(tokens))
        path, _score = crf_viterbi(self.crf, emissions[0],
                                   trans_mask=self.trans_mask, start_mask=self.start_mask)
        mentions = []
        i = 0
        while i < len(path):
            tag = self.tags[path[i]]
            if tag.startswith("B-"):
                etype = tag[2:]
                j = i + 1
                while j < len(path) and self.tags[path[j]] == f"I-{etype}":
                    j += 1
                mentions.append(EntityMention(
                    value=span_surface(text, i, j) if isinstance(text_or_tokens, str)
                    else " ".join(tokens[i:j]),
                    entity_type=etype,
                    source="user",
                    turn_index=context.current_turn_index,
                    position=-1,
                    variable=None,
                ))
                mentions[-1].span = (i, j)  # type: ignore[attr-defined]
                i = j
            else:
                i += 1
        return mentions
