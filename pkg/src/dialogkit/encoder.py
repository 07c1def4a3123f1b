"""Neural dialogue-context encoder.

Turn-level features go through a word LSTM, dialogue-level features through a
hierarchical LSTM (inner word LSTM per past utterance, outer LSTM over
turns); past actions through an LSTM over action embeddings. Entity mentions
are encoded as [mean value-word embedding; type; source; turn-recency]
embeddings. The context vector concatenates the configured feature blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from typing import TYPE_CHECKING

from .context import DialogueContext
from .nn import Embedding, Lstm, ParamStore
from .nn.layers import mean_pool, mean_pool_backward
from .tokenizer import tokenize

if TYPE_CHECKING:
    from .models.vocab import Vocab

ALL_BLOCKS = ("cur_utt", "cur_ents", "past_utts", "past_acts", "past_ents")


@dataclass
class EncoderConfig:
    emb_dim: int = 32
    hidden: int = 64
    type_dim: int = 8
    source_dim: int = 4
    recency_dim: int = 4
    action_dim: int = 16
    window: int = 8
    max_actions: int = 16
    blocks: tuple[str, ...] = ALL_BLOCKS

    @property
    def mention_dim(self) -> int:
        return self.emb_dim + self.type_dim + self.source_dim + self.recency_dim

    @property
    def ctx_dim(self) -> int:
        dims = {
            "cur_utt": self.hidden,
            "cur_ents": self.mention_dim,
            "past_utts": self.hidden,
            "past_acts": self.hidden,
            "past_ents": self.mention_dim,
        }
        return sum(dims[b] for b in self.blocks)


class ContextEncoder:
    def __init__(self, store: ParamStore, vocab: "Vocab", cfg: EncoderConfig, prefix: str = "enc"):
        self.cfg = cfg
        self.vocab = vocab
        self.word_emb = Embedding(store, f"{prefix}.word_emb", vocab.token_rows(), cfg.emb_dim)
        self.type_emb = Embedding(store, f"{prefix}.type_emb", max(len(vocab.types), 1), cfg.type_dim)
        self.source_emb = Embedding(store, f"{prefix}.source_emb", len(vocab.sources), cfg.source_dim)
        self.recency_emb = Embedding(store, f"{prefix}.recency_emb", vocab.recency_buckets, cfg.recency_dim)
        if "cur_utt" in cfg.blocks:
            self.lstm_cur = Lstm(store, f"{prefix}.lstm_cur", cfg.emb_dim, cfg.hidden)
        if "past_utts" in cfg.blocks:
            self.lstm_inner = Lstm(store, f"{prefix}.lstm_inner", cfg.emb_dim, cfg.hidden)
            self.lstm_outer = Lstm(store, f"{prefix}.lstm_outer", cfg.hidden, cfg.hidden)
        if "past_acts" in cfg.blocks:
            self.action_emb = Embedding(store, f"{prefix}.action_emb", len(vocab.actions), cfg.action_dim)
            self.lstm_act = Lstm(store, f"{prefix}.lstm_act", cfg.action_dim, cfg.hidden)

    # ------------------------------------------------------------------ data

    def encode_examples(self, contexts: list[DialogueContext]) -> dict:
        """Pack contexts into padded id/mask arrays (cacheable across epochs)."""
        cfg = self.cfg
        v = self.vocab
        B = len(contexts)
        Lu = max([len(c.current_user_utterance) for c in contexts] + [1])
        W = max([min(len(c.past_user_utterances), cfg.window) for c in contexts] + [1])
        Lp = 1
        for c in contexts:
            for utt in c.past_user_utterances[-cfg.window:]:
                Lp = max(Lp, len(utt))
        A = max([min(len(c.past_actions), cfg.max_actions) for c in contexts] + [1])
        M = max([len(c.mentions()) for c in contexts] + [1])
        S = 1
        for c in contexts:
            for m in c.mentions():
                S = max(S, len(tokenize(m.value)))

        b = {
            "cur_ids": np.zeros((B, Lu), dtype=np.int64),
            "cur_mask": np.zeros((B, Lu)),
            "past_ids": np.zeros((B, W, Lp), dtype=np.int64),
            "past_mask": np.zeros((B, W, Lp)),
            "turn_mask": np.zeros((B, W)),
            "act_ids": np.zeros((B, A), dtype=np.int64),
            "act_mask": np.zeros((B, A)),
            "men_ids": np.zeros((B, M, S), dtype=np.int64),
            "men_tok_mask": np.zeros((B, M, S)),
            "men_type": np.zeros((B, M), dtype=np.int64),
            "men_source": np.zeros((B, M), dtype=np.int64),
            "men_recency": np.zeros((B, M), dtype=np.int64),
            "men_mask": np.zeros((B, M)),
            "men_current": np.zeros((B, M)),
            "n_mentions": np.zeros(B, dtype=np.int64),
        }
        for i, c in enumerate(contexts):
            toks = c.current_user_utterance[:Lu]
            for j, t in enumerate(toks):
                b["cur_ids"][i, j] = v.token_id(t)
                b["cur_mask"][i, j] = 1.0
            past = c.past_user_utterances[-cfg.window:]
            for w, utt in enumerate(past):
                b["turn_mask"][i, w] = 1.0
                for j, t in enumerate(utt[:Lp]):
                    b["past_ids"][i, w, j] = v.token_id(t)
                    b["past_mask"][i, w, j] = 1.0
            acts = c.past_actions[-cfg.max_actions:]
            for j, a in enumerate(acts):
                b["act_ids"][i, j] = v.action_id(a)
                b["act_mask"][i, j] = 1.0
            mentions = c.mentions()
            b["n_mentions"][i] = len(mentions)
            for j, m in enumerate(mentions):
                words = tokenize(m.value)[:S]
                for k, wtok in enumerate(words):
                    b["men_ids"][i, j, k] = v.token_id(wtok)
                    b["men_tok_mask"][i, j, k] = 1.0
                b["men_type"][i, j] = v.type_id(m.entity_type)
                b["men_source"][i, j] = v.source_id(m.source)
                b["men_recency"][i, j] = v.recency_id(c.current_turn_index - m.turn_index)
                b["men_mask"][i, j] = 1.0
                b["men_current"][i, j] = 1.0 if m.turn_index == c.current_turn_index else 0.0
        return b

    # --------------------------------------------------------------- forward

    def forward(self, b: dict):
        cfg = self.cfg
        cache: dict = {"batch": b}
        B, M, S = b["men_ids"].shape

        men_vecs, men_cache = self.word_emb.forward(b["men_ids"])  # [B, M, S, e]
        flat_vecs = men_vecs.reshape(B * M, S, -1)
        flat_mask = b["men_tok_mask"].reshape(B * M, S)
        val_enc, val_cache = mean_pool(flat_vecs, flat_mask)
        val_enc = val_enc.reshape(B, M, -1)
        t_vec, t_cache = self.type_emb.forward(b["men_type"])
        s_vec, s_cache = self.source_emb.forward(b["men_source"])
        r_vec, r_cache = self.recency_emb.forward(b["men_recency"])
        menc = np.concatenate([val_enc, t_vec, s_vec, r_vec], axis=2)
        menc = menc * b["men_mask"][:, :, None]
        cache.update(men_cache=men_cache, val_cache=val_cache, t_cache=t_cache,
                     s_cache=s_cache, r_cache=r_cache, men_shapes=(B, M, S))

        blocks: list[np.ndarray] = []
        for name in cfg.blocks:
            if name == "cur_utt":
                vecs, ecache = self.word_emb.forward(b["cur_ids"])
                hs, (h, _c), lcache = self.lstm_cur.forward(vecs, b["cur_mask"])
                cache["cur"] = (ecache, lcache)
                blocks.append(h)
            elif name == "past_utts":
                Bw, W, Lp = b["past_ids"].shape
                vecs, ecache = self.word_emb.forward(b["past_ids"].reshape(Bw * W, Lp))
                hs, (h_in, _c), icache = self.lstm_inner.forward(
                    vecs, b["past_mask"].reshape(Bw * W, Lp))
                turn_vecs = h_in.reshape(Bw, W, -1)
                hs2, (h_out, _c2), ocache = self.lstm_outer.forward(turn_vecs, b["turn_mask"])
                cache["past"] = (ecache, icache, ocache, (Bw, W, Lp))
                blocks.append(h_out)
            elif name == "past_acts":
                avecs, acache = self.action_emb.forward(b["act_ids"])
                hs3, (h_act, _c3), lcache = self.lstm_act.forward(avecs, b["act_mask"])
                cache["acts"] = (acache, lcache)
                blocks.append(h_act)
            elif name == "cur_ents":
                cur_mask = b["men_mask"] * b["men_current"]
                pooled, pcache = mean_pool(menc, cur_mask)
                cache["cur_ents"] = pcache
                blocks.append(pooled)
            elif name == "past_ents":
                past_mask = b["men_mask"] * (1.0 - b["men_current"])
                pooled, pcache = mean_pool(menc, past_mask)
                cache["past_ents"] = pcache
                blocks.append(pooled)
        ctx = np.concatenate(blocks, axis=1) if blocks else np.zeros((B, 0))
        cache["menc"] = menc
        return ctx, menc, cache

    # -------------------------------------------------------------- backward

    def backward(self, cache: dict, dctx: np.ndarray | None, dmenc: np.ndarray | None) -> None:
        cfg = self.cfg
        b = cache["batch"]
        B, M, S = cache["men_shapes"]
        dmenc_total = np.zeros_like(cache["menc"]) if dmenc is None else dmenc.copy()

        offset = 0
        for name in cfg.blocks:
            width = {
                "cur_utt": cfg.hidden, "past_utts": cfg.hidden, "past_acts": cfg.hidden,
                "cur_ents": cfg.mention_dim, "past_ents": cfg.mention_dim,
            }[name]
            dblock = dctx[:, offset : offset + width] if dctx is not None else None
            offset += width
            if dblock is None:
                continue
            if name == "cur_utt":
                ecache, lcache = cache["cur"]
                dvecs = self.lstm_cur.backward(lcache, None, dh_final=dblock)
                self.word_emb.backward(ecache, dvecs * b["cur_mask"][:, :, None])
            elif name == "past_utts":
                ecache, icache, ocache, (Bw, W, Lp) = cache["past"]
                dturn = self.lstm_outer.backward(ocache, None, dh_final=dblock)
                dh_in = dturn.reshape(Bw * W, -1)
                dvecs = self.lstm_inner.backward(icache, None, dh_final=dh_in)
                self.word_emb.backward(ecache, dvecs * b["past_mask"].reshape(Bw * W, Lp)[:, :, None])
            elif name == "past_acts":
                acache, lcache = cache["acts"]
                dvecs = self.lstm_act.backward(lcache, None, dh_final=dblock)
                self.action_emb.backward(acache, dvecs * b["act_mask"][:, :, None])
            elif name == "cur_ents":
                dmenc_total += mean_pool_backward(cache["cur_ents"], dblock)
            elif name == "past_ents":
                dmenc_total += mean_pool_backward(cache["past_ents"], dblock)

        dmenc_total *= b["men_mask"][:, :, None]
        e = cfg.emb_dim
        dval = dmenc_total[:, :, :e]
        dtype = dmenc_total[:, :, e : e + cfg.type_dim]
        dsrc = dmenc_total[:, :, e + cfg.type_dim : e + cfg.type_dim + cfg.source_dim]
        drec = dmenc_total[:, :, e + cfg.type_dim + cfg.source_dim :]
        self.type_emb.backward(cache["t_cache"], dtype)
        self.source_emb.backward(cache["s_cache"], dsrc)
        self.recency_emb.backward(cache["r_cache"], drec)
        dflat = mean_pool_backward(cache["val_cache"], dval.reshape(B * M, -1))
        self.word_emb.backward(cache["men_cache"], dflat.reshape(B, M, S, -1))
