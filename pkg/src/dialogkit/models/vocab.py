"""Vocabulary and id spaces shared by the three models.

Known tokens get dense ids; anything unseen maps to one of 4,096 stable hash
buckets so runtime API returns with novel words still get a consistent row.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from ..dialogue import AnnotatedDialogue, UserUtterance
from ..schema import DomainSchema
from ..tokenizer import fold, tokenize

N_BUCKETS = 4096


def stable_hash(token: str) -> int:
    return int.from_bytes(hashlib.md5(token.encode("utf-8")).digest()[:8], "little")


@dataclass
class Vocab:
    tokens: list[str]
    types: list[str]
    actions: list[str]
    args: list[str]  # "Action.arg" keys across APIs and NLG responses
    n_buckets: int = N_BUCKETS
    sources: tuple[str, ...] = ("user", "agent", "api_return")
    recency_buckets: int = 4

    def __post_init__(self) -> None:
        self._token_ids = {t: i for i, t in enumerate(self.tokens)}
        self._type_ids = {t: i for i, t in enumerate(self.types)}
        self._action_ids = {a: i for i, a in enumerate(self.actions)}
        self._arg_ids = {a: i for i, a in enumerate(self.args)}
        self._source_ids = {s: i for i, s in enumerate(self.sources)}

    def token_id(self, token: str) -> int:
        t = fold(token)
        got = self._token_ids.get(t)
        if got is not None:
            return got
        return len(self.tokens) + stable_hash(t) % self.n_buckets

    def token_rows(self) -> int:
        return len(self.tokens) + self.n_buckets

    def type_id(self, name: str) -> int:
        return self._type_ids[name]

    def action_id(self, name: str) -> int:
        return self._action_ids[name]

    def arg_id(self, key: str) -> int:
        return self._arg_ids[key]

    def source_id(self, name: str) -> int:
        return self._source_ids[name]

    def recency_id(self, turns_ago: int) -> int:
        return min(max(turns_ago, 0), self.recency_buckets - 1)

    def to_json(self) -> str:
        return json.dumps(
            {
                "tokens": self.tokens,
                "types": self.types,
                "actions": self.actions,
                "args": self.args,
                "n_buckets": self.n_buckets,
            },
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocab":
        doc = json.loads(text)
        return cls(
            tokens=doc["tokens"],
            types=doc["types"],
            actions=doc["actions"],
            args=doc["args"],
            n_buckets=doc.get("n_buckets", N_BUCKETS),
        )


def build_vocab(schema: DomainSchema, corpora: list[list[AnnotatedDialogue]] | None = None) -> Vocab:
    """Schema catalogs and template texts first, then corpus tokens in
    first-seen order; deterministic for a fixed schema and corpus."""
    import re

    seen: dict[str, None] = {}

    def add_text(text: str) -> None:
        for tok in tokenize(text):
            seen.setdefault(fold(tok), None)

    def add_template(text: str) -> None:
        add_text(re.sub(r"\$\w+", " ", text))

    for t in schema.entity_types:
        for v in t.catalog:
            add_text(v)
    for tpl in schema.user_templates:
        for surface in tpl.surfaces():
            add_template(surface)
    for nlg in schema.nlg_responses:
        for text in nlg.template_texts:
            add_template(text)
    for corpus in corpora or []:
        for d in corpus:
            for e in d.events:
                if isinstance(e, UserUtterance):
                    add_text(e.text)
            for var in d.variables.values():
                add_text(str(var.value))

    args = []
    for action in list(schema.apis) + list(schema.nlg_responses):
        for arg in action.args:
            args.append(f"{action.name}.{arg.name}")
    return Vocab(
        tokens=list(seen),
        types=schema.type_names(),
        actions=schema.action_names(),
        args=args,
    )


def load_pretrained_embeddings(path, vocab: Vocab, embedding) -> int:
    """Optional import hook: seed embedding rows from a text file of
    whitespace-separated ``token v1 v2 ...`` lines. Returns rows loaded."""
    import numpy as np

    dim = embedding.E.value.shape[1]
    loaded = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            parts = line.rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                continue
            tok = fold(parts[0])
            if tok in vocab._token_ids:
                embedding.E.value[vocab._token_ids[tok]] = np.array([float(x) for x in parts[1:]])
                loaded += 1
    return loaded
