"""Catalogue features: per-token binary indicators of value-list matches.

The utterance is scanned with windows of 1..n tokens; a window matching a
catalogue entry (case-folded) flags every covered token in that catalogue's
column. Static columns come from the schema catalogs, dynamic columns from
session-accumulated values; dynamic columns additionally fire on fuzzy
matches (normalized Levenshtein similarity over the window text).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..schema import DomainSchema
from ..tokenizer import fold, tokenize


@lru_cache(maxsize=200_000)
def levenshtein_similarity(a: str, b: str) -> float:
    """1 - dist/max_len on case-folded strings; 1.0 for two empty strings."""
    a, b = fold(a), fold(b)
    if a == b:
        return 1.0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0.0
    if la > lb:
        a, b, la, lb = b, a, lb, la
    prev = list(range(la + 1))
    for j in range(1, lb + 1):
        cur = [j] + [0] * la
        bj = b[j - 1]
        for i in range(1, la + 1):
            cost = 0 if a[i - 1] == bj else 1
            cur[i] = min(prev[i] + 1, cur[i - 1] + 1, prev[i - 1] + cost)
        prev = cur
    return 1.0 - prev[la] / lb


def _normalize_entry(entry: str) -> str:
    return " ".join(fold(t) for t in tokenize(entry))


def static_catalog_index(schema: DomainSchema) -> list[tuple[str, frozenset]]:
    """(entity type, normalized entries) per type, in schema order."""
    return [
        (t.name, frozenset(_normalize_entry(v) for v in t.catalog))
        for t in schema.entity_types
    ]


def catalogue_features(
    tokens: list[str],
    static_catalogs: list[tuple[str, frozenset]],
    dynamic_catalogs: dict[str, list[str]] | None = None,
    window: int = 3,
    fuzzy_threshold: float = 0.8,
    type_order: list[str] | None = None,
) -> np.ndarray:
    """[L, K] binary matrix; K = static columns then dynamic columns.

    Dynamic columns are one per entity type (schema order) regardless of which
    types the session has seen, so the feature dimension is schema-constant.
    """
    types = type_order if type_order is not None else [name for name, _ in static_catalogs]
    L = len(tokens)
    K = len(static_catalogs) + len(types)
    out = np.zeros((L, K), dtype=np.float64)
    if L == 0:
        return out
    folded = [fold(t) for t in tokens]
    dynamic_catalogs = dynamic_catalogs or {}
    dyn_entries = {
        name: [_normalize_entry(v) for v in dynamic_catalogs.get(name, [])] for name in types
    }
    col_of_static = {name: k for k, (name, _) in enumerate(static_catalogs)}
    col_of_dynamic = {name: len(static_catalogs) + k for k, name in enumerate(types)}

    for i in range(L):
        for j in range(i + 1, min(i + window, L) + 1):
            text = " ".join(folded[i:j])
            for name, entries in static_catalogs:
                if text in entries:
                    out[i:j, col_of_static[name]] = 1.0
            for name in types:
                entries = dyn_entries[name]
                if not entries:
                    continue
                col = col_of_dynamic[name]
                for entry in entries:
                    if text == entry:
                        out[i:j, col] = 1.0
                        break
                    # cheap length prefilter before the DP
                    if abs(len(text) - len(entry)) > (1.0 - fuzzy_threshold) * max(len(text), len(entry)):
                        continue
                    if levenshtein_similarity(text, entry) >= fuzzy_threshold:
                        out[i:j, col] = 1.0
                        break
    return out
