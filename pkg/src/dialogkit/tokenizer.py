"""Whitespace-plus-punctuation tokenizer shared by every component.

Entity spans are half-open token-index ranges over this tokenization, so
parser, simulator, feature extractors and models must all agree on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


@dataclass(frozen=True)
class Token:
    text: str
    start: int  # char offset into the source string
    end: int


def tokenize_with_offsets(text: str) -> list[Token]:
    """Split into word/punctuation tokens, keeping character offsets."""
    return [Token(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def tokenize(text: str) -> list[str]:
    return [m.group(0) for m in _TOKEN_RE.finditer(text)]


def span_surface(text: str, start: int, end: int) -> str:
    """Original substring covered by token span [start, end).

    Preserves in-span punctuation spacing ("7:30 pm" stays intact), which
    token joining would not.
    """
    toks = tokenize_with_offsets(text)
    if not 0 <= start < end <= len(toks):
        raise ValueError(f"span [{start}, {end}) out of bounds for {len(toks)} tokens")
    return text[toks[start].start : toks[end - 1].end]


def fold(token: str) -> str:
    """Case fold for vocabulary lookup and catalogue matching."""
    return token.casefold()
