"""Linear-chain CRF: log-partition, Viterbi decoding, and NLL gradients.

Path score for tags y over emissions e [L, T]:

    start[y0] + sum_i e[i, yi] + sum_i trans[y_{i-1}, y_i] + stop[y_{L-1}]

Everything runs in log space with running-max stabilization. Gradients of the
log partition come from forward-backward marginals.
"""

from __future__ import annotations

import numpy as np

from .layers import logsumexp
from .params import ParamStore

NEG_INF = -1e30  # used instead of -inf so masked decoding stays NaN-free


class CrfLayer:
    def __init__(self, store: ParamStore, name: str, num_tags: int):
        self.T = num_tags
        self.trans = store.add(f"{name}.trans", (num_tags, num_tags), init="zeros")
        self.start = store.add(f"{name}.start", (num_tags,), init="zeros")
        self.stop = store.add(f"{name}.stop", (num_tags,), init="zeros")


def crf_log_partition(crf: CrfLayer, emissions: np.ndarray) -> float:
    """log sum over all T^L tag paths of exp(path score); emissions [L, T]."""
    L, T = emissions.shape
    if L < 1:
        raise ValueError("emissions must cover at least one position")
    if T != crf.T:
        raise ValueError(f"emissions have {T} tags, CRF has {crf.T}")
    alpha = crf.start.value + emissions[0]
    for i in range(1, L):
        alpha = emissions[i] + logsumexp(alpha[:, None] + crf.trans.value, axis=0)
    return float(logsumexp(alpha + crf.stop.value, axis=0))


def crf_viterbi(
    crf: CrfLayer,
    emissions: np.ndarray,
    trans_mask: np.ndarray | None = None,
    start_mask: np.ndarray | None = None,
) -> tuple[list[int], float]:
    """Best tag path and its score.

    Optional additive masks (0 or NEG_INF) forbid transitions/start tags.
    Ties break toward the lowest tag index at the latest differing position,
    which is what first-index argmax over the backward recursion yields.
    """
    L, T = emissions.shape
    if L < 1:
        raise ValueError("emissions must cover at least one position")
    if T != crf.T:
        raise ValueError(f"emissions have {T} tags, CRF has {crf.T}")
    trans = crf.trans.value + (trans_mask if trans_mask is not None else 0.0)
    start = crf.start.value + (start_mask if start_mask is not None else 0.0)
    delta = start + emissions[0]
    back: list[np.ndarray] = []
    for i in range(1, L):
        scores = delta[:, None] + trans  # [from, to]
        best_prev = np.argmax(scores, axis=0)  # lowest index wins ties
        delta = emissions[i] + scores[best_prev, np.arange(T)]
        back.append(best_prev)
    final = delta + crf.stop.value
    last = int(np.argmax(final))
    path = [last]
    for bp in reversed(back):
        last = int(bp[last])
        path.append(last)
    path.reverse()
    return path, float(final[path[-1]] if L == 1 else np.max(final))


def crf_path_score(crf: CrfLayer, emissions: np.ndarray, path: list[int]) -> float:
    score = crf.start.value[path[0]] + emissions[0, path[0]]
    for i in range(1, len(path)):
        score += crf.trans.value[path[i - 1], path[i]] + emissions[i, path[i]]
    return float(score + crf.stop.value[path[-1]])


def crf_nll_batch(crf: CrfLayer, emissions: np.ndarray, tags: np.ndarray, weight: float = 1.0):
    """Mean negative log-likelihood over a batch of equal-length sequences.

    emissions [B, L, T], tags [B, L]. Returns (loss, d_emissions) and
    accumulates gradients into the CRF parameters.
    """
    B, L, T = emissions.shape
    trans = crf.trans.value

    alpha = np.zeros((B, L, T))
    alpha[:, 0] = crf.start.value + emissions[:, 0]
    for i in range(1, L):
        alpha[:, i] = emissions[:, i] + logsumexp(alpha[:, i - 1, :, None] + trans[None], axis=1)
    log_z = logsumexp(alpha[:, L - 1] + crf.stop.value, axis=1)  # [B]

    beta = np.zeros((B, L, T))
    beta[:, L - 1] = crf.stop.value
    for i in range(L - 2, -1, -1):
        inner = trans[None] + (emissions[:, i + 1] + beta[:, i + 1])[:, None, :]
        beta[:, i] = logsumexp(inner, axis=2)

    # unary marginals P(y_i = t)
    post = np.exp(alpha + beta - log_z[:, None, None])

    rows = np.arange(B)[:, None]
    cols = np.arange(L)[None, :]
    gold_emit = emissions[rows, cols, tags].sum(axis=1)
    gold_trans = trans[tags[:, :-1], tags[:, 1:]].sum(axis=1) if L > 1 else np.zeros(B)
    gold = crf.start.value[tags[:, 0]] + gold_emit + gold_trans + crf.stop.value[tags[:, -1]]

    loss = float(np.mean(log_z - gold)) * weight
    scale = weight / B

    d_emissions = post.copy()
    np.subtract.at(d_emissions, (rows, cols, tags), 1.0)
    d_emissions *= scale

    # pairwise marginals accumulated straight into the transition gradient
    if L > 1:
        for i in range(L - 1):
            pair = np.exp(
                alpha[:, i, :, None]
                + trans[None]
                + (emissions[:, i + 1] + beta[:, i + 1])[:, None, :]
                - log_z[:, None, None]
            )
            crf.trans.grad += scale * pair.sum(axis=0)
        np.add.at(crf.trans.grad, (tags[:, :-1].reshape(-1), tags[:, 1:].reshape(-1)), -scale)
    crf.start.grad += scale * post[:, 0].sum(axis=0)
    np.add.at(crf.start.grad, tags[:, 0], -scale)
    crf.stop.grad += scale * post[:, L - 1].sum(axis=0)
    np.add.at(crf.stop.grad, tags[:, -1], -scale)

    return loss, d_emissions
