"""Minimal trainable numeric substrate.

float64 numpy tensors, hand-derived gradients for every layer, a linear-chain
CRF with forward/backward and Viterbi, an Adam optimizer with global-norm
clipping, and a central-finite-difference gradient checker that gates it all.
No autodiff graph, no GPU.
"""

from .params import Param, ParamStore
from .layers import Embedding, Linear, Lstm, BiLstm, softmax, softmax_xent, logsumexp
from .crf import CrfLayer, crf_log_partition, crf_viterbi
from .optim import AdamConfig, optimizer_step, global_norm
from .gradcheck import finite_diff_check
from .checkpoint import save_params, load_params, params_debug_json

__all__ = [
    "Param", "ParamStore", "Embedding", "Linear", "Lstm", "BiLstm",
    "softmax", "softmax_xent", "logsumexp", "CrfLayer", "crf_log_partition",
    "crf_viterbi", "AdamConfig", "optimizer_step", "global_norm",
    "finite_diff_check", "save_params", "load_params", "params_debug_json",
]
