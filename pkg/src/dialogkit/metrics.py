"""Evaluation metrics: NER span F1, AP accuracy, turn-level ASP accuracy.

All metrics are computed per turn given the gold dialogue context from
previous turns. A turn's action-signature prediction is correct only when the
full agent action-name sequence matches gold and every argument binding
resolves to the gold value.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def span_f1(gold: list[tuple], predicted: list[tuple]) -> tuple[float, float, float]:
    """Micro P/R/F1 over (start, end, entity_type) spans; exact match only."""
    gold_set = set(gold)
    pred_set = set(predicted)
    tp = len(gold_set & pred_set)
    precision = tp / len(pred_set) if pred_set else 0.0
    recall = tp / len(gold_set) if gold_set else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _values_match(a, b) -> bool:
    if isinstance(a, (list, tuple)) or isinstance(b, (list, tuple)):
        if not isinstance(a, (list, tuple)) or not isinstance(b, (list, tuple)):
            return False
        return sorted(map(str, a)) == sorted(map(str, b))
    return str(a) == str(b)


@dataclass
class TurnEval:
    dialogue_index: int
    turn_index: int
    gold_actions: list[str]
    pred_actions: list[str]
    # value-resolved bindings per action position; None where not applicable
    gold_bindings: list[dict | None] = field(default_factory=list)
    pred_bindings: list[dict | None] = field(default_factory=list)

    @property
    def ap_correct(self) -> bool:
        return self.pred_actions == self.gold_actions

    @property
    def asp_correct(self) -> bool:
        if not self.ap_correct:
            return False
        for gold, pred in zip(self.gold_bindings, self.pred_bindings):
            if gold is None:
                continue
            if pred is None:
                return False
            gold_args = {k: v for k, v in gold.items() if v is not None}
            pred_args = {k: v for k, v in pred.items() if v is not None}
            if set(gold_args) != set(pred_args):
                return False
            for arg, value in gold_args.items():
                if not _values_match(value, pred_args[arg]):
                    return False
        return True


def asp_accuracy(evals: list[TurnEval]) -> tuple[float, float]:
    """(AP accuracy, ASP accuracy), turn-level fractions."""
    if not evals:
        return 0.0, 0.0
    ap = sum(e.ap_correct for e in evals) / len(evals)
    asp = sum(e.asp_correct for e in evals) / len(evals)
    return ap, asp


def relative_improvement(treatment: float, baseline: float) -> float | None:
    """(a - b) / b, or None when the baseline is zero."""
    if baseline == 0:
        return None
    return (treatment - baseline) / baseline
