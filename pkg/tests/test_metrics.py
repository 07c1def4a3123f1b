import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dialogkit.metrics import TurnEval, asp_accuracy, relative_improvement, span_f1


def test_span_f1_identical_sets():
    spans = [(0, 2, "Movie"), (4, 5, "Date")]
    assert span_f1(spans, spans) == (1.0, 1.0, 1.0)


def test_span_f1_empty_prediction():
    p, r, f1 = span_f1([(3, 6, "Movie")], [])
    assert (p, r, f1) == (0.0, 0.0, 0.0)


def test_span_f1_half_right():
    gold = [(0, 1, "A"), (2, 3, "B")]
    pred = [(0, 1, "A"), (4, 5, "B")]
    p, r, f1 = span_f1(gold, pred)
    assert p == 0.5 and r == 0.5 and f1 == 0.5


def test_span_f1_type_must_match():
    assert span_f1([(0, 2, "Movie")], [(0, 2, "Date")])[2] == 0.0


def _turn(gold_actions, pred_actions, gold_b=None, pred_b=None, di=0, ti=1):
    n = len(gold_actions)
    return TurnEval(di, ti, gold_actions, pred_actions,
                    gold_b if gold_b is not None else [None] * n,
                    pred_b if pred_b is not None else [None] * n)


def test_asp_perfect_prediction():
    evals = [_turn(["GetDuration", "EndTurn"], ["GetDuration", "EndTurn"],
                   [{"movieTitle": "joker"}, None], [{"movieTitle": "joker"}, None])
             for _ in range(3)]
    assert asp_accuracy(evals) == (1.0, 1.0)


def test_asp_one_argument_wrong_in_one_of_four_turns():
    good = _turn(["A", "EndTurn"], ["A", "EndTurn"], [{"x": "1"}, None], [{"x": "1"}, None])
    bad = _turn(["A", "EndTurn"], ["A", "EndTurn"], [{"x": "1"}, None], [{"x": "2"}, None])
    evals = [good, good, good, bad]
    ap, asp = asp_accuracy(evals)
    assert ap == 1.0
    assert asp == 0.75


def test_asp_action_name_mismatch_fails_both():
    e = _turn(["A", "EndTurn"], ["B", "EndTurn"])
    ap, asp = asp_accuracy([e])
    assert ap == 0.0 and asp == 0.0


def test_asp_multi_value_order_insensitive():
    e = _turn(["A"], ["A"], [{"xs": ["b", "a"]}], [{"xs": ["a", "b"]}])
    assert asp_accuracy([e]) == (1.0, 1.0)


def test_asp_unfilled_optional_matches_absent():
    e = _turn(["A"], ["A"], [{"x": "1"}], [{"x": "1", "opt": None}])
    assert asp_accuracy([e]) == (1.0, 1.0)


def test_metrics_permutation_invariant():
    a = _turn(["A"], ["A"])
    b = _turn(["A"], ["B"])
    assert asp_accuracy([a, b]) == asp_accuracy([b, a])


@given(st.lists(st.booleans(), min_size=1, max_size=30))
@settings(max_examples=40, deadline=None)
def test_asp_never_exceeds_ap(flags):
    evals = []
    for i, ok in enumerate(flags):
        if ok:
            evals.append(_turn(["A"], ["A"], [{"x": "1"}], [{"x": "1"}]))
        else:
            evals.append(_turn(["A"], ["A"], [{"x": "1"}], [{"x": "2"}]))
    ap, asp = asp_accuracy(evals)
    assert asp <= ap


def test_relative_improvement():
    assert relative_improvement(1.5, 1.0) == pytest.approx(0.5)
    assert relative_improvement(0.5, 0.0) is None
