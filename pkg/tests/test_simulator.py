import numpy as np
import pytest

from dialogkit.acts import DialogueAct
from dialogkit.dialogue import ApiCall, NlgCall, UserUtterance, validate_dialogue
from dialogkit.domains import pizzabot, ticketbot
from dialogkit.simulator import (
    GenerationError,
    SimConfig,
    UserAgentState,
    generate_dataset,
    realize_user_acts,
    sample_goal,
    simulate_api,
    user_step,
)
from dialogkit.simulator.generate import offer_cooccurrence, simulate_dialogue, transform_seed
from dialogkit.simulator.goals import FromReturn, extract_goal
from dialogkit.simulator.policies import SystemAgentState, system_step
from dialogkit.simulator.realize import template_index


@pytest.fixture(scope="module")
def pizza():
    s = pizzabot.schema()
    return s, pizzabot.seeds(s)


@pytest.fixture(scope="module")
def ticket():
    s = ticketbot.schema()
    return s, ticketbot.seeds(s)


def cfg(**kw) -> SimConfig:
    base = dict(p_correction=0.0, p_over_cooperative=0.0, p_under_cooperative=0.0,
                p_proactive_offer=0.0, p_api_failure=0.0)
    base.update(kw)
    return SimConfig(**base)


# --- goal sampling ----------------------------------------------------------


def test_sample_goal_correction_forced(pizza):
    schema, seeds = pizza
    goal = None
    for i in range(20):
        g = sample_goal(seeds, schema, cfg(p_correction=1.0), np.random.default_rng([4, i]))
        if any(c.api == "OrderPizza" for c in g.target_calls):
            goal = g
            break
    assert goal is not None
    assert goal.revisions, "p_correction=1 must inject a revision on a confirmable call"
    rev = goal.revisions[0]
    call = goal.target_calls[rev.call_index]
    assert schema.api(call.api).confirm_before_call
    old = call.bindings[rev.arg]
    assert not (isinstance(old, str) and old == rev.new_value)


def test_sample_goal_base_mode_matches_a_seed_skeleton(pizza):
    schema, seeds = pizza
    seed_skeletons = {
        tuple((c.api, tuple(sorted(c.bindings))) for c in extract_goal(x, schema).target_calls)
        for x in seeds
    }
    for i in range(10):
        g = sample_goal(seeds, schema, cfg(mode="base"), np.random.default_rng([9, i]))
        sk = tuple((c.api, tuple(sorted(c.bindings))) for c in g.target_calls)
        assert sk in seed_skeletons
        for call in g.target_calls:
            api = schema.api(call.api)
            for arg, value in call.bindings.items():
                if isinstance(value, FromReturn):
                    continue
                etype = api.arg(arg).entity_type
                allowed = set(schema.entity_type(etype).sampler_values())
                for item in value if isinstance(value, list) else [value]:
                    assert item in allowed


def test_sample_goal_no_variation_single_seed(pizza):
    schema, seeds = pizza
    single = [seeds[4]]  # the one-shot order seed: exactly one OrderPizza call
    g = sample_goal(single, schema, cfg(), np.random.default_rng(3))
    assert [c.api for c in g.target_calls] == ["OrderPizza"]
    assert not g.revisions
    assert g.cooperation == "exact"


def test_sample_goal_empty_seed_set(pizza):
    schema, _ = pizza
    with pytest.raises(ValueError):
        sample_goal([], schema, cfg(), np.random.default_rng(0))


def test_extract_goal_recovers_revision(pizza):
    schema, seeds = pizza
    goal = extract_goal(seeds[1], schema)  # seed 2 corrects size large -> small
    assert any(r.arg == "size" for r in goal.revisions)
    rev = next(r for r in goal.revisions if r.arg == "size")
    call = goal.target_calls[rev.call_index]
    assert call.bindings["size"] == "large"
    assert rev.new_value == "small"


# --- user policy ------------------------------------------------------------


def _pizza_goal(schema):
    from dialogkit.simulator.goals import Goal, Revision, TargetCall

    return Goal(
        target_calls=[TargetCall("OrderPizza", {
            "toppingsList": ["olives", "tomatoes", "green peppers"],
            "crust": "thin", "cheese": "extra", "size": "large",
        })],
        revisions=[Revision(0, "size", "small")],
        cooperation="over",
    )


def test_user_answers_request_over_cooperatively(pizza):
    schema, _ = pizza
    index = template_index(schema)
    state = UserAgentState(goal=_pizza_goal(schema), rng=np.random.default_rng(0))
    state.engaged.add(0)
    acts = user_step(state, [DialogueAct("request", slot="OrderPizza.toppingsList")], schema, index)
    labels = [(a.label, a.slot) for a in acts]
    assert labels[0] == ("inform", "OrderPizza.toppingsList")
    assert acts[0].value == ["olives", "tomatoes", "green peppers"]
    assert len(acts) == 3  # two extra informs volunteered


def test_user_denies_and_corrects_at_confirm(pizza):
    schema, _ = pizza
    index = template_index(schema)
    state = UserAgentState(goal=_pizza_goal(schema), rng=np.random.default_rng(0))
    state.engaged.add(0)
    confirm = DialogueAct("confirm", action="OrderPizza",
                          bindings={"size": "large", "crust": "thin"})
    acts = user_step(state, [confirm], schema, index)
    assert [a.label for a in acts] == ["deny", "correct"]
    assert acts[1].slot == "OrderPizza.size"
    assert acts[1].value == "small"
    # at the re-confirm the user affirms
    acts = user_step(state, [confirm], schema, index)
    assert [a.label for a in acts] == ["affirm"]


def test_user_says_bye_when_goal_satisfied(pizza):
    schema, _ = pizza
    index = template_index(schema)
    state = UserAgentState(goal=_pizza_goal(schema), rng=np.random.default_rng(0))
    state.engaged.add(0)
    state.call_idx = 1  # everything done
    notify = DialogueAct("notify_result", action="OrderPizza",
                         bindings={"__return__": "$8.49"})
    acts = user_step(state, [notify], schema, index)
    assert [a.label for a in acts] == ["bye"]


def test_user_improvises_on_unanswerable_request(pizza):
    schema, _ = pizza
    from dialogkit.simulator.goals import Goal, TargetCall

    goal = Goal(target_calls=[TargetCall("OrderDrink", {"drink": "coke"})])
    index = template_index(schema)
    state = UserAgentState(goal=goal, rng=np.random.default_rng(0))
    state.engaged.add(0)
    acts = user_step(state, [DialogueAct("request", slot="OrderDrink.size")], schema, index)
    assert acts[0].label == "inform"
    assert acts[0].value in schema.entity_type("Size").catalog
    assert goal.target_calls[0].bindings["size"] == acts[0].value  # recorded into the goal


# --- system policy ----------------------------------------------------------


def test_system_requests_first_missing_arg_in_schema_order(pizza):
    schema, _ = pizza
    state = SystemAgentState(schema=schema, rng=np.random.default_rng(0))
    incoming = [DialogueAct("request", action="OrderPizza"),
                DialogueAct("inform", slot="OrderPizza.size", value="large")]
    incoming[1].var = "u1"
    acts, events, _ = system_step(state, incoming, schema, cfg(), offer_map={})
    assert acts[0].label == "request"
    assert acts[0].slot == "OrderPizza.toppingsList"
    assert isinstance(events[0], NlgCall) and events[0].name == "request_toppings"
    assert events[-1].kind == "end_turn"


def test_system_confirms_when_complete_and_calls_after_affirm(pizza):
    schema, _ = pizza
    state = SystemAgentState(schema=schema, rng=np.random.default_rng(0))
    incoming = [DialogueAct("request", action="OrderDrink"),
                DialogueAct("inform", slot="OrderDrink.drink", value="coke"),
                DialogueAct("inform", slot="OrderDrink.size", value="small")]
    incoming[1].var = "u1"
    incoming[2].var = "u2"
    acts, events, _ = system_step(state, incoming, schema, cfg(), offer_map={})
    assert acts[0].label == "confirm"
    assert acts[0].bindings == {"drink": "coke", "size": "small"}
    acts, events, new_vars = system_step(state, [DialogueAct("affirm")], schema, cfg(), offer_map={})
    assert isinstance(events[0], ApiCall) and events[0].name == "OrderDrink"
    assert events[0].args["drink"].var == "u1"
    assert acts[0].label == "notify_result"
    assert len(new_vars) == 1  # the Price return


def test_system_offers_after_completed_call(pizza):
    schema, seeds = pizza
    omap = offer_cooccurrence(seeds)
    assert "OrderDrink" in omap.get("OrderPizza", [])
    state = SystemAgentState(schema=schema, rng=np.random.default_rng(0))
    incoming = [DialogueAct("request", action="OrderPizza"),
                DialogueAct("inform", slot="OrderPizza.toppingsList", value=["olives"]),
                DialogueAct("inform", slot="OrderPizza.crust", value="thin"),
                DialogueAct("inform", slot="OrderPizza.cheese", value="extra"),
                DialogueAct("inform", slot="OrderPizza.size", value="small")]
    incoming[1].vars = ["u1"]
    for k, act in enumerate(incoming[2:], start=2):
        act.var = f"u{k}"
    system_step(state, incoming, schema, cfg(p_proactive_offer=1.0), offer_map=omap)
    acts, events, _ = system_step(state, [DialogueAct("affirm")], schema,
                                  cfg(p_proactive_offer=1.0), offer_map=omap)
    offer_acts = [a for a in acts if a.label == "offer"]
    assert offer_acts and offer_acts[0].action == "OrderDrink"
    assert any(isinstance(e, NlgCall) and e.name == "offer_drink" for e in events)
    # an API with no offer NLG (CancelOrder follows OrderPizza in a seed) is never offered
    assert all(a.action != "CancelOrder" for a in offer_acts)


def test_simulate_api_contract(pizza):
    schema, _ = pizza
    api = schema.api("OrderPizza")
    rng = np.random.default_rng(0)
    value = simulate_api(api, {}, schema, rng)
    assert value in schema.entity_type("Price").sampler_values()
    from dialogkit.simulator.policies import API_FAILURE

    assert simulate_api(api, {}, schema, np.random.default_rng(1), p_failure=1.0) is API_FAILURE
    void = schema.api("CancelOrder")
    assert simulate_api(void, {}, schema, rng) is None


def test_simulate_api_reproducible(pizza):
    schema, _ = pizza
    api = schema.api("OrderPizza")
    a = [simulate_api(api, {}, schema, np.random.default_rng([1, i])) for i in range(10)]
    b = [simulate_api(api, {}, schema, np.random.default_rng([1, i])) for i in range(10)]
    assert a == b


# --- realization ------------------------------------------------------------


def test_realize_substitution_and_spans(ticket):
    schema, _ = ticket
    acts = [DialogueAct("request", action="FindShowtimes"),
            DialogueAct("inform", slot="FindShowtimes.movieTitle", value="captain marvel"),
            DialogueAct("inform", slot="FindShowtimes.date", value="sunday")]
    made = {}

    def var_factory(etype, value):
        made[f"u{len(made) + 1}"] = (etype, value)
        return f"u{len(made)}"

    rng = np.random.default_rng(0)
    utt = realize_user_acts(acts, schema, rng, var_factory, mode="base")
    assert utt.text == "is captain marvel playing sunday"
    movie = next(a for a in utt.annotations if a.entity_type == "Movie")
    assert (movie.start, movie.end) == (1, 3)
    assert made["u1"] == ("Movie", "captain marvel") or made["u2"] == ("Movie", "captain marvel")


def test_realize_empty_acts_empty_text(pizza):
    schema, _ = pizza
    utt = realize_user_acts([], schema, np.random.default_rng(0), lambda t, v: "u1")
    assert utt.text == "" and utt.annotations == []


def test_realize_multi_value_lists(pizza):
    schema, _ = pizza
    acts = [DialogueAct("inform", slot="OrderPizza.toppingsList",
                        value=["olives", "tomatoes", "green peppers"])]
    count = [0]

    def var_factory(etype, value):
        count[0] += 1
        return f"t{count[0]}"

    utt = realize_user_acts(acts, schema, np.random.default_rng(1), var_factory, mode="base")
    assert "olives, tomatoes and green peppers" in utt.text
    assert [a.entity_type for a in utt.annotations] == ["Topping"] * 3
    assert acts[0].vars == ["t1", "t2", "t3"]


def test_realize_composition_fallback(pizza):
    schema, _ = pizza
    acts = [DialogueAct("deny"),
            DialogueAct("correct", slot="OrderPizza.size", value="small")]
    utt = realize_user_acts(acts, schema, np.random.default_rng(0), lambda t, v: "u1", mode="base")
    assert utt.text == "no actually make it small"


def test_realize_error_names_the_act(pizza):
    schema, _ = pizza
    acts = [DialogueAct("request", action="NoSuchApi")]
    with pytest.raises(GenerationError, match="request\\(NoSuchApi\\)"):
        realize_user_acts(acts, schema, np.random.default_rng(0), lambda t, v: "u1")


def test_realize_system_side_duration_template(ticket):
    from dialogkit.acts import notify_result
    from dialogkit.simulator import realize

    schema, _ = ticket
    act = notify_result("GetDuration", {"movieTitle": "la la land", "__return__": "2 hours"})
    rng = np.random.default_rng(1)
    seen = set()
    for _ in range(8):
        text, tagged = realize([act], "system", schema, rng)
        seen.add(text)
        assert "la la land" in text and "2 hours" in text
        assert ("movieTitle", "Movie", "la la land") in tagged
    assert "la la land is 2 hours long" in seen


def test_realize_rejects_unknown_side(pizza):
    from dialogkit.simulator import realize

    schema, _ = pizza
    with pytest.raises(ValueError):
        realize([], "narrator", schema, np.random.default_rng(0))


# --- end to end -------------------------------------------------------------


def test_correction_dialogue_contains_expected_act_chain(pizza):
    schema, seeds = pizza
    found = False
    for i in range(40):
        rng = np.random.default_rng([11, i])
        d, info = simulate_dialogue(seeds, schema, cfg(p_correction=1.0), rng)
        if info["corrections"] == 0:
            continue
        nlg_names = [e.name for e in d.events if isinstance(e, NlgCall)]
        confirms = [n for n in nlg_names if n.startswith("confirm")]
        if len(confirms) >= 2:
            found = True
            break
    assert found, "correction flows must confirm, re-confirm after the fix"


def test_simulated_dialogues_validate(pizza):
    schema, seeds = pizza
    for i in range(50):
        rng = np.random.default_rng([21, i])
        d, _ = simulate_dialogue(seeds, schema, cfg(p_correction=0.5, p_over_cooperative=0.3,
                                                    p_under_cooperative=0.2,
                                                    p_proactive_offer=0.5, p_api_failure=0.2), rng)
        assert validate_dialogue(d, schema).ok


def test_base_mode_structure_subset(ticket):
    schema, seeds = ticket
    ds, _ = generate_dataset(seeds, schema, SimConfig(seed=13, num_dialogues=50, mode="base"))
    seed_structures = {tuple(x.api_skeleton()) for x in seeds}
    for d in ds:
        assert tuple(d.api_skeleton()) in seed_structures
        assert validate_dialogue(d, schema).ok


def test_generate_deterministic(pizza):
    schema, seeds = pizza
    from dialogkit.dialogue import serialize_dialogue

    a, stats_a = generate_dataset(seeds, schema, SimConfig(seed=5, num_dialogues=10))
    b, stats_b = generate_dataset(seeds, schema, SimConfig(seed=5, num_dialogues=10))
    assert [serialize_dialogue(x) for x in a] == [serialize_dialogue(y) for y in b]
    assert stats_a == stats_b


def test_generate_single_dialogue(pizza):
    schema, seeds = pizza
    ds, stats = generate_dataset(seeds, schema, SimConfig(seed=1, num_dialogues=1))
    assert len(ds) == 1
    assert stats["num_dialogues"] == 1


@pytest.mark.slow
def test_correction_rate_concentrates(pizza):
    schema, seeds = pizza
    ds, stats = generate_dataset(seeds, schema, SimConfig(seed=3, num_dialogues=2000, p_correction=0.3))
    rate = stats["dialogues_with_corrections"] / 2000
    assert 0.25 <= rate <= 0.35


def test_transform_seed_preserves_structure_and_validates(ticket):
    schema, seeds = ticket
    index = template_index(schema)
    for i, seed in enumerate(seeds):
        d = transform_seed(seed, schema, np.random.default_rng([3, i]), index)
        assert d.api_skeleton() == seed.api_skeleton()
        assert validate_dialogue(d, schema).ok
        assert len(d.events) == len(seed.events)
