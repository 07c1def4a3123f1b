import json

import pytest

from dialogkit.dialogue import (
    DialogueError,
    parse_dialogue,
    resolve_references,
    serialize_dialogue,
    turns,
    validate_dialogue,
)
from dialogkit.domains import load_bundled_corpus, load_bundled_schema, pizzabot, ticketbot
from dialogkit.schema import SchemaError, parse_domain, serialize_domain
from dialogkit.tokenizer import fold, span_surface, tokenize, tokenize_with_offsets


# --- tokenizer ---------------------------------------------------------------


def test_tokenize_words_and_punctuation():
    assert tokenize("how long is la la land") == ["how", "long", "is", "la", "la", "land"]
    assert tokenize("it's $5.99!") == ["it", "'", "s", "$", "5", ".", "99", "!"]


def test_span_surface_preserves_punctuation():
    text = "the 7:30 pm show"
    toks = tokenize(text)
    assert toks == ["the", "7", ":", "30", "pm", "show"]
    assert span_surface(text, 1, 5) == "7:30 pm"


def test_tokenize_offsets_cover_text():
    text = "no, make it small."
    for tok in tokenize_with_offsets(text):
        assert text[tok.start : tok.end] == tok.text


# --- schema parsing ----------------------------------------------------------


def test_pizzabot_counts():
    schema = pizzabot.schema()
    assert schema.counts() == (3, 6)


def test_unresolved_reference_names_offender():
    doc = {"entity_types": [], "apis": [{"name": "GetDuration", "args": [
        {"name": "movieTitle", "entity_type": "Movie"}]}]}
    with pytest.raises(SchemaError, match="Movie"):
        parse_domain(doc)


def test_duplicate_identifier_rejected():
    doc = {"entity_types": [{"name": "A", "catalog": ["x"]},
                            {"name": "A", "catalog": ["y"]}]}
    with pytest.raises(SchemaError, match="duplicate"):
        parse_domain(doc)


def test_syntax_error_carries_line_and_column():
    with pytest.raises(SchemaError) as err:
        parse_domain('{"entity_types": [,]}')
    assert err.value.line is not None and err.value.column is not None


def test_field_access_in_templates_rejected():
    doc = {
        "entity_types": [{"name": "Cast", "catalog": ["x"]}],
        "apis": [],
        "nlg_responses": [{
            "name": "inform_cast",
            "args": [{"name": "cast", "entity_type": "Cast"}],
            "template_texts": ["$cast.name was in it"],
        }],
    }
    with pytest.raises(SchemaError, match="field access"):
        parse_domain(doc)


def test_schema_round_trip_on_bundled_domains():
    for name in ("pizzabot", "ticketbot"):
        schema = load_bundled_schema(name)
        again = parse_domain(serialize_domain(schema))
        assert serialize_domain(again) == serialize_domain(schema)


def test_bundled_data_files_in_sync_with_builders():
    """The shipped JSON artifacts must equal the builders' output
    (regenerate with ``python -m dialogkit.domains.export``)."""
    import importlib.resources as resources

    data = resources.files("dialogkit.domains") / "data"
    for name, mod in (("pizzabot", pizzabot), ("ticketbot", ticketbot)):
        schema = mod.schema()
        assert (data / f"{name}_schema.json").read_text(encoding="utf-8") == serialize_domain(schema)
        for which, dialogues in (("seeds", mod.seeds(schema)), ("challenge", mod.challenge(schema))):
            expected = "".join(serialize_dialogue(d) + "\n" for d in dialogues)
            assert (data / f"{name}_{which}.jsonl").read_text(encoding="utf-8") == expected


# --- dialogue parsing / validation -------------------------------------------


def _anaphora_doc():
    return {
        "dml_version": 1,
        "events": [
            {"kind": "nlg", "name": "welcome", "args": {}},
            {"kind": "end_turn"},
            {"kind": "user", "text": "how long is la la land",
             "annotations": [{"start": 3, "end": 6, "entity_type": "Movie", "variable": "mt1"}]},
            {"kind": "api", "name": "GetDuration", "args": {"movieTitle": {"var": "mt1"}}, "return": "d1"},
            {"kind": "nlg", "name": "inform_movie_duration",
             "args": {"duration": {"var": "d1"}, "movieTitle": {"var": "mt1"}}},
            {"kind": "end_turn"},
            {"kind": "user", "text": "who stars in it", "annotations": []},
            {"kind": "api", "name": "GetCast", "args": {"movieTitle": {"var": "mt1"}}, "return": "gcr1"},
            {"kind": "nlg", "name": "inform_movie_cast",
             "args": {"cast": {"var": "gcr1"}, "movieTitle": {"var": "mt1"}}},
            {"kind": "end_turn"},
            {"kind": "user", "text": "exit", "annotations": []},
            {"kind": "nlg", "name": "stop", "args": {}},
            {"kind": "end_dialogue"},
        ],
        "variables": {
            "mt1": {"entity_type": "Movie", "value": "la la land"},
            "d1": {"entity_type": "Duration", "value": "2 hours"},
            "gcr1": {"entity_type": "Cast", "value": "ryan gosling and emma stone"},
        },
    }


def test_parse_anaphora_dialogue():
    schema = ticketbot.schema()
    d = parse_dialogue(_anaphora_doc(), schema)
    kinds = [e.kind for e in d.events]
    assert kinds == ["nlg", "end_turn", "user", "api", "nlg", "end_turn",
                     "user", "api", "nlg", "end_turn", "user", "nlg", "end_dialogue"]
    # anaphora: second call reuses mt1 with zero annotated spans in its turn
    assert d.events[7].args["movieTitle"].var == "mt1"
    t = turns(d)
    assert t[0].user is None  # agent-only opening turn
    assert len(t) == 4


def test_use_before_definition_rejected():
    schema = ticketbot.schema()
    doc = _anaphora_doc()
    # swap: GetCast (uses mt1) happens before the utterance that defines it
    doc["events"], orig = doc["events"][:2] + doc["events"][6:], doc["events"]
    with pytest.raises(DialogueError) as err:
        parse_dialogue(doc, schema)
    assert err.value.finding.code == "use_before_definition"


def test_span_out_of_bounds_rejected():
    schema = ticketbot.schema()
    doc = _anaphora_doc()
    doc["events"][2]["annotations"][0]["end"] = 99
    with pytest.raises(DialogueError) as err:
        parse_dialogue(doc, schema)
    assert err.value.finding.code == "span_out_of_bounds"


def test_unknown_action_rejected():
    schema = ticketbot.schema()
    doc = _anaphora_doc()
    doc["events"][3]["name"] = "GetRuntime"
    with pytest.raises(DialogueError) as err:
        parse_dialogue(doc, schema)
    assert err.value.finding.code == "unknown_action"


def test_type_mismatch_flagged():
    schema = ticketbot.schema()
    doc = _anaphora_doc()
    # bind the Duration variable to the Movie-typed argument
    doc["events"][7]["args"]["movieTitle"] = {"var": "d1"}
    d_doc = json.loads(json.dumps(doc))
    with pytest.raises(DialogueError) as err:
        parse_dialogue(d_doc, schema)
    assert err.value.finding.code == "arg_type_mismatch"


def test_missing_required_arg_finding():
    schema = ticketbot.schema()
    doc = _anaphora_doc()
    del doc["events"][3]["args"]["movieTitle"]
    from dialogkit.dialogue import dialogue_from_json

    report = validate_dialogue(dialogue_from_json(doc), schema)
    assert any(f.code == "missing_required_argument" for f in report.findings)


def test_validate_accepts_all_bundled_dialogues():
    for name in ("pizzabot", "ticketbot"):
        schema = load_bundled_schema(name)
        for which in ("seeds", "challenge"):
            for d in load_bundled_corpus(name, which, schema):
                assert validate_dialogue(d, schema).ok


def test_dialogue_round_trip():
    schema = ticketbot.schema()
    d = parse_dialogue(_anaphora_doc(), schema)
    line = serialize_dialogue(d)
    again = parse_dialogue(line, schema)
    assert serialize_dialogue(again) == line
    assert again == d


def test_version_gate():
    doc = _anaphora_doc()
    doc["dml_version"] = 99
    with pytest.raises(DialogueError) as err:
        parse_dialogue(doc, ticketbot.schema())
    assert err.value.finding.code == "version_mismatch"


# --- reference resolution -----------------------------------------------------


def test_resolve_references_growth():
    schema = ticketbot.schema()
    d = parse_dialogue(_anaphora_doc(), schema)
    envs = resolve_references(d)
    assert envs[0]["variables"] == {}
    # after GetDuration (event 3) the environment holds mt1 and d1
    assert set(envs[4]["variables"]) == {"mt1", "d1"}
    # prefix monotone
    for i in range(len(d.events)):
        assert set(envs[i]["variables"]) <= set(envs[i + 1]["variables"])


def test_resolve_references_correction_shadows_slot():
    schema = pizzabot.schema()
    seed = pizzabot.seeds(schema)[1]  # corrects size large -> small
    envs = resolve_references(seed)
    final = envs[len(seed.events)]
    slot_var = final["slots"]["OrderPizza.size"]
    assert seed.variables[slot_var].value == "small"


def test_seed_arg_types_match_argdefs_exhaustively():
    for name in ("pizzabot", "ticketbot"):
        schema = load_bundled_schema(name)
        for d in load_bundled_corpus(name, "seeds", schema):
            for e in d.events:
                args = getattr(e, "args", None)
                if not args:
                    continue
                action = schema.action(e.name)
                for arg_name, binding in args.items():
                    arg = action.arg(arg_name)
                    for v in binding.referenced():
                        assert d.variables[v].entity_type == arg.entity_type
