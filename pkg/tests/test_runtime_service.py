import json
import threading
import time

import numpy as np
import pytest
import requests

from dialogkit.dialogue import validate_dialogue
from dialogkit.models import save_bundle, load_bundle
from dialogkit.models.bundle import BundleError
from dialogkit.runtime import (
    ApiExecutor,
    RuntimeConfig,
    SessionEnded,
    create_session,
    handle_utterance,
)
from dialogkit.service import serve


def test_create_session_emits_welcome(small_pizza_bundle, pizza_schema):
    session = create_session(pizza_schema, small_pizza_bundle, seed=1)
    assert session.welcome_text.startswith("welcome")
    assert [e.kind for e in session.history.events] == ["nlg", "end_turn"]


def test_create_session_rejects_mismatched_schema(small_pizza_bundle, ticket_schema):
    with pytest.raises(BundleError):
        create_session(ticket_schema, small_pizza_bundle, seed=1)


def test_full_order_flow_and_history_validates(small_pizza_bundle, pizza_schema):
    session = create_session(pizza_schema, small_pizza_bundle, seed=3)
    r1 = handle_utterance(session, "i want a small pizza with olives")
    assert r1.executed[-1]["name"] in ("EndTurn", "EndDialogue")
    assert validate_dialogue(session.history, pizza_schema, partial=True).ok
    before = len(session.history.events)
    r2 = handle_utterance(session, "thin crust")
    assert len(session.history.events) > before
    assert validate_dialogue(session.history, pizza_schema, partial=True).ok


def test_dynamic_catalog_grows_monotonically(small_pizza_bundle, pizza_schema):
    session = create_session(pizza_schema, small_pizza_bundle, seed=3)
    sizes = []
    for utt in ("i want a small pizza with olives", "thin crust", "extra cheese"):
        handle_utterance(session, utt)
        catalog = session.dynamic_catalog()
        sizes.append(sum(len(v) for v in catalog.values()))
    assert sizes == sorted(sizes)


def test_session_ended_raises(small_pizza_bundle, pizza_schema):
    session = create_session(pizza_schema, small_pizza_bundle, seed=5)
    for utt in ("exit", "exit", "exit", "exit", "exit", "exit"):
        r = handle_utterance(session, utt)
        if r.ended:
            break
    else:
        pytest.fail("bundle never predicted EndDialogue for 'exit'")
    with pytest.raises(SessionEnded):
        handle_utterance(session, "hello?")


def test_replay_determinism(small_pizza_bundle, pizza_schema):
    outs = []
    for _ in range(2):
        session = create_session(pizza_schema, small_pizza_bundle, seed=42)
        transcript = []
        for utt in ("i want a large pizza with bacon", "thin crust", "extra cheese", "yes"):
            r = handle_utterance(session, utt)
            transcript.append((r.agent_text, tuple(e["name"] for e in r.executed)))
            if r.ended:
                break
        outs.append(transcript)
    assert outs[0] == outs[1]


def test_executor_handler_failure_routes_to_no_result(small_pizza_bundle, pizza_schema):
    def exploding(bindings):
        raise RuntimeError("api down")

    executor = ApiExecutor(pizza_schema, mode="mock", handlers={"OrderPizza": exploding},
                           rng=np.random.default_rng(0))
    session = create_session(pizza_schema, small_pizza_bundle, executor, seed=3)
    handle_utterance(session, "i want a small pizza with olives and bacon")
    handle_utterance(session, "thin crust")
    handle_utterance(session, "extra cheese")
    result = handle_utterance(session, "yes")
    names = [e["name"] for e in result.executed]
    if "OrderPizza" in names:
        idx = names.index("OrderPizza")
        assert result.executed[idx]["success"] is False
        assert result.executed[idx]["return"] is None
    assert validate_dialogue(session.history, pizza_schema, partial=True).ok


def test_action_cap_forces_end_turn(small_pizza_bundle, pizza_schema):
    session = create_session(pizza_schema, small_pizza_bundle,
                             config=RuntimeConfig(action_cap=1), seed=3)
    result = handle_utterance(session, "i want a small pizza with olives")
    assert result.executed[-1]["name"] == "EndTurn"
    assert any("cap" in d for d in result.diagnostics) or result.executed[-1]["name"] == "EndTurn"


# --- HTTP service -------------------------------------------------------------


@pytest.fixture()
def server(small_pizza_bundle, tmp_path):
    srv = serve(small_pizza_bundle, port=0, seed=9, log_dir=str(tmp_path / "logs"))
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    yield srv, f"http://127.0.0.1:{srv.server_port}"
    srv.shutdown_gracefully()
    thread.join(timeout=5)


def test_service_healthz(server):
    _srv, base = server
    r = requests.get(f"{base}/healthz", timeout=5)
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_service_session_lifecycle(server):
    _srv, base = server
    r = requests.post(f"{base}/sessions", json={}, timeout=5)
    assert r.status_code == 201
    doc = r.json()
    assert doc["welcome_text"]
    sid = doc["session_id"]

    r = requests.post(f"{base}/sessions/{sid}/utterances",
                      json={"utterance": "i want a small pizza with olives"}, timeout=30)
    assert r.status_code == 200
    body = r.json()
    assert body["agent_text"]
    assert body["executed_actions"][-1]["name"] in ("EndTurn", "EndDialogue")
    assert "debug" not in body

    r = requests.post(f"{base}/sessions/{sid}/utterances?debug=1",
                      json={"utterance": "thin crust"}, timeout=30)
    assert r.status_code == 200
    debug = r.json()["debug"]
    assert debug["steps"] and all(s["distribution"] for s in debug["steps"])

    r = requests.get(f"{base}/sessions/{sid}/log", timeout=5)
    assert r.status_code == 200
    assert r.json()["events"][0]["kind"] == "nlg"


def test_service_unknown_session_404_and_ended_410(server):
    _srv, base = server
    r = requests.post(f"{base}/sessions/ffffffffffff/utterances",
                      json={"utterance": "hi"}, timeout=5)
    assert r.status_code == 404
    assert r.json()["code"] == "unknown_session"

    sid = requests.post(f"{base}/sessions", json={}, timeout=5).json()["session_id"]
    ended = False
    for _ in range(6):
        body = requests.post(f"{base}/sessions/{sid}/utterances",
                             json={"utterance": "exit"}, timeout=30).json()
        if body.get("ended"):
            ended = True
            break
    assert ended
    r = requests.post(f"{base}/sessions/{sid}/utterances", json={"utterance": "hi"}, timeout=5)
    assert r.status_code == 410
    assert r.json()["code"] == "session_ended"


def test_service_bad_body_400(server):
    _srv, base = server
    sid = requests.post(f"{base}/sessions", json={}, timeout=5).json()["session_id"]
    r = requests.post(f"{base}/sessions/{sid}/utterances", json={}, timeout=5)
    assert r.status_code == 400


def test_service_concurrent_utterances_serialized(server):
    _srv, base = server
    sid = requests.post(f"{base}/sessions", json={}, timeout=5).json()["session_id"]
    results = []

    def send(utt):
        r = requests.post(f"{base}/sessions/{sid}/utterances",
                          json={"utterance": utt}, timeout=60)
        results.append(r.status_code)

    threads = [threading.Thread(target=send, args=(u,))
               for u in ("i want a small pizza with olives", "thin crust")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == [200, 200]
    log = requests.get(f"{base}/sessions/{sid}/log", timeout=5).json()
    user_events = [e for e in log["events"] if e["kind"] == "user"]
    assert len(user_events) == 2  # both turns applied, in some serialized order


def test_service_reload_from_log(small_pizza_bundle, tmp_path):
    log_dir = tmp_path / "logs2"
    srv = serve(small_pizza_bundle, port=0, seed=4, log_dir=str(log_dir))
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_port}"
    sid = requests.post(f"{base}/sessions", json={}, timeout=5).json()["session_id"]
    first = requests.post(f"{base}/sessions/{sid}/utterances",
                          json={"utterance": "i want a small pizza with olives"}, timeout=30).json()
    log_before = requests.get(f"{base}/sessions/{sid}/log", timeout=5).json()
    srv.shutdown_gracefully()
    thread.join(timeout=5)

    srv2 = serve(small_pizza_bundle, port=0, seed=4, log_dir=str(log_dir))
    try:
        slot = srv2.slots[sid]
        from dialogkit.dialogue import dialogue_to_json

        assert dialogue_to_json(slot.session.history) == {
            k: v for k, v in log_before.items() if k in ("dml_version", "events", "variables")
        }
    finally:
        srv2.server_close()
