"""HTTP front door for live sessions.

Endpoints (JSON bodies, UTF-8):
  POST /sessions                      -> {session_id, welcome_text, ended}
  POST /sessions/{id}/utterances      -> TurnResponse
  GET  /sessions/{id}/log             -> {events: [...]}
  GET  /healthz                       -> {status: "ok"}

Errors come back as {code, message}. Concurrent utterances to one session are
serialized by a per-session lock. Sessions persist as append-only JSON Lines
event logs and are rebuilt by replaying the logged user utterances, which is
deterministic for a fixed seed.
"""

from __future__ import annotations

import json
import re
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .dialogue import dialogue_to_json
from .models.bundle import ModelBundle
from .runtime import (
    ApiExecutor,
    RuntimeConfig,
    Session,
    SessionEnded,
    create_session,
    handle_utterance,
)

_UTTER_RE = re.compile(r"^/sessions/([0-9a-f]+)/utterances$")
_LOG_RE = re.compile(r"^/sessions/([0-9a-f]+)/log$")


@dataclass
class _SessionSlot:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    log_path: Path | None = None


class DialogueService(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bundle: ModelBundle, host: str = "127.0.0.1", port: int = 0,
                 seed: int = 0, log_dir: str | None = None,
                 runtime_config: RuntimeConfig | None = None):
        super().__init__((host, port), _Handler)
        self.bundle = bundle
        self.seed = seed
        self.runtime_config = runtime_config or RuntimeConfig()
        self.log_dir = Path(log_dir) if log_dir else None
        self.slots: dict[str, _SessionSlot] = {}
        self._counter = 0
        self._registry_lock = threading.Lock()
        self._draining = False
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self._reload_sessions()

    # --------------------------------------------------------------- session

    def open_session(self) -> _SessionSlot:
        with self._registry_lock:
            self._counter += 1
            session_seed = self.seed * 100_003 + self._counter
        executor = ApiExecutor(self.bundle.schema,
                               rng=np.random.default_rng([session_seed, 404]))
        session = create_session(self.bundle.schema, self.bundle, executor,
                                 self.runtime_config, seed=session_seed)
        slot = _SessionSlot(session=session)
        if self.log_dir is not None:
            slot.log_path = self.log_dir / f"{session.session_id}.jsonl"
            with slot.log_path.open("w", encoding="utf-8") as f:
                f.write(json.dumps({"meta": {"session_id": session.session_id,
                                             "seed": session_seed,
                                             "fingerprint": self.bundle.fingerprint}}) + "\n")
        with self._registry_lock:
            self.slots[session.session_id] = slot
        return slot

    def _reload_sessions(self) -> None:
        for path in sorted(self.log_dir.glob("*.jsonl")):
            try:
                lines = [json.loads(l) for l in path.read_text(encoding="utf-8").splitlines() if l.strip()]
            except json.JSONDecodeError:
                continue
            if not lines or "meta" not in lines[0]:
                continue
            meta = lines[0]["meta"]
            if meta.get("fingerprint") != self.bundle.fingerprint:
                continue
            executor = ApiExecutor(self.bundle.schema,
                                   rng=np.random.default_rng([meta["seed"], 404]))
            session = create_session(self.bundle.schema, self.bundle, executor,
                                     self.runtime_config, seed=meta["seed"],
                                     session_id=meta["session_id"])
            for row in lines[1:]:
                if row.get("kind") == "user_turn" and session.status == "active":
                    handle_utterance(session, row["utterance"])
            self.slots[session.session_id] = _SessionSlot(session=session, log_path=path)
            self._counter = max(self._counter, meta.get("seed", 0) - self.seed * 100_003)

    def append_log(self, slot: _SessionSlot, record: dict) -> None:
        if slot.log_path is None:
            return
        with slot.log_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")

    def shutdown_gracefully(self) -> None:
        """Stop accepting requests, let in-flight turns finish."""
        self._draining = True
        for slot in list(self.slots.values()):
            slot.lock.acquire()
            slot.lock.release()
        self.shutdown()


class _Handler(BaseHTTPRequestHandler):
    server: DialogueService

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, code: str, message: str) -> None:
        self._send(status, {"code": code, "message": message})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if not length:
            return {}
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise ValueError("body must be UTF-8 JSON")

    def do_OPTIONS(self):  # CORS preflight for the browser client
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        if self.path == "/healthz":
            self._send(200, {"status": "ok"})
            return
        m = _LOG_RE.match(self.path.split("?")[0])
        if m:
            slot = self.server.slots.get(m.group(1))
            if slot is None:
                self._error(404, "unknown_session", "no such session")
                return
            doc = dialogue_to_json(slot.session.history)
            self._send(200, {"session_id": slot.session.session_id,
                             "status": slot.session.status, **doc})
            return
        self._error(404, "not_found", f"no route for {self.path}")

    def do_POST(self):
        if self.server._draining:
            self._error(503, "draining", "service is shutting down")
            return
        path, _, query = self.path.partition("?")
        debug = "debug=1" in query
        try:
            body = self._read_body()
        except ValueError as e:
            self._error(400, "bad_request", str(e))
            return
        if path == "/sessions":
            slot = self.server.open_session()
            self._send(201, {"session_id": slot.session.session_id,
                             "welcome_text": slot.session.welcome_text,
                             "ended": False})
            return
        m = _UTTER_RE.match(path)
        if m:
            slot = self.server.slots.get(m.group(1))
            if slot is None:
                self._error(404, "unknown_session", "no such session")
                return
            utterance = body.get("utterance")
            if not isinstance(utterance, str) or not utterance.strip():
                self._error(400, "bad_request", "body needs a non-empty 'utterance'")
                return
            debug = debug or bool(body.get("debug"))
            with slot.lock:
                if slot.session.status != "active":
                    self._error(410, "session_ended", "conversation has ended")
                    return
                try:
                    result = handle_utterance(slot.session, utterance)
                except SessionEnded:
                    self._error(410, "session_ended", "conversation has ended")
                    return
            response = {
                "agent_text": result.agent_text,
                "executed_actions": [
                    {"name": e["name"], "args": e["args"]} for e in result.executed
                ],
                "entities": result.mentions,
                "ended": result.ended,
            }
            if debug:
                response["debug"] = {
                    "steps": [
                        {"chosen": s.chosen, "bin": s.bin,
                         "distribution": s.distribution, "bindings": s.bindings,
                         "pointer_scores": s.pointer_scores}
                        for s in result.steps
                    ],
                    "diagnostics": result.diagnostics,
                }
            self.server.append_log(slot, {"kind": "user_turn", "ts": time.time(),
                                          "utterance": utterance, "response": response})
            self._send(200, response)
            return
        self._error(404, "not_found", f"no route for {path}")


def serve(bundle: ModelBundle, port: int = 0, host: str = "127.0.0.1", seed: int = 0,
          log_dir: str | None = None, runtime_config: RuntimeConfig | None = None) -> DialogueService:
    """Create a service bound to ``port`` (0 picks a free one); caller runs
    ``serve_forever`` or drives it from a thread."""
    return DialogueService(bundle, host=host, port=port, seed=seed, log_dir=log_dir,
                           runtime_config=runtime_config)
