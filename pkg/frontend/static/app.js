// src/api.ts
var ServiceError = class extends Error {
  constructor(status, code, message) {
    super(message);
    this.status = status;
    this.code = code;
  }
  status;
  code;
};
async function decode(response) {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const code = body?.code ?? "http_error";
    const message = body?.message ?? `HTTP ${response.status}`;
    throw new ServiceError(response.status, code, message);
  }
  return body;
}
async function createSession(serverUrl) {
  const response = await fetch(`${serverUrl.replace(/\/$/, "")}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({})
  });
  return decode(response);
}
async function sendUtterance(serverUrl, sessionId, utterance) {
  const base = serverUrl.replace(/\/$/, "");
  const response = await fetch(`${base}/sessions/${sessionId}/utterances?debug=1`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ utterance })
  });
  return decode(response);
}

// src/state.ts
function initialState(serverUrl) {
  return {
    serverUrl,
    sessionId: null,
    entries: [],
    inFlight: false,
    ended: false,
    banner: null,
    seq: 0
  };
}
function reduce(state, event) {
  const seq = state.seq + 1;
  switch (event.kind) {
    case "connect_failed":
      return { ...state, banner: event.message, sessionId: null, seq };
    case "session_started":
      return {
        ...state,
        banner: null,
        sessionId: event.info.session_id,
        ended: event.info.ended,
        entries: [
          { side: "agent", text: event.info.welcome_text, actions: [], steps: [], at: seq }
        ],
        seq
      };
    case "utterance_sent":
      return {
        ...state,
        inFlight: true,
        entries: [...state.entries, { side: "user", text: event.text, pending: true, at: seq }],
        seq
      };
    case "turn_received": {
      const entries = state.entries.map(
        (e) => e.pending ? { ...e, pending: false, entities: event.response.entities } : e
      );
      entries.push({
        side: "agent",
        text: event.response.agent_text,
        actions: event.response.executed_actions,
        steps: event.response.debug?.steps ?? [],
        at: seq
      });
      return { ...state, inFlight: false, ended: event.response.ended, entries, seq };
    }
    case "turn_failed": {
      const entries = state.entries.map(
        (e) => e.pending ? { ...e, pending: false, error: event.message } : e
      );
      return { ...state, inFlight: false, entries, seq };
    }
  }
}
function canSend(state, draft) {
  return state.sessionId !== null && !state.inFlight && !state.ended && draft.trim().length > 0;
}

// src/render.ts
var TOKEN_RE = /\w+|[^\w\s]/g;
function tokenize(text) {
  const out = [];
  for (const m of text.matchAll(TOKEN_RE)) {
    out.push({ text: m[0], start: m.index ?? 0, end: (m.index ?? 0) + m[0].length });
  }
  return out;
}
function highlight(text, entities) {
  const frag = document.createDocumentFragment();
  if (!entities || entities.length === 0) {
    frag.append(text);
    return frag;
  }
  const tokens = tokenize(text);
  const sorted = [...entities].sort((a, b) => a.start - b.start);
  let cursor = 0;
  for (const span of sorted) {
    if (span.start >= tokens.length) continue;
    const startChar = tokens[span.start].start;
    const endChar = tokens[Math.min(span.end, tokens.length) - 1].end;
    if (startChar > cursor) frag.append(text.slice(cursor, startChar));
    const mark = document.createElement("mark");
    mark.className = "entity";
    mark.textContent = text.slice(startChar, endChar);
    const badge = document.createElement("span");
    badge.className = "badge";
    badge.textContent = span.entity_type;
    mark.append(badge);
    frag.append(mark);
    cursor = endChar;
  }
  if (cursor < text.length) frag.append(text.slice(cursor));
  return frag;
}
function renderStep(step) {
  const div = document.createElement("div");
  div.className = "step";
  const head = document.createElement("div");
  head.className = "step-head";
  head.textContent = `${step.chosen}`;
  const bin = document.createElement("span");
  bin.className = `bin bin-${step.bin}`;
  bin.textContent = step.bin;
  head.append(" ", bin);
  div.append(head);
  const dist = document.createElement("div");
  dist.className = "dist";
  const top = Object.entries(step.distribution).sort((a, b) => b[1] - a[1]).slice(0, 5);
  for (const [name, p] of top) {
    const row = document.createElement("div");
    row.className = "dist-row";
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${Math.max(2, Math.round(p * 100))}px`;
    const label = document.createElement("span");
    label.textContent = ` ${name} ${(p * 100).toFixed(1)}%`;
    row.append(bar, label);
    dist.append(row);
  }
  div.append(dist);
  if (step.bindings && Object.keys(step.bindings).length > 0) {
    const bind = document.createElement("div");
    bind.className = "bindings";
    bind.textContent = Object.entries(step.bindings).map(([k, v]) => `${k} = ${Array.isArray(v) ? v.join(", ") : String(v)}`).join("  |  ");
    div.append(bind);
  }
  if (step.pointer_scores && Object.keys(step.pointer_scores).length > 0) {
    const ptr = document.createElement("div");
    ptr.className = "pointer";
    ptr.textContent = Object.entries(step.pointer_scores).map(([arg, ranked]) => {
      const best = ranked.slice(0, 2).map(([value, score]) => `${value} ${score.toFixed(1)}`).join(", ");
      return `${arg}: ${best}`;
    }).join("   ");
    div.append(ptr);
  }
  return div;
}
function render(state, root, draft) {
  const transcript = root.getElementById("transcript");
  transcript.replaceChildren();
  for (const entry of state.entries) {
    const div = root.createElement("div");
    div.className = `entry ${entry.side}${entry.pending ? " pending" : ""}${entry.error ? " failed" : ""}`;
    const text = root.createElement("div");
    text.className = "text";
    text.append(highlight(entry.text, entry.entities));
    div.append(text);
    if (entry.side === "agent" && entry.actions && entry.actions.length > 0) {
      const chips = root.createElement("div");
      chips.className = "actions";
      for (const action of entry.actions) {
        const chip = root.createElement("span");
        chip.className = "chip";
        chip.textContent = action.name;
        chips.append(chip);
      }
      div.append(chips);
    }
    if (entry.error) {
      const err = root.createElement("div");
      err.className = "entry-error";
      err.textContent = `failed: ${entry.error} (press send to retry)`;
      div.append(err);
    }
    transcript.append(div);
  }
  const debug = root.getElementById("debug");
  debug.replaceChildren();
  for (const entry of state.entries) {
    if (entry.side !== "agent" || !entry.steps || entry.steps.length === 0) continue;
    const block = root.createElement("div");
    block.className = "debug-turn";
    for (const step of entry.steps) {
      block.append(renderStep(step));
    }
    debug.append(block);
  }
  const banner = root.getElementById("banner");
  banner.textContent = state.banner ?? "";
  banner.classList.toggle("hidden", state.banner === null);
  const input = root.getElementById("utterance");
  const send = root.getElementById("send");
  input.disabled = state.inFlight || state.ended || state.sessionId === null;
  send.disabled = !canSend(state, draft);
  const status = root.getElementById("status");
  status.className = state.sessionId ? state.ended ? "ended" : "live" : "off";
  status.textContent = state.sessionId ? state.ended ? "conversation ended" : `session ${state.sessionId}` : "not connected";
}

// src/main.ts
function createApp(root) {
  const input = root.getElementById("utterance");
  const app = {
    state: initialState(""),
    events: [],
    async start(serverUrl) {
      app.state = initialState(serverUrl);
      try {
        const info = await createSession(serverUrl);
        dispatch({ kind: "session_started", info });
      } catch (err) {
        dispatch({
          kind: "connect_failed",
          message: err instanceof Error ? `cannot reach server: ${err.message}` : "cannot reach server"
        });
      }
    },
    async send(text) {
      const utterance = text.trim();
      if (!utterance || app.state.inFlight || app.state.ended || !app.state.sessionId) return;
      dispatch({ kind: "utterance_sent", text: utterance });
      try {
        const response = await sendUtterance(app.state.serverUrl, app.state.sessionId, utterance);
        dispatch({ kind: "turn_received", response });
      } catch (err) {
        const message = err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
        dispatch({ kind: "turn_failed", message });
      }
    }
  };
  function dispatch(event) {
    app.events.push(event);
    app.state = reduce(app.state, event);
    render(app.state, root, input?.value ?? "");
  }
  return app;
}
function mount(root) {
  const app = createApp(root);
  const form = root.getElementById("composer");
  const input = root.getElementById("utterance");
  const connect = root.getElementById("connect");
  const url = root.getElementById("server-url");
  connect.addEventListener("click", () => void app.start(url.value));
  form.addEventListener("submit", (e) => {
    e.preventDefault();
    const text = input.value;
    input.value = "";
    void app.send(text);
  });
  input.addEventListener("input", () => render(app.state, root, input.value));
  render(app.state, root, "");
  return app;
}
if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("composer")) {
  window.dialogkitApp = mount(document);
}
export {
  createApp,
  mount
};
