// Wiring: one in-flight request per view; every service response feeds the
// pure reducer and the view re-renders from state.

import { createSession, sendUtterance, ServiceError } from "./api.js";
import { initialState, reduce, type ViewEvent, type ViewState } from "./state.js";
import { render } from "./render.js";

export interface App {
  state: ViewState;
  start: (serverUrl: string) => Promise<void>;
  send: (text: string) => Promise<void>;
  events: ViewEvent[];
}

export function createApp(root: Document): App {
  const input = root.getElementById("utterance") as HTMLInputElement;
  const app: App = {
    state: initialState(""),
    events: [],
    async start(serverUrl: string) {
      app.state = initialState(serverUrl);
      try {
        const info = await createSession(serverUrl);
        dispatch({ kind: "session_started", info });
      } catch (err) {
        dispatch({
          kind: "connect_failed",
          message: err instanceof Error ? `cannot reach server: ${err.message}` : "cannot reach server",
        });
      }
    },
    async send(text: string) {
      const utterance = text.trim();
      if (!utterance || app.state.inFlight || app.state.ended || !app.state.sessionId) return;
      dispatch({ kind: "utterance_sent", text: utterance });
      try {
        const response = await sendUtterance(app.state.serverUrl, app.state.sessionId, utterance);
        dispatch({ kind: "turn_received", response });
      } catch (err) {
        const message =
          err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
        dispatch({ kind: "turn_failed", message });
      }
    },
  };

  function dispatch(event: ViewEvent): void {
    app.events.push(event);
    app.state = reduce(app.state, event);
    render(app.state, root, input?.value ?? "");
  }

  return app;
}

export function mount(root: Document): App {
  const app = createApp(root);
  const form = root.getElementById("composer") as HTMLFormElement;
  const input = root.getElementById("utterance") as HTMLInputElement;
  const connect = root.getElementById("connect") as HTMLButtonElement;
  const url = root.getElementById("server-url") as HTMLInputElement;

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

declare global {
  interface Window {
    dialogkitApp?: App;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("composer")) {
  window.dialogkitApp = mount(document);
}
