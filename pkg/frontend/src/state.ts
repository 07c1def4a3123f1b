// UI state as a pure function of the ordered event stream: replaying the
// captured events reproduces the exact view. No model logic lives here.

import type { DebugStep, EntitySpan, ExecutedAction, SessionInfo, TurnResponse } from "./types.js";

export interface TranscriptEntry {
  side: "user" | "agent";
  text: string;
  entities?: EntitySpan[];
  actions?: ExecutedAction[];
  steps?: DebugStep[];
  pending?: boolean;
  error?: string | null;
  at: number; // monotone sequence number, not wall clock
}

export interface ViewState {
  serverUrl: string;
  sessionId: string | null;
  entries: TranscriptEntry[];
  inFlight: boolean;
  ended: boolean;
  banner: string | null;
  seq: number;
}

export type ViewEvent =
  | { kind: "connect_failed"; message: string }
  | { kind: "session_started"; info: SessionInfo }
  | { kind: "utterance_sent"; text: string }
  | { kind: "turn_received"; response: TurnResponse }
  | { kind: "turn_failed"; message: string };

export function initialState(serverUrl: string): ViewState {
  return {
    serverUrl,
    sessionId: null,
    entries: [],
    inFlight: false,
    ended: false,
    banner: null,
    seq: 0,
  };
}

export function reduce(state: ViewState, event: ViewEvent): ViewState {
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
          { side: "agent", text: event.info.welcome_text, actions: [], steps: [], at: seq },
        ],
        seq,
      };
    case "utterance_sent":
      return {
        ...state,
        inFlight: true,
        entries: [...state.entries, { side: "user", text: event.text, pending: true, at: seq }],
        seq,
      };
    case "turn_received": {
      const entries = state.entries.map((e) =>
        e.pending ? { ...e, pending: false, entities: event.response.entities } : e,
      );
      entries.push({
        side: "agent",
        text: event.response.agent_text,
        actions: event.response.executed_actions,
        steps: event.response.debug?.steps ?? [],
        at: seq,
      });
      return { ...state, inFlight: false, ended: event.response.ended, entries, seq };
    }
    case "turn_failed": {
      const entries = state.entries.map((e) =>
        e.pending ? { ...e, pending: false, error: event.message } : e,
      );
      return { ...state, inFlight: false, entries, seq };
    }
  }
}

export function canSend(state: ViewState, draft: string): boolean {
  return (
    state.sessionId !== null && !state.inFlight && !state.ended && draft.trim().length > 0
  );
}

export function replay(serverUrl: string, events: ViewEvent[]): ViewState {
  return events.reduce(reduce, initialState(serverUrl));
}
