// DOM rendering: a full re-render of transcript + debug panel from ViewState.
// Entity spans are token ranges over a whitespace+punctuation split matching
// the server's tokenizer, highlighted with type badges.

import { canSend, type ViewState } from "./state.js";
import type { DebugStep, EntitySpan } from "./types.js";

const TOKEN_RE = /\w+|[^\w\s]/g;

interface Token {
  text: string;
  start: number;
  end: number;
}

function tokenize(text: string): Token[] {
  const out: Token[] = [];
  for (const m of text.matchAll(TOKEN_RE)) {
    out.push({ text: m[0], start: m.index ?? 0, end: (m.index ?? 0) + m[0].length });
  }
  return out;
}

function highlight(text: string, entities: EntitySpan[] | undefined): DocumentFragment {
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

function renderStep(step: DebugStep): HTMLElement {
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
  const top = Object.entries(step.distribution)
    .sort((a, b) => b[1] - a[1])
    .slice(0, 5);
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
    bind.textContent = Object.entries(step.bindings)
      .map(([k, v]) => `${k} = ${Array.isArray(v) ? v.join(", ") : String(v)}`)
      .join("  |  ");
    div.append(bind);
  }
  if (step.pointer_scores && Object.keys(step.pointer_scores).length > 0) {
    const ptr = document.createElement("div");
    ptr.className = "pointer";
    ptr.textContent = Object.entries(step.pointer_scores)
      .map(([arg, ranked]) => {
        const best = ranked
          .slice(0, 2)
          .map(([value, score]) => `${value} ${score.toFixed(1)}`)
          .join(", ");
        return `${arg}: ${best}`;
      })
      .join("   ");
    div.append(ptr);
  }
  return div;
}

export function render(state: ViewState, root: Document, draft: string): void {
  const transcript = root.getElementById("transcript")!;
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

  const debug = root.getElementById("debug")!;
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

  const banner = root.getElementById("banner")!;
  banner.textContent = state.banner ?? "";
  banner.classList.toggle("hidden", state.banner === null);

  const input = root.getElementById("utterance") as HTMLInputElement;
  const send = root.getElementById("send") as HTMLButtonElement;
  input.disabled = state.inFlight || state.ended || state.sessionId === null;
  send.disabled = !canSend(state, draft);
  const status = root.getElementById("status")!;
  status.className = state.sessionId ? (state.ended ? "ended" : "live") : "off";
  status.textContent = state.sessionId
    ? state.ended
      ? "conversation ended"
      : `session ${state.sessionId}`
    : "not connected";
}
