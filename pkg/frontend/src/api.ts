// Thin fetch client for the dialogue service.

import type { SessionInfo, TurnResponse } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function decode<T>(response: Response): Promise<T> {
  const body = (await response.json().catch(() => null)) as Record<string, unknown> | null;
  if (!response.ok) {
    const code = (body?.code as string) ?? "http_error";
    const message = (body?.message as string) ?? `HTTP ${response.status}`;
    throw new ServiceError(response.status, code, message);
  }
  return body as T;
}

export async function createSession(serverUrl: string): Promise<SessionInfo> {
  const response = await fetch(`${serverUrl.replace(/\/$/, "")}/sessions`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({}),
  });
  return decode<SessionInfo>(response);
}

export async function sendUtterance(
  serverUrl: string,
  sessionId: string,
  utterance: string,
): Promise<TurnResponse> {
  const base = serverUrl.replace(/\/$/, "");
  const response = await fetch(`${base}/sessions/${sessionId}/utterances?debug=1`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ utterance }),
  });
  return decode<TurnResponse>(response);
}
