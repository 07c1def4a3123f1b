// Wire types mirroring the service's JSON contract. The client renders these
// verbatim and never re-derives model outputs.

export interface EntitySpan {
  start: number;
  end: number;
  entity_type: string;
  value: string;
}

export interface ExecutedAction {
  name: string;
  args: Record<string, unknown>;
}

export interface DebugStep {
  chosen: string;
  bin: string;
  distribution: Record<string, number>;
  bindings: Record<string, unknown> | null;
  pointer_scores?: Record<string, [string, number][]> | null;
}

export interface TurnResponse {
  agent_text: string;
  executed_actions: ExecutedAction[];
  entities: EntitySpan[];
  ended: boolean;
  debug?: {
    steps: DebugStep[];
    diagnostics: string[];
  };
}

export interface SessionInfo {
  session_id: string;
  welcome_text: string;
  ended: boolean;
}
