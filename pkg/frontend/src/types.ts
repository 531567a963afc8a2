// Wire types for the /v1/ session API.

export interface GenEvent {
  kind:
    | "node_added"
    | "edge_added"
    | "node_snapped"
    | "node_rejected"
    | "node_finished"
    | "queue_exhausted";
  step: number;
  id?: number;
  a?: number;
  b?: number;
  x?: number;
  y?: number;
  active?: number;
  snapped?: number;
  reason?: string;
  type?: string;
}

/** Canonical graph document: nodes [id, x, y]; edges [a, b, type?]. */
export interface GraphDoc {
  nodes: [number, number, number][];
  edges: (string | number)[][];
}

export interface StyleInfo {
  id: number;
  name: string;
}

export interface SessionInfo {
  session_id: string;
  status: string;
  nodes: number;
  edges: number;
  event_count: number;
}

export interface StepResult {
  status: string;
  steps_run: number;
  step_count: number;
  nodes: number;
  edges: number;
  event_count: number;
}

export type Point = [number, number];
