// Client graph state is a pure fold over the server's event stream.
// Geometry is never invented locally; a resync replaces the fold's result
// with the server snapshot, and the two agree at every step boundary.

import type { GenEvent, GraphDoc, Point } from "./types";

export interface Flash {
  kind: "snap" | "reject";
  at: Point;
  step: number;
}

export class GraphState {
  nodes = new Map<number, Point>();
  edges = new Map<string, string | null>(); // "a:b" (a<b) -> road type
  flashes: Flash[] = [];
  lastEventIndex = 0;

  nodeCount(): number {
    return this.nodes.size;
  }

  edgeCount(): number {
    return this.edges.size;
  }
}

export function edgeKey(a: number, b: number): string {
  return a < b ? `${a}:${b}` : `${b}:${a}`;
}

export function applyEvent(state: GraphState, ev: GenEvent): void {
  switch (ev.kind) {
    case "node_added":
      state.nodes.set(ev.id!, [ev.x!, ev.y!]);
      break;
    case "edge_added":
      state.edges.set(edgeKey(ev.a!, ev.b!), ev.type ?? null);
      break;
    case "node_snapped":
      state.flashes.push({ kind: "snap", at: [ev.x!, ev.y!], step: ev.step });
      break;
    case "node_rejected":
      state.flashes.push({ kind: "reject", at: [ev.x!, ev.y!], step: ev.step });
      break;
    case "node_finished":
    case "queue_exhausted":
      break;
  }
  state.lastEventIndex += 1;
  if (state.flashes.length > 64) state.flashes.splice(0, state.flashes.length - 64);
}

export function foldEvents(events: GenEvent[], into?: GraphState): GraphState {
  const state = into ?? new GraphState();
  for (const ev of events) applyEvent(state, ev);
  return state;
}

/** Rebuild state from a canonical graph snapshot (reconnect resync). */
export function fromGraphDoc(doc: GraphDoc, lastEventIndex: number): GraphState {
  const state = new GraphState();
  for (const [id, x, y] of doc.nodes) {
    state.nodes.set(id, [x, y]);
  }
  for (const edge of doc.edges) {
    const a = edge[0] as number;
    const b = edge[1] as number;
    state.edges.set(edgeKey(a, b), (edge[2] as string) ?? null);
  }
  state.lastEventIndex = lastEventIndex;
  return state;
}

/** Structural agreement check used by the replay/resync contract tests. */
export function sameGraph(a: GraphState, b: GraphState): boolean {
  if (a.nodeCount() !== b.nodeCount() || a.edgeCount() !== b.edgeCount()) {
    return false;
  }
  for (const [id, [x, y]] of a.nodes) {
    const other = b.nodes.get(id);
    if (!other) return false;
    // event coordinates carry 3 decimals, snapshots likewise
    if (Math.abs(other[0] - x) > 1e-9 || Math.abs(other[1] - y) > 1e-9) return false;
  }
  for (const key of a.edges.keys()) {
    if (!b.edges.has(key)) return false;
  }
  return true;
}
