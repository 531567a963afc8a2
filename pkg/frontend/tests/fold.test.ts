import { describe, expect, it } from "vitest";

import { GraphState, applyEvent, edgeKey, foldEvents, fromGraphDoc, sameGraph } from "../src/fold";
import type { GenEvent, GraphDoc } from "../src/types";
import fixture from "./fixtures/session50.json";

const events = fixture.events as GenEvent[];
const graphDoc = fixture.graph as GraphDoc;

describe("event folding", () => {
  it("applies node and edge events", () => {
    const state = new GraphState();
    applyEvent(state, { kind: "node_added", step: 0, id: 3, x: 1.5, y: -2 });
    applyEvent(state, { kind: "node_added", step: 0, id: 7, x: 0, y: 0 });
    applyEvent(state, { kind: "edge_added", step: 1, a: 7, b: 3 });
    expect(state.nodeCount()).toBe(2);
    expect(state.edges.has(edgeKey(3, 7))).toBe(true);
    expect(state.lastEventIndex).toBe(3);
  });

  it("tracks snap and reject flashes without touching geometry", () => {
    const state = new GraphState();
    applyEvent(state, { kind: "node_added", step: 0, id: 0, x: 0, y: 0 });
    applyEvent(state, { kind: "node_rejected", step: 2, active: 0, x: 5, y: 5, reason: "angle" });
    applyEvent(state, { kind: "node_snapped", step: 3, active: 0, snapped: 0, x: 1, y: 1 });
    expect(state.nodeCount()).toBe(1);
    expect(state.edgeCount()).toBe(0);
    expect(state.flashes.map((f) => f.kind)).toEqual(["reject", "snap"]);
  });

  it("replays the recorded 50-step session to the exact server graph", () => {
    const folded = foldEvents(events);
    const snapshot = fromGraphDoc(graphDoc, events.length);
    expect(folded.nodeCount()).toBe(graphDoc.nodes.length);
    expect(folded.edgeCount()).toBe(graphDoc.edges.length);
    expect(sameGraph(folded, snapshot)).toBe(true);
  });

  it("resync from the snapshot converges to the folded state", () => {
    // simulate a dropped channel at an arbitrary point: fold a prefix, then
    // replace with the snapshot, then continue folding the tail
    const cut = Math.floor(events.length / 3);
    foldEvents(events.slice(0, cut)); // state lost with the dropped channel
    const resynced = fromGraphDoc(graphDoc, events.length);
    const reference = foldEvents(events);
    expect(sameGraph(resynced, reference)).toBe(true);
  });

  it("step responses agree with the folded prefix at every boundary", () => {
    const state = new GraphState();
    let cursor = 0;
    for (const step of fixture.steps as { event_count: number; nodes: number; edges: number }[]) {
      while (cursor < step.event_count) {
        applyEvent(state, events[cursor]);
        cursor += 1;
      }
      expect(state.nodeCount()).toBe(step.nodes);
      expect(state.edgeCount()).toBe(step.edges);
    }
  });
});
