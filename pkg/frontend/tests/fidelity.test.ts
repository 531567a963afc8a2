import { describe, expect, it } from "vitest";

import type { GraphDoc, Point } from "../src/types";
import fixture from "./fixtures/session50.json";

// Sketch fidelity: the server seed built from the "+" sketch must overlay
// the drawn strokes within 1 px at the 1 m/px calibration.

function pointSegmentDistance(p: Point, a: Point, b: Point): number {
  const dx = b[0] - a[0];
  const dy = b[1] - a[1];
  const s2 = dx * dx + dy * dy;
  if (s2 === 0) return Math.hypot(p[0] - a[0], p[1] - a[1]);
  let t = ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / s2;
  t = Math.max(0, Math.min(1, t));
  return Math.hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

function distanceToStrokes(p: Point, strokes: Point[][]): number {
  let best = Infinity;
  for (const stroke of strokes) {
    for (let i = 1; i < stroke.length; i++) {
      best = Math.min(best, pointSegmentDistance(p, stroke[i - 1], stroke[i]));
    }
  }
  return best;
}

describe("sketch fidelity", () => {
  const strokes = fixture.request.strokes as Point[][];
  const seed = fixture.seed_graph as GraphDoc;

  it("every seed node lies within 1 px of the sketch at 1 m/px", () => {
    const nodes = new Map<number, Point>();
    for (const [id, x, y] of seed.nodes) nodes.set(id, [x, y]);
    for (const [, p] of nodes) {
      expect(distanceToStrokes(p, strokes)).toBeLessThanOrEqual(1.0);
    }
  });

  it("seed edges sampled along their length stay within 1 px", () => {
    const nodes = new Map<number, Point>();
    for (const [id, x, y] of seed.nodes) nodes.set(id, [x, y]);
    for (const edge of seed.edges) {
      const a = nodes.get(edge[0] as number)!;
      const b = nodes.get(edge[1] as number)!;
      for (let t = 0; t <= 1.0001; t += 0.25) {
        const p: Point = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        expect(distanceToStrokes(p, strokes)).toBeLessThanOrEqual(1.0);
      }
    }
  });

  it("the seed covers the sketch (no arm dropped)", () => {
    const nodes = new Map<number, Point>();
    for (const [id, x, y] of seed.nodes) nodes.set(id, [x, y]);
    const tips: Point[] = [
      [-80, 0],
      [80, 0],
      [0, -80],
      [0, 80],
    ];
    for (const tip of tips) {
      let best = Infinity;
      for (const edge of seed.edges) {
        const a = nodes.get(edge[0] as number)!;
        const b = nodes.get(edge[1] as number)!;
        best = Math.min(best, pointSegmentDistance(tip, a, b));
      }
      expect(best).toBeLessThanOrEqual(1.0);
    }
  });
});
