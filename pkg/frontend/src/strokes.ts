// Sketch capture: strokes held in meters, resampled to the model resolution.

import type { Point } from "./types";

export const MIN_SPACING_M = 1.0;

function dist(a: Point, b: Point): number {
  return Math.hypot(b[0] - a[0], b[1] - a[1]);
}

/** Keep points at least `spacing` apart; endpoints survive. */
export function resampleStroke(points: Point[], spacing = MIN_SPACING_M): Point[] {
  const out: Point[] = [];
  for (const p of points) {
    if (out.length === 0 || dist(out[out.length - 1], p) >= spacing) {
      out.push([p[0], p[1]]);
    }
  }
  if (points.length >= 2) {
    const last = points[points.length - 1];
    const kept = out[out.length - 1];
    const gap = dist(kept, last);
    if (gap >= spacing / 2) {
      out.push([last[0], last[1]]);
    } else if (gap > 1e-9) {
      out[out.length - 1] = [last[0], last[1]];
    }
  }
  return out;
}

export class StrokeStore {
  strokes: Point[][] = [];
  private pending: Point[] | null = null;

  beginStroke(p: Point): void {
    this.pending = [[p[0], p[1]]];
  }

  extendStroke(p: Point): void {
    if (this.pending) this.pending.push([p[0], p[1]]);
  }

  /** Finish the active stroke. Degenerate strokes are discarded. */
  endStroke(): Point[] | null {
    if (!this.pending) return null;
    const stroke = resampleStroke(this.pending);
    this.pending = null;
    if (stroke.length < 2) return null;
    this.strokes.push(stroke);
    return stroke;
  }

  activeStroke(): Point[] | null {
    return this.pending;
  }

  undo(): boolean {
    return this.strokes.pop() !== undefined;
  }

  clear(): void {
    this.strokes = [];
    this.pending = null;
  }

  totalLength(): number {
    let total = 0;
    for (const stroke of this.strokes) {
      for (let i = 1; i < stroke.length; i++) {
        total += dist(stroke[i - 1], stroke[i]);
      }
    }
    return total;
  }
}
