import { describe, expect, it } from "vitest";

import { Viewport } from "../src/transform";
import type { Point } from "../src/types";

describe("viewport transform", () => {
  it("round-trips meters through canvas space", () => {
    const view = new Viewport(800, 600, 1.0);
    view.centerX = 123.4;
    view.centerY = -56.7;
    view.metersPerPixel = 2.5;
    const points: Point[] = [
      [0, 0],
      [100, -250],
      [-431.25, 77.5],
    ];
    for (const p of points) {
      const [mx, my] = view.toMeters(view.toCanvas(p));
      expect(mx).toBeCloseTo(p[0], 9);
      expect(my).toBeCloseTo(p[1], 9);
    }
  });

  it("maps canvas center to the viewport center with y flipped", () => {
    const view = new Viewport(400, 400, 1.0);
    expect(view.toCanvas([0, 0])).toEqual([200, 200]);
    expect(view.toCanvas([0, 10])).toEqual([200, 190]); // north is up
  });

  it("pan shifts the world opposite the drag", () => {
    const view = new Viewport(400, 400, 2.0);
    const before = view.toMeters([100, 100]);
    view.panPixels(50, -30);
    const after = view.toMeters([150, 70]);
    expect(after[0]).toBeCloseTo(before[0], 9);
    expect(after[1]).toBeCloseTo(before[1], 9);
  });

  it("zoomAt keeps the anchor point fixed", () => {
    const view = new Viewport(640, 480, 1.0);
    view.centerX = 50;
    const anchor: Point = [120, 300];
    const before = view.toMeters(anchor);
    view.zoomAt(anchor, 2.0);
    const after = view.toMeters(anchor);
    expect(after[0]).toBeCloseTo(before[0], 9);
    expect(after[1]).toBeCloseTo(before[1], 9);
    expect(view.metersPerPixel).toBeCloseTo(2.0, 9);
  });

  it("fitBounds contains the box", () => {
    const view = new Viewport(800, 600, 1.0);
    view.fitBounds(-100, -50, 300, 450);
    const [x0, y1] = view.toCanvas([-100, -50]);
    const [x1, y0] = view.toCanvas([300, 450]);
    for (const v of [x0, x1]) expect(v).toBeGreaterThanOrEqual(0);
    for (const v of [x0, x1]) expect(v).toBeLessThanOrEqual(800);
    for (const v of [y0, y1]) expect(v).toBeGreaterThanOrEqual(0);
    for (const v of [y0, y1]) expect(v).toBeLessThanOrEqual(600);
  });
});
