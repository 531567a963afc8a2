// Viewport: an invertible meters <-> pixels transform with pan and zoom.
// Default calibration is 1 m/px so sketching matches the model resolution.

import type { Point } from "./types";

export class Viewport {
  metersPerPixel: number;
  centerX: number; // meters at the canvas center
  centerY: number;
  width: number; // canvas size in pixels
  height: number;

  constructor(width: number, height: number, metersPerPixel = 1.0) {
    this.width = width;
    this.height = height;
    this.metersPerPixel = metersPerPixel;
    this.centerX = 0;
    this.centerY = 0;
  }

  /** meters -> canvas pixels (y up in meters, y down on canvas). */
  toCanvas([mx, my]: Point): Point {
    return [
      this.width / 2 + (mx - this.centerX) / this.metersPerPixel,
      this.height / 2 - (my - this.centerY) / this.metersPerPixel,
    ];
  }

  /** canvas pixels -> meters; exact inverse of toCanvas. */
  toMeters([px, py]: Point): Point {
    return [
      this.centerX + (px - this.width / 2) * this.metersPerPixel,
      this.centerY - (py - this.height / 2) * this.metersPerPixel,
    ];
  }

  panPixels(dxPx: number, dyPx: number): void {
    this.centerX -= dxPx * this.metersPerPixel;
    this.centerY += dyPx * this.metersPerPixel;
  }

  /** Zoom by factor keeping the metric point under `anchor` pixels fixed. */
  zoomAt(anchor: Point, factor: number): void {
    const before = this.toMeters(anchor);
    this.metersPerPixel = Math.min(64, Math.max(1 / 64, this.metersPerPixel * factor));
    const after = this.toMeters(anchor);
    this.centerX += before[0] - after[0];
    this.centerY += before[1] - after[1];
  }

  /** Center the viewport on a metric bounding box with a margin. */
  fitBounds(minX: number, minY: number, maxX: number, maxY: number): void {
    this.centerX = (minX + maxX) / 2;
    this.centerY = (minY + maxY) / 2;
    const spanX = (maxX - minX) || 1;
    const spanY = (maxY - minY) || 1;
    this.metersPerPixel = Math.max(
      spanX / (this.width * 0.9),
      spanY / (this.height * 0.9),
      1 / 64,
    );
  }
}
