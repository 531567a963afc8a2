// Canvas rendering: background grid, frozen previous layers, live graph,
// sketch strokes, and short-lived snap/reject flashes.

import type { GraphState } from "./fold";
import type { Point } from "./types";
import type { Viewport } from "./transform";

const COLORS = {
  background: "#10141a",
  grid: "#1c2330",
  stroke: "#7fd3ff",
  activeStroke: "#b7e7ff",
  road: "#e8e2d5",
  major: "#ffb454",
  ghost: "#3a4150",
  snap: "#7dff9a",
  reject: "#ff5d5d",
  node: "#9aa3b2",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  graph: GraphState | null,
  ghosts: GraphState[],
  strokes: Point[][],
  activeStroke: Point[] | null,
  currentStep: number,
): void {
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, view.width, view.height);
  drawGrid(ctx, view);

  for (const ghost of ghosts) {
    drawGraph(ctx, view, ghost, true);
  }

  ctx.lineWidth = 1.5;
  ctx.strokeStyle = COLORS.stroke;
  for (const stroke of strokes) {
    drawPolyline(ctx, view, stroke);
  }
  if (activeStroke && activeStroke.length > 1) {
    ctx.strokeStyle = COLORS.activeStroke;
    drawPolyline(ctx, view, activeStroke);
  }

  if (graph) {
    drawGraph(ctx, view, graph, false);
    drawFlashes(ctx, view, graph, currentStep);
  }
}

function drawGrid(ctx: CanvasRenderingContext2D, view: Viewport): void {
  const spacing = 100; // meters
  const [minX, maxY] = view.toMeters([0, 0]);
  const [maxX, minY] = view.toMeters([view.width, view.height]);
  if ((maxX - minX) / spacing > 200) return;
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  ctx.beginPath();
  for (let x = Math.floor(minX / spacing) * spacing; x <= maxX; x += spacing) {
    const [px] = view.toCanvas([x, 0]);
    ctx.moveTo(px, 0);
    ctx.lineTo(px, view.height);
  }
  for (let y = Math.floor(minY / spacing) * spacing; y <= maxY; y += spacing) {
    const [, py] = view.toCanvas([0, y]);
    ctx.moveTo(0, py);
    ctx.lineTo(view.width, py);
  }
  ctx.stroke();
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  points: Point[],
): void {
  if (points.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = view.toCanvas(points[0]);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < points.length; i++) {
    const [x, y] = view.toCanvas(points[i]);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

function drawGraph(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  graph: GraphState,
  ghost: boolean,
): void {
  for (const [key, kind] of graph.edges) {
    const [aId, bId] = key.split(":").map(Number);
    const a = graph.nodes.get(aId);
    const b = graph.nodes.get(bId);
    if (!a || !b) continue;
    ctx.strokeStyle = ghost ? COLORS.ghost : kind === "major" ? COLORS.major : COLORS.road;
    ctx.lineWidth = ghost ? 1 : kind === "major" ? 3 : 2;
    drawPolyline(ctx, view, [a, b]);
  }
  if (ghost || view.metersPerPixel > 4) return;
  ctx.fillStyle = COLORS.node;
  for (const [, p] of graph.nodes) {
    const [px, py] = view.toCanvas(p);
    ctx.fillRect(px - 1.5, py - 1.5, 3, 3);
  }
}

function drawFlashes(
  ctx: CanvasRenderingContext2D,
  view: Viewport,
  graph: GraphState,
  currentStep: number,
): void {
  for (const flash of graph.flashes) {
    const age = currentStep - flash.step;
    if (age > 6) continue;
    const alpha = Math.max(0, 1 - age / 6);
    const [px, py] = view.toCanvas(flash.at);
    ctx.globalAlpha = alpha;
    if (flash.kind === "snap") {
      ctx.strokeStyle = COLORS.snap;
      ctx.beginPath();
      ctx.arc(px, py, 7, 0, 2 * Math.PI);
      ctx.stroke();
    } else {
      ctx.strokeStyle = COLORS.reject;
      ctx.beginPath();
      ctx.moveTo(px - 4, py - 4);
      ctx.lineTo(px + 4, py + 4);
      ctx.moveTo(px - 4, py + 4);
      ctx.lineTo(px + 4, py - 4);
      ctx.stroke();
    }
    ctx.globalAlpha = 1;
  }
}
