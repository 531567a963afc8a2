// Studio wiring: canvas, toolbar, session lifecycle, push-channel handling.

import { ApiClient, EventChannel } from "./api";
import { GraphState, applyEvent, fromGraphDoc } from "./fold";
import { PlayController } from "./loop";
import { drawScene } from "./render";
import { StrokeStore } from "./strokes";
import { Viewport } from "./transform";
import type { Point, StyleInfo } from "./types";

export class Studio {
  api: ApiClient;
  view: Viewport;
  strokes = new StrokeStore();
  graph: GraphState | null = null;
  ghosts: GraphState[] = [];
  sessionId: string | null = null;
  status = "no session";
  currentStep = 0;
  styles: StyleInfo[] = [];
  selectedStyle: number | null = null;
  seed = 21;
  controller: PlayController;
  private channel: EventChannel | null = null;
  private ctx: CanvasRenderingContext2D;
  private drawing = false;
  private panning = false;
  private lastPointer: Point = [0, 0];
  private statusBar: HTMLElement;
  private styleSelect: HTMLSelectElement;

  constructor(root: HTMLElement, apiBase: string) {
    this.api = new ApiClient(apiBase);
    const canvas = document.createElement("canvas");
    canvas.width = 960;
    canvas.height = 640;
    canvas.className = "studio-canvas";
    this.view = new Viewport(canvas.width, canvas.height, 1.0);
    this.ctx = canvas.getContext("2d")!;

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    this.styleSelect = document.createElement("select");
    this.statusBar = document.createElement("div");
    this.statusBar.className = "status-bar";

    const button = (label: string, onClick: () => void) => {
      const el = document.createElement("button");
      el.textContent = label;
      el.addEventListener("click", onClick);
      toolbar.appendChild(el);
      return el;
    };

    const seedInput = document.createElement("input");
    seedInput.type = "number";
    seedInput.value = String(this.seed);
    seedInput.title = "generation seed";
    seedInput.addEventListener("change", () => {
      this.seed = Number(seedInput.value) || 0;
    });

    button("undo stroke", () => {
      this.strokes.undo();
      this.redraw();
    });
    button("clear", () => {
      this.strokes.clear();
      this.redraw();
    });
    toolbar.appendChild(this.styleSelect);
    toolbar.appendChild(seedInput);
    button("create session", () => void this.createSession());
    button("play", () => this.controller.play());
    button("pause", () => this.controller.pause());
    button("step", () => void this.controller.stepOnce());
    button("export JSON", () => void this.exportGraph("canonical"));
    button("export GeoJSON", () => void this.exportGraph("geojson"));

    this.styleSelect.addEventListener("change", () => {
      const value = this.styleSelect.value;
      this.selectedStyle = value === "none" ? null : Number(value);
      if (this.sessionId) {
        // switching style mid-design starts a new session; the old layout
        // stays visible as a frozen background layer
        void this.createSession();
      }
    });

    canvas.addEventListener("pointerdown", (e) => this.pointerDown(e, canvas));
    canvas.addEventListener("pointermove", (e) => this.pointerMove(e, canvas));
    canvas.addEventListener("pointerup", () => this.pointerUp());
    canvas.addEventListener("pointerleave", () => this.pointerUp());
    canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const anchor = this.canvasPoint(e, canvas);
      this.view.zoomAt(anchor, e.deltaY > 0 ? 1.15 : 1 / 1.15);
      this.redraw();
    });
    canvas.addEventListener("contextmenu", (e) => e.preventDefault());

    this.controller = new PlayController(
      { step: (n) => this.api.step(this.sessionId!, n) },
      (status) => {
        this.status = status;
        this.updateStatus();
      },
    );

    root.appendChild(toolbar);
    root.appendChild(canvas);
    root.appendChild(this.statusBar);
    this.redraw();
    this.updateStatus();
    void this.loadStyles();
  }

  private canvasPoint(e: MouseEvent, canvas: HTMLCanvasElement): Point {
    const rect = canvas.getBoundingClientRect();
    return [e.clientX - rect.left, e.clientY - rect.top];
  }

  private pointerDown(e: PointerEvent, canvas: HTMLCanvasElement): void {
    const p = this.canvasPoint(e, canvas);
    if (e.button === 2 || e.shiftKey) {
      this.panning = true;
      this.lastPointer = p;
      return;
    }
    this.drawing = true;
    this.strokes.beginStroke(this.view.toMeters(p));
  }

  private pointerMove(e: PointerEvent, canvas: HTMLCanvasElement): void {
    const p = this.canvasPoint(e, canvas);
    if (this.panning) {
      this.view.panPixels(p[0] - this.lastPointer[0], p[1] - this.lastPointer[1]);
      this.lastPointer = p;
      this.redraw();
      return;
    }
    if (this.drawing) {
      this.strokes.extendStroke(this.view.toMeters(p));
      this.redraw();
    }
  }

  private pointerUp(): void {
    if (this.drawing) {
      this.strokes.endStroke();
      this.redraw();
    }
    this.drawing = false;
    this.panning = false;
  }

  async loadStyles(): Promise<void> {
    try {
      this.styles = await this.api.listStyles();
    } catch {
      this.styles = [];
    }
    this.styleSelect.innerHTML = "";
    const none = document.createElement("option");
    none.value = "none";
    none.textContent = "style: none";
    this.styleSelect.appendChild(none);
    for (const style of this.styles) {
      const option = document.createElement("option");
      option.value = String(style.id);
      option.textContent = `style: ${style.name}`;
      this.styleSelect.appendChild(option);
    }
  }

  async createSession(): Promise<void> {
    if (this.strokes.strokes.length === 0) {
      this.status = "sketch something first";
      this.updateStatus();
      return;
    }
    this.controller.pause();
    this.channel?.close();
    if (this.graph) this.ghosts.push(this.graph);
    try {
      const info = await this.api.createSession({
        strokes: this.strokes.strokes,
        style: this.selectedStyle,
        seed: this.seed,
      });
      this.sessionId = info.session_id;
      this.status = info.status;
      this.currentStep = 0;
      this.graph = new GraphState();
      this.channel = new EventChannel(this.api, this.sessionId, {
        onEvent: (ev) => {
          if (this.graph) {
            applyEvent(this.graph, ev);
            this.currentStep = Math.max(this.currentStep, ev.step);
          }
          this.redraw();
          this.updateStatus();
        },
        onDrop: () => void this.resync(),
      });
      this.channel.open();
    } catch (err) {
      this.status = `create failed: ${err}`;
    }
    this.updateStatus();
    this.redraw();
  }

  /** Channel drop recovery: snapshot from the server, then resubscribe. */
  async resync(): Promise<void> {
    if (!this.sessionId || !this.channel) return;
    try {
      const doc = await this.api.fetchGraph(this.sessionId);
      this.graph = fromGraphDoc(doc, this.channel.received);
      this.redraw();
      this.channel.open();
    } catch {
      this.status = "connection lost";
      this.updateStatus();
    }
  }

  async exportGraph(format: "canonical" | "geojson"): Promise<void> {
    if (!this.sessionId) return;
    const text = await this.api.fetchGraphText(this.sessionId, format);
    const blob = new Blob([text], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = format === "geojson" ? "layout.geojson" : "layout.json";
    a.click();
    URL.revokeObjectURL(a.href);
  }

  private updateStatus(): void {
    const counts = this.graph
      ? `${this.graph.nodeCount()} nodes / ${this.graph.edgeCount()} edges`
      : "-";
    this.statusBar.textContent =
      `session: ${this.sessionId ?? "none"} | status: ${this.status} | ` +
      `step: ${this.currentStep} | ${counts} | ` +
      `${this.view.metersPerPixel.toFixed(2)} m/px`;
  }

  redraw(): void {
    drawScene(
      this.ctx,
      this.view,
      this.graph,
      this.ghosts,
      this.strokes.strokes,
      this.strokes.activeStroke(),
      this.currentStep,
    );
  }
}
