// Typed client for the /v1/ session API plus the SSE push channel.

import type { GenEvent, GraphDoc, Point, SessionInfo, StepResult, StyleInfo } from "./types";

export interface CreateSessionBody {
  strokes: Point[][];
  style: number | null;
  seed: number;
  temperature?: number;
}

export class ApiClient {
  constructor(public baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      const body = await resp.text();
      throw new Error(`${resp.status} ${resp.statusText}: ${body}`);
    }
    return (await resp.json()) as T;
  }

  createSession(body: CreateSessionBody): Promise<SessionInfo> {
    return this.request("/v1/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  step(sessionId: string, n = 1): Promise<StepResult> {
    return this.request(`/v1/sessions/${sessionId}/step?n=${n}`, {
      method: "POST",
    });
  }

  fetchGraph(sessionId: string): Promise<GraphDoc> {
    return this.request(`/v1/sessions/${sessionId}/graph`);
  }

  async fetchGraphText(sessionId: string, format: "canonical" | "geojson"): Promise<string> {
    const suffix = format === "geojson" ? "?format=geojson" : "";
    const resp = await fetch(
      `${this.baseUrl}/v1/sessions/${sessionId}/graph${suffix}`,
    );
    if (!resp.ok) throw new Error(`${resp.status} ${resp.statusText}`);
    return resp.text();
  }

  listStyles(): Promise<StyleInfo[]> {
    return this.request("/v1/styles");
  }

  deleteSession(sessionId: string): Promise<unknown> {
    return this.request(`/v1/sessions/${sessionId}`, { method: "DELETE" });
  }

  eventsUrl(sessionId: string, start: number): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/events?start=${start}&follow=true`;
  }
}

export interface ChannelHooks {
  onEvent: (ev: GenEvent) => void;
  /** Called when the channel drops; the app resyncs via fetchGraph. */
  onDrop: () => void;
}

/**
 * Push-channel wrapper. Tracks how many events it has delivered so a
 * reconnect resumes from the right offset instead of replaying everything.
 */
export class EventChannel {
  received = 0;
  private source: EventSource | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private hooks: ChannelHooks,
  ) {}

  open(): void {
    this.close();
    this.source = new EventSource(this.api.eventsUrl(this.sessionId, this.received));
    this.source.onmessage = (msg: MessageEvent<string>) => {
      this.received += 1;
      this.hooks.onEvent(JSON.parse(msg.data) as GenEvent);
    };
    this.source.onerror = () => {
      // EventSource retries by itself, but the stream offset is baked into
      // the URL; reopen from the current offset and let the app resync.
      this.close();
      this.hooks.onDrop();
    };
  }

  close(): void {
    if (this.source) {
      this.source.close();
      this.source = null;
    }
  }
}
