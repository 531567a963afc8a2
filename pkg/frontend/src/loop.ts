// Play / pause / single-step control with a strict in-flight guard:
// step requests never overlap, and pausing issues none at all.

export interface Stepper {
  step(n: number): Promise<{ status: string }>;
}

export type Mode = "paused" | "playing";

export class PlayController {
  mode: Mode = "paused";
  inFlight = false;
  requestsIssued = 0;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private stepper: Stepper,
    private onUpdate: (status: string) => void,
    private cadenceMs = 150,
  ) {}

  play(): void {
    if (this.mode === "playing") return;
    this.mode = "playing";
    this.timer = setInterval(() => void this.tick(), this.cadenceMs);
  }

  pause(): void {
    this.mode = "paused";
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** Issue exactly one step request (ignored while one is in flight). */
  async stepOnce(): Promise<void> {
    await this.tick();
  }

  private async tick(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    this.requestsIssued += 1;
    try {
      const result = await this.stepper.step(1);
      this.onUpdate(result.status);
      if (result.status !== "active") this.pause();
    } catch {
      this.pause();
    } finally {
      this.inFlight = false;
    }
  }
}
