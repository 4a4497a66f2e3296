import { ApiClient, ApiError } from "./api.js";
import { pollStatus } from "./polling.js";
import { ScribbleLayer } from "./scribbles.js";
import type { JobProgress, RunRecord, SegmentOptions, SessionInfo, StatusPayload } from "./types.js";

/**
 * DOM-free application state and orchestration.
 *
 * Owns the session, the scribble layer, run history and the progress
 * series; the canvas layer subscribes to onChange and renders whatever
 * is here. Keeping this free of browser types is what makes the whole
 * refinement loop unit-testable against a fake API.
 */
export class UiController {
  session: SessionInfo | null = null;
  layer: ScribbleLayer | null = null;
  statusText = "upload an image to begin";
  running = false;
  history: RunRecord[] = [];
  /** mean max domination per stop-criterion check, for the sparkline */
  progressSeries: number[] = [];
  lastProgress: JobProgress = {};
  onChange: () => void = () => {};

  constructor(private readonly api: ApiClient) {}

  private notify(): void {
    this.onChange();
  }

  get canRun(): boolean {
    return !this.running && this.layer !== null && this.layer.runnable;
  }

  /** Tooltip / status explanation mirroring the server's 422 rule. */
  get runDisabledReason(): string | null {
    if (this.running) return "a job is already running";
    if (!this.layer || !this.session) return "no image loaded";
    const missing = (["background", "foreground"] as const).filter(
      (cls) => !this.layer!.hasClass(cls),
    );
    if (missing.length) return `scribble the ${missing.join(" and ")} first`;
    return null;
  }

  get currentMask(): Uint8Array | null {
    const last = this.history[this.history.length - 1];
    return last ? last.maskPng : null;
  }

  async upload(imageBytes: Uint8Array | Blob): Promise<SessionInfo> {
    const session = await this.api.createSession(imageBytes);
    this.session = session;
    this.layer = new ScribbleLayer(session.width, session.height);
    this.history = [];
    this.progressSeries = [];
    this.statusText = `session ${session.session_id.slice(0, 8)}: ${session.width}x${session.height}`;
    this.notify();
    return session;
  }

  /**
   * Push the scribbles, start the job, poll to completion and fetch the
   * mask. Server errors land verbatim in statusText; on success the run
   * is appended to the history.
   */
  async runAndPoll(options: SegmentOptions, pollIntervalMs = 250): Promise<RunRecord | null> {
    if (!this.session || !this.layer) throw new Error("no session");
    if (!this.canRun) throw new Error(this.runDisabledReason ?? "cannot run");
    this.running = true;
    this.progressSeries = [];
    this.statusText = "running";
    this.notify();
    try {
      const sid = this.session.session_id;
      await this.api.addScribbles(sid, this.layer.toPoints());
      await this.api.startSegmentation(sid, options);
      const status = await pollStatus(() => this.api.getStatus(sid), {
        intervalMs: pollIntervalMs,
        onUpdate: (s: StatusPayload) => {
          this.lastProgress = s.progress ?? {};
          if (typeof this.lastProgress.mean_max_domination === "number") {
            this.progressSeries.push(this.lastProgress.mean_max_domination);
          }
          this.notify();
        },
      }).promise;
      if (status.state === "failed" || !status.result) {
        this.statusText = `failed: ${status.error ?? "unknown error"}`;
        return null;
      }
      const maskPng = await this.api.getMask(sid);
      const record: RunRecord = {
        startedAt: Date.now(),
        options,
        result: status.result,
        maskPng,
      };
      this.history.push(record);
      this.statusText =
        `done: alpha=${status.result.alpha.toFixed(4)} ` +
        `rounds=${status.result.rounds} (${status.result.stop_reason})`;
      return record;
    } catch (err) {
      this.statusText = err instanceof ApiError ? `server: ${err.message}` : `error: ${String(err)}`;
      return null;
    } finally {
      this.running = false;
      this.notify();
    }
  }

  async discardSession(): Promise<void> {
    if (!this.session) return;
    try {
      await this.api.deleteSession(this.session.session_id);
    } finally {
      this.session = null;
      this.layer = null;
      this.history = [];
      this.progressSeries = [];
      this.statusText = "session discarded";
      this.notify();
    }
  }
}
