export type ScribbleClass = "background" | "foreground";

export interface Brush {
  cls: ScribbleClass;
  radius: number; // pixels, >= 1
}

export interface CanvasPoint {
  x: number;
  y: number;
}

export interface ScribblePoint extends CanvasPoint {
  class: ScribbleClass;
}

/** One horizontal run of same-class scribbled pixels. */
export interface RowSpan {
  y: number;
  x0: number; // inclusive
  x1: number; // inclusive
  cls: ScribbleClass;
}

export interface SessionInfo {
  session_id: string;
  width: number;
  height: number;
}

export interface ScribbleAck {
  accepted: number;
  rejected_indices: number[];
}

export interface JobProgress {
  round?: number;
  mean_max_domination?: number;
  fraction_finalized?: number;
}

export interface JobResult {
  alpha: number;
  phi: number;
  sigma: number;
  rounds: number;
  stop_reason: string;
  seed: number;
  k: number;
  lam: number[];
}

export type JobState = "idle" | "running" | "done" | "failed";

export interface StatusPayload {
  state: JobState;
  progress: JobProgress;
  error?: string;
  result?: JobResult;
}

export interface SegmentOptions {
  k?: number;
  seed?: number;
  lambda_mode?: "unit" | "optimize" | "explicit";
  weights?: number[];
}

export interface RunRecord {
  startedAt: number;
  options: SegmentOptions;
  result: JobResult;
  maskPng: Uint8Array;
}
