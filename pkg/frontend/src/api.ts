import type {
  ScribbleAck,
  ScribblePoint,
  SegmentOptions,
  SessionInfo,
  StatusPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Copy bytes into a Blob (fresh buffer keeps the DOM typings happy). */
export function bytesToBlob(bytes: Uint8Array, type?: string): Blob {
  const copy = new Uint8Array(bytes.length);
  copy.set(bytes);
  return new Blob([copy.buffer], type ? { type } : undefined);
}

/**
 * Thin typed client for the segmentation service JSON API.
 *
 * Server error payloads ({detail}) are surfaced verbatim as ApiError so
 * the status panel can show exactly what the server said.
 */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async parseError(response: Response): Promise<never> {
    let detail = `${response.status}`;
    try {
      const payload = await response.json();
      if (payload && typeof payload.detail === "string") detail = payload.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }

  private async json<T>(response: Response): Promise<T> {
    if (!response.ok) await this.parseError(response);
    return (await response.json()) as T;
  }

  async createSession(imageBytes: Uint8Array | Blob): Promise<SessionInfo> {
    const response = await this.fetchImpl(`${this.base}/api/sessions`, {
      method: "POST",
      body: imageBytes instanceof Blob ? imageBytes : bytesToBlob(imageBytes),
    });
    return this.json<SessionInfo>(response);
  }

  async addScribbles(sessionId: string, points: ScribblePoint[]): Promise<ScribbleAck> {
    const response = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}/scribbles`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(points),
    });
    return this.json<ScribbleAck>(response);
  }

  async startSegmentation(sessionId: string, options: SegmentOptions): Promise<void> {
    const response = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}/segment`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    if (!response.ok) await this.parseError(response);
  }

  async getStatus(sessionId: string): Promise<StatusPayload> {
    const response = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}/status`);
    return this.json<StatusPayload>(response);
  }

  /** PNG mask bytes; only available once the job is done. */
  async getMask(sessionId: string): Promise<Uint8Array> {
    const response = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}/mask`);
    if (!response.ok) await this.parseError(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  async deleteSession(sessionId: string): Promise<void> {
    const response = await this.fetchImpl(`${this.base}/api/sessions/${sessionId}`, {
      method: "DELETE",
    });
    if (!response.ok) await this.parseError(response);
  }
}
