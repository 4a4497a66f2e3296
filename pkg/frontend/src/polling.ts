import type { StatusPayload } from "./types.js";

export interface PollOptions {
  intervalMs?: number; // base polling interval
  maxBackoffMs?: number; // cap for the error backoff
  timeoutMs?: number; // give up after this long
  onUpdate?: (status: StatusPayload) => void;
}

export interface PollHandle {
  promise: Promise<StatusPayload>;
  cancel: () => void;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * Poll a status endpoint until the job finishes.
 *
 * Fixed interval while the server answers; transient fetch errors double
 * the wait up to maxBackoffMs and reset on the next success. Resolves on
 * "done" or "failed", rejects on timeout or cancellation.
 */
export function pollStatus(
  getStatus: () => Promise<StatusPayload>,
  options: PollOptions = {},
): PollHandle {
  const interval = options.intervalMs ?? 250;
  const maxBackoff = options.maxBackoffMs ?? 5000;
  const timeout = options.timeoutMs ?? 10 * 60 * 1000;
  let cancelled = false;

  const promise = (async (): Promise<StatusPayload> => {
    const deadline = Date.now() + timeout;
    let backoff = interval;
    for (;;) {
      if (cancelled) throw new Error("polling cancelled");
      if (Date.now() > deadline) throw new Error("polling timed out");
      try {
        const status = await getStatus();
        backoff = interval;
        options.onUpdate?.(status);
        if (status.state === "done" || status.state === "failed") return status;
        await sleep(interval);
      } catch (err) {
        if (cancelled) throw err;
        await sleep(backoff);
        backoff = Math.min(backoff * 2, maxBackoff);
      }
    }
  })();

  return {
    promise,
    cancel: () => {
      cancelled = true;
    },
  };
}
