/** Event-stream subscription with reconnect-and-replay.
 *
 * The server replays every past tracking event before following live ones,
 * so a reconnect simply replays from the start; chart state deduplicates
 * scalar points by (step, name) and is therefore replay-proof. */

import type { TrackingEvent } from "./types.js";

export interface EventStream {
  close(): void;
}

export interface StreamHandlers {
  onEvent(event: TrackingEvent): void;
  onEnd(): void;
  onError(): void;
}

export type StreamFactory = (url: string, handlers: StreamHandlers) => EventStream;

/** Default factory backed by the browser's EventSource. */
export const eventSourceFactory: StreamFactory = (url, handlers) => {
  const source = new EventSource(url);
  source.onmessage = (message) => {
    const data = String(message.data);
    if (data && data !== "{}") {
      handlers.onEvent(JSON.parse(data) as TrackingEvent);
    }
  };
  source.addEventListener("end", () => {
    source.close();
    handlers.onEnd();
  });
  source.onerror = () => handlers.onError();
  return { close: () => source.close() };
};

export interface FollowOptions {
  /** Delay before re-subscribing after a dropped stream. */
  reconnectDelayMs?: number;
  /** Injection point for tests and non-browser environments. */
  factory?: StreamFactory;
  /** Scheduler injection for tests. */
  schedule?: (fn: () => void, ms: number) => unknown;
}

/**
 * Follow a job's event stream until it ends, automatically re-subscribing
 * (with full replay) when the stream drops. Returns a stop function.
 */
export function followJob(
  url: string,
  onEvent: (event: TrackingEvent) => void,
  onEnd: () => void,
  options: FollowOptions = {},
): () => void {
  const factory = options.factory ?? eventSourceFactory;
  const schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
  const delay = options.reconnectDelayMs ?? 1000;
  let stopped = false;
  let current: EventStream | null = null;

  const connect = () => {
    if (stopped) return;
    current = factory(url, {
      onEvent: (event) => {
        if (!stopped) onEvent(event);
      },
      onEnd: () => {
        if (!stopped) onEnd();
        stopped = true;
      },
      onError: () => {
        if (stopped) return;
        current?.close();
        schedule(connect, delay);
      },
    });
  };
  connect();
  return () => {
    stopped = true;
    current?.close();
  };
}
