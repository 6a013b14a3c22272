import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import type { FetchLike } from "../../src/api";

export interface Exchange {
  method: string;
  path: string;
  request: unknown;
  response: unknown;
}

export interface Recording {
  book_id: string;
  learner_id: string;
  exchanges: Exchange[];
}

export function loadRecording(): Recording {
  const path = fileURLToPath(new URL("../fixtures/recorded_session.json", import.meta.url));
  return JSON.parse(readFileSync(path, "utf-8")) as Recording;
}

function deepEqual(a: unknown, b: unknown): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

/**
 * Replays a recorded service conversation. Requests must match a
 * not-yet-consumed exchange by method, path, and (for POSTs) body; the
 * fixture's response comes back verbatim.
 */
export class RecordedServer {
  readonly consumed: Exchange[] = [];
  private pending: Exchange[];
  private transform: (payload: unknown, exchange: Exchange) => unknown;

  constructor(
    recording: Recording,
    transform: (payload: unknown, exchange: Exchange) => unknown = (p) => p,
  ) {
    this.pending = [...recording.exchanges];
    this.transform = transform;
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : null;
    const index = this.pending.findIndex(
      (e) =>
        e.method === method &&
        e.path === url &&
        (method === "GET" || deepEqual(e.request, body)),
    );
    if (index < 0) {
      throw new Error(`no recorded exchange for ${method} ${url} ${JSON.stringify(body)}`);
    }
    const [exchange] = this.pending.splice(index, 1);
    this.consumed.push(exchange);
    const payload = this.transform(exchange.response, exchange);
    return {
      ok: true,
      status: 200,
      json: async () => payload,
    } as Response;
  };

  get remaining(): number {
    return this.pending.length;
  }
}
