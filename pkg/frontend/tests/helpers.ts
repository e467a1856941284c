import type { FetchLike } from "../src/api";
import type { SocketLike } from "../src/stream";
import type {
  Envelope,
  JournalEntry,
  PresentationUnit,
  Recommendation,
} from "../src/types";

let requestCounter = 0;

export function envelope<T>(payload: T): Envelope<T> {
  requestCounter += 1;
  return {
    schema_version: 1,
    request_id: `req-${String(requestCounter).padStart(6, "0")}`,
    payload,
  };
}

export function errorEnvelope(code: string, message: string): Envelope<never> {
  requestCounter += 1;
  return {
    schema_version: 1,
    request_id: `req-${String(requestCounter).padStart(6, "0")}`,
    error: { code, message },
  };
}

export interface Call {
  method: string;
  path: string;
  body: unknown;
}

export type RouteHandler = (call: Call) => { status: number; body: unknown };

/** fetch stub with a route table; records every call for assertions */
export function fakeFetch(
  routes: Record<string, RouteHandler>,
): { fetch: FetchLike; calls: Call[] } {
  const calls: Call[] = [];
  const impl: FetchLike = async (url, init) => {
    const parsed = new URL(url, "http://fake");
    const path = parsed.pathname + parsed.search;
    const call: Call = {
      method: init?.method ?? "GET",
      path,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    };
    calls.push(call);
    const key = `${call.method} ${parsed.pathname}`;
    const handler = routes[key];
    if (!handler) {
      return new Response(
        JSON.stringify(errorEnvelope("NOT_FOUND", `no route ${key}`)),
        { status: 404 },
      );
    }
    const out = handler(call);
    return new Response(JSON.stringify(out.body), { status: out.status });
  };
  return { fetch: impl, calls };
}

export function makeUnit(
  overrides: Partial<PresentationUnit> & { group_id: string },
): PresentationUnit {
  const count = overrides.count ?? overrides.members?.length ?? 1;
  const base: PresentationUnit = {
    group_id: overrides.group_id,
    kind: "singleton",
    representative: {
      alarm_id: `${overrides.group_id}-rep`,
      tag: "PT1",
      error_code: "E1",
      severity: "warning",
      timestamp: 1000,
    },
    members: Array.from({ length: count }, (_, i) => `al-${i}`),
    count,
    first_ts: 1000,
    last_ts: 2000,
    status: "unfiltered",
    card_ids: [],
    importance: "normal",
    plan: {
      group_id: overrides.group_id,
      importance: overrides.importance ?? "normal",
      notify_at: [1000],
      listed: true,
      acknowledged_at: null,
    },
  };
  return { ...base, ...overrides };
}

export function makeRecommendation(
  overrides: Partial<Recommendation> & { recommendation_id: string },
): Recommendation {
  return {
    trigger: {
      kind: "recognized_situation",
      timestamp: 0,
      location: "press_section",
      situation_label: "felt_wash",
    },
    situation_label: "felt_wash",
    candidates: [],
    created_at: 0,
    disposition: "open",
    ...overrides,
  };
}

/** scripted socket: the test plays the server side */
export class FakeSocket implements SocketLike {
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  sent: string[] = [];
  closedByClient = false;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closedByClient = true;
  }

  open(): void {
    this.onopen?.();
  }

  deliver(entry: JournalEntry): void {
    this.onmessage?.({ data: JSON.stringify(entry) });
  }

  drop(): void {
    this.onclose?.();
  }
}
