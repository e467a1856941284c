/** Typed client for the gateway REST surface.
 *
 * Every response arrives in the same envelope; exactly one of payload or
 * error is present.  Errors become GatewayError so callers can branch on
 * the stable code instead of parsing messages.
 */

import type {
  CardDetail,
  CardVersion,
  ChangePoint,
  Envelope,
  FeedbackRequest,
  FeedbackResult,
  FloodMetrics,
  Forecast,
  Malfunction,
  PresentationUnit,
  Recommendation,
  SolutionStep,
  StatsRow,
  TriggerRequest,
} from "./types";

export class GatewayError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

export class GatewayClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // bind so a bare global fetch keeps its expected receiver
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async call<T>(
    method: "GET" | "POST",
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const envelope = (await response.json()) as Envelope<T>;
    const hasPayload = envelope.payload !== undefined;
    const hasError = envelope.error !== undefined;
    if (hasPayload === hasError) {
      throw new GatewayError(
        "PROTOCOL",
        `response carries ${hasError ? "both payload and error" : "neither"}`,
        response.status,
      );
    }
    if (envelope.error) {
      throw new GatewayError(
        envelope.error.code,
        envelope.error.message,
        response.status,
      );
    }
    return envelope.payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.call("GET", "/api/health");
  }

  registerUser(name: string, role: string): Promise<{ name: string; role: string }> {
    return this.call("POST", "/api/users", { name, role });
  }

  async alarmGroups(limit?: number): Promise<{ units: PresentationUnit[]; total: number }> {
    const suffix = limit ? `?limit=${limit}` : "";
    return this.call("GET", `/api/alarms/groups${suffix}`);
  }

  acknowledge(groupId: string, at: number): Promise<PresentationUnit> {
    return this.call("POST", `/api/alarms/groups/${groupId}/ack`, { at });
  }

  floodMetrics(): Promise<FloodMetrics> {
    return this.call("GET", "/api/alarms/metrics");
  }

  async forecasts(reelId: string): Promise<Forecast[]> {
    const out = await this.call<{ reel_id: string; forecasts: Forecast[] }>(
      "GET",
      `/api/forecasts/${reelId}`,
    );
    return out.forecasts;
  }

  forecast(reelId: string, parameter: string): Promise<Forecast> {
    return this.call("GET", `/api/forecasts/${reelId}/${parameter}`);
  }

  async changePoints(parameter?: string): Promise<ChangePoint[]> {
    const suffix = parameter ? `?parameter=${encodeURIComponent(parameter)}` : "";
    const out = await this.call<{ events: ChangePoint[] }>(
      "GET",
      `/api/changepoints${suffix}`,
    );
    return out.events;
  }

  async visibleCards(): Promise<CardVersion[]> {
    const out = await this.call<{ cards: CardVersion[] }>("GET", "/api/cards");
    return out.cards;
  }

  async searchCards(query: string, situation?: string): Promise<CardVersion[]> {
    let path = `/api/cards?query=${encodeURIComponent(query)}`;
    if (situation) path += `&situation=${encodeURIComponent(situation)}`;
    const out = await this.call<{ cards: CardVersion[] }>("GET", path);
    return out.cards;
  }

  card(cardId: string): Promise<CardDetail> {
    return this.call("GET", `/api/cards/${cardId}`);
  }

  createCard(
    malfunction: Malfunction,
    solutions: SolutionStep[],
    author: string,
  ): Promise<{ card_id: string; status: string }> {
    return this.call("POST", "/api/cards", { malfunction, solutions, author });
  }

  approveCard(cardId: string, editor: string, at?: number): Promise<CardVersion> {
    return this.call("POST", `/api/cards/${cardId}/approve`, { editor, at });
  }

  proposeChange(
    cardId: string,
    diff: Record<string, unknown>,
    proposer: string,
    note = "",
  ): Promise<{ proposal_id: string; state: string }> {
    return this.call("POST", `/api/cards/${cardId}/propose`, {
      diff,
      proposer,
      note,
    });
  }

  addComment(
    cardId: string,
    author: string,
    text: string,
    at?: number,
  ): Promise<{ author: string; timestamp: number; text: string }> {
    return this.call("POST", `/api/cards/${cardId}/comments`, { author, text, at });
  }

  trigger(event: TriggerRequest): Promise<Recommendation> {
    return this.call("POST", "/api/assist/trigger", event);
  }

  async recommendations(): Promise<Recommendation[]> {
    const out = await this.call<{ recommendations: Recommendation[] }>(
      "GET",
      "/api/assist/recommendations",
    );
    return out.recommendations;
  }

  sendFeedback(feedback: FeedbackRequest): Promise<FeedbackResult> {
    return this.call("POST", "/api/feedback", feedback);
  }

  async stats(filter?: { cardId?: string; situation?: string }): Promise<StatsRow[]> {
    const params = new URLSearchParams();
    if (filter?.cardId) params.set("card_id", filter.cardId);
    if (filter?.situation) params.set("situation", filter.situation);
    const qs = params.toString();
    const out = await this.call<{ stats: StatsRow[] }>(
      "GET",
      `/api/assist/stats${qs ? "?" + qs : ""}`,
    );
    return out.stats;
  }
}
