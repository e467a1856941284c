import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api";
import { ConsoleStore, InvariantError } from "../src/store";
import type { FloodMetrics } from "../src/types";
import {
  envelope,
  fakeFetch,
  makeRecommendation,
  makeUnit,
} from "./helpers";

const METRICS: FloodMetrics = {
  window_ms: 600_000,
  raw_alarms: 120,
  presentation_units: 40,
  groups_formed: 12,
  rate_per_10min: 40,
  suppression_ratio: 0.66,
};

describe("ConsoleStore", () => {
  it("marks groups seen and mirrors server acknowledgements on setUnits", () => {
    const store = new ConsoleStore();
    store.setUnits([
      makeUnit({ group_id: "g1" }),
      makeUnit({
        group_id: "g2",
        plan: {
          group_id: "g2",
          importance: "normal",
          notify_at: [1000],
          listed: true,
          acknowledged_at: 5000,
        },
      }),
    ]);
    expect(store.seenGroups.has("g1")).toBe(true);
    expect(store.seenGroups.has("g2")).toBe(true);
    expect(store.acknowledged.has("g1")).toBe(false);
    expect(store.acknowledged.has("g2")).toBe(true);
  });

  it("refuses to acknowledge a group that was never shown", () => {
    const store = new ConsoleStore();
    store.setUnits([makeUnit({ group_id: "g1" })]);
    expect(() => store.markAcknowledged("ghost")).toThrow(InvariantError);
    store.markAcknowledged("g1");
    expect(store.acknowledged.has("g1")).toBe(true);
  });

  it("counts journal alarm units as seen groups", () => {
    const store = new ConsoleStore();
    store.appendTimeline({
      seq: 1,
      type: "alarm_unit",
      payload: { group_id: "g9" },
    });
    store.appendTimeline({ seq: 2, type: "forecast", payload: {} });
    expect(store.seenGroups.has("g9")).toBe(true);
    expect(store.timeline).toHaveLength(2);
    store.markAcknowledged("g9");
  });

  it("rejects drafts against closed or unknown recommendations", () => {
    const store = new ConsoleStore();
    store.recommendations = [
      makeRecommendation({ recommendation_id: "rec-1" }),
      makeRecommendation({ recommendation_id: "rec-2", disposition: "acted" }),
    ];
    const draft = {
      recommendationId: "rec-1",
      cardId: "card-0001",
      verdict: "confirm" as const,
      author: "op1",
      text: "",
    };
    store.addDraft(draft);
    expect(store.drafts).toHaveLength(1);
    expect(() =>
      store.addDraft({ ...draft, recommendationId: "rec-2" }),
    ).toThrow(InvariantError);
    expect(() =>
      store.addDraft({ ...draft, recommendationId: "rec-404" }),
    ).toThrow(InvariantError);
  });

  it("keeps unsendable drafts out of the send queue", () => {
    const store = new ConsoleStore();
    store.recommendations = [
      makeRecommendation({ recommendation_id: "rec-1" }),
    ];
    store.addDraft({
      recommendationId: "rec-1",
      cardId: "card-0001",
      verdict: "supplement",
      author: "op1",
      text: "   ",
    });
    store.addDraft({
      recommendationId: "rec-1",
      cardId: "card-0001",
      verdict: "reject",
      author: "op1",
      text: "",
    });
    const sendable = store.sendableDrafts();
    expect(sendable).toHaveLength(1);
    expect(sendable[0]?.verdict).toBe("reject");
  });

  it("loadAll rebuilds units, metrics and recommendations from the gateway", async () => {
    const units = [
      makeUnit({ group_id: "g1" }),
      makeUnit({ group_id: "g2", status: "hold" }),
    ];
    const { fetch } = fakeFetch({
      "GET /api/alarms/groups": () => ({
        status: 200,
        body: envelope({ units, total: units.length }),
      }),
      "GET /api/alarms/metrics": () => ({
        status: 200,
        body: envelope(METRICS),
      }),
      "GET /api/assist/recommendations": () => ({
        status: 200,
        body: envelope({
          recommendations: [
            makeRecommendation({ recommendation_id: "rec-1" }),
          ],
        }),
      }),
    });
    const store = new ConsoleStore();
    await store.loadAll(new GatewayClient("http://fake", fetch));
    expect(store.units).toHaveLength(2);
    expect(store.metrics?.suppression_ratio).toBeCloseTo(0.66);
    expect(store.recommendations).toHaveLength(1);
    expect(store.seenGroups.has("g2")).toBe(true);
  });

  it("loadAll drops drafts whose recommendation closed meanwhile", async () => {
    const store = new ConsoleStore();
    store.recommendations = [
      makeRecommendation({ recommendation_id: "rec-1" }),
    ];
    store.addDraft({
      recommendationId: "rec-1",
      cardId: "card-0001",
      verdict: "confirm",
      author: "op1",
      text: "",
    });
    const { fetch } = fakeFetch({
      "GET /api/alarms/groups": () => ({
        status: 200,
        body: envelope({ units: [], total: 0 }),
      }),
      "GET /api/alarms/metrics": () => ({
        status: 200,
        body: envelope(METRICS),
      }),
      "GET /api/assist/recommendations": () => ({
        status: 200,
        body: envelope({
          recommendations: [
            makeRecommendation({
              recommendation_id: "rec-1",
              disposition: "acted",
            }),
          ],
        }),
      }),
    });
    await store.loadAll(new GatewayClient("http://fake", fetch));
    expect(store.drafts).toHaveLength(0);
  });
});
