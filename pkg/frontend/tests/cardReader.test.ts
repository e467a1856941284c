import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api";
import {
  FEEDBACK_VERDICTS,
  candidateList,
  cardView,
  checkDraft,
  submitFeedback,
} from "../src/cardReader";
import type { CardDetail } from "../src/types";
import {
  envelope,
  errorEnvelope,
  fakeFetch,
  makeRecommendation,
} from "./helpers";

const DETAIL: CardDetail = {
  card: {
    card_id: "card-0001",
    version: 2,
    status: "approved",
    malfunction: {
      description: "Felt wash cycle stalls",
      cause: "Shower nozzle blocked",
      locations: ["press_section"],
      error_codes: ["W300"],
      situations: ["felt_wash"],
    },
    solutions: [
      { text: "Close shower feed", media: null },
      { text: "Flush the nozzle line", media: "nozzle.png" },
    ],
    author: "ed1",
    editor_of_record: "ed2",
    approved_at: 1000,
    content_hash: "abc123",
  },
  comments: [{ author: "op1", timestamp: 2000, text: "worked for me" }],
  status: "approved",
};

describe("cardView", () => {
  it("reads malfunction, then solutions, then comments", () => {
    const view = cardView(DETAIL);
    expect(view.sections.map((s) => s.kind)).toEqual([
      "malfunction",
      "solutions",
      "comments",
    ]);
    expect(view.sections[0].lines).toEqual([
      "Felt wash cycle stalls",
      "Shower nozzle blocked",
    ]);
    expect(view.sections[1].lines).toEqual([
      "1. Close shower feed",
      "2. Flush the nozzle line",
    ]);
    expect(view.sections[1].media).toEqual(["nozzle.png"]);
    expect(view.sections[2].lines).toEqual(["op1: worked for me"]);
  });

  it("offers exactly the four verdicts and nothing that edits the card", () => {
    const view = cardView(DETAIL);
    const offered = [...view.oneClickVerdicts, ...view.textFormVerdicts];
    expect(offered.sort()).toEqual([...FEEDBACK_VERDICTS].sort());
    expect(view.oneClickVerdicts).toEqual(["confirm", "reject"]);
    expect(view.textFormVerdicts).toEqual(["correct", "supplement"]);
  });
});

describe("checkDraft", () => {
  const base = {
    recommendationId: "rec-1",
    cardId: "card-0001",
    author: "op1",
  };

  it("lets confirm and reject through with no text", () => {
    expect(checkDraft({ ...base, verdict: "confirm", text: "" }).ok).toBe(true);
    expect(checkDraft({ ...base, verdict: "reject", text: "" }).ok).toBe(true);
  });

  it("blocks corrections and supplements without a text", () => {
    for (const verdict of ["correct", "supplement"] as const) {
      const check = checkDraft({ ...base, verdict, text: "  " });
      expect(check.ok).toBe(false);
      if (!check.ok) expect(check.message).toContain(verdict);
    }
    expect(
      checkDraft({ ...base, verdict: "supplement", text: "also vent the line" })
        .ok,
    ).toBe(true);
  });
});

describe("submitFeedback", () => {
  const draft = {
    recommendationId: "rec-1",
    cardId: "card-0001",
    verdict: "confirm" as const,
    author: "op1",
    text: "",
  };

  it("posts a sendable draft and returns the updated tallies", async () => {
    const { fetch, calls } = fakeFetch({
      "POST /api/feedback": () => ({
        status: 200,
        body: envelope({
          recorded: true,
          proposal_id: null,
          card_id: "card-0001",
          confirms: 3,
          rejects: 0,
          score: 0.8,
        }),
      }),
    });
    const outcome = await submitFeedback(
      new GatewayClient("http://fake", fetch),
      draft,
      7000,
    );
    expect(outcome.ok).toBe(true);
    if (outcome.ok) expect(outcome.result.score).toBeCloseTo(0.8);
    expect(calls[0]?.body).toMatchObject({
      recommendation_id: "rec-1",
      card_id: "card-0001",
      verdict: "confirm",
      timestamp: 7000,
    });
  });

  it("never posts a draft the text rule rejects", async () => {
    const { fetch, calls } = fakeFetch({});
    const outcome = await submitFeedback(
      new GatewayClient("http://fake", fetch),
      { ...draft, verdict: "correct" },
      7000,
    );
    expect(outcome.ok).toBe(false);
    expect(calls).toHaveLength(0);
  });

  it("surfaces a closed-recommendation refusal instead of swallowing it", async () => {
    const { fetch } = fakeFetch({
      "POST /api/feedback": () => ({
        status: 400,
        body: errorEnvelope(
          "VALIDATION",
          "recommendation rec-1 is dismissed and no longer accepts feedback",
        ),
      }),
    });
    const outcome = await submitFeedback(
      new GatewayClient("http://fake", fetch),
      draft,
      7000,
    );
    expect(outcome.ok).toBe(false);
    if (!outcome.ok) {
      expect(outcome.message).toContain("VALIDATION");
      expect(outcome.message).toContain("dismissed");
    }
  });
});

describe("candidateList", () => {
  it("ranks candidates in server order", () => {
    const list = candidateList(
      makeRecommendation({
        recommendation_id: "rec-1",
        candidates: [
          ["card-0002", 0.8],
          ["card-0001", 0.5],
        ],
      }),
    );
    expect(list.rows).toEqual([
      { cardId: "card-0002", score: 0.8, rank: 1 },
      { cardId: "card-0001", score: 0.5, rank: 2 },
    ]);
    expect(list.emptyCallToAction).toBeNull();
  });

  it("turns an empty answer into a propose-a-card prompt", () => {
    const list = candidateList(
      makeRecommendation({ recommendation_id: "rec-1" }),
    );
    expect(list.rows).toHaveLength(0);
    expect(list.emptyCallToAction).toContain("propose");
  });
});
