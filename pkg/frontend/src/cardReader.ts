/** Card reader view-model and the feedback controls next to it.
 *
 * The operator always makes the final call: the action surface is limited
 * to the four feedback verdicts plus proposing a brand-new card, and
 * nothing here can touch approved content directly.  Supplements and
 * corrections require text before they leave the client, mirroring the
 * server rule so the round trip cannot fail on an empty form.
 */

import type { GatewayClient } from "./api";
import { GatewayError } from "./api";
import type {
  CardDetail,
  FeedbackResult,
  Recommendation,
  Verdict,
} from "./types";

export const FEEDBACK_VERDICTS: readonly Verdict[] = [
  "confirm",
  "reject",
  "correct",
  "supplement",
] as const;

export const TEXT_REQUIRED: readonly Verdict[] = ["correct", "supplement"];

export interface CardSection {
  kind: "malfunction" | "solutions" | "comments";
  heading: string;
  lines: string[];
  media: string[];
}

export interface CardView {
  cardId: string;
  version: number;
  /** fixed reading order: what broke, what to do, what others added */
  sections: [CardSection, CardSection, CardSection];
  oneClickVerdicts: Verdict[];
  textFormVerdicts: Verdict[];
}

export function cardView(detail: CardDetail): CardView {
  const card = detail.card;
  const malfunction: CardSection = {
    kind: "malfunction",
    heading: "Malfunction",
    lines: [card.malfunction.description, card.malfunction.cause].filter(
      (s) => s.length > 0,
    ),
    media: [],
  };
  const solutions: CardSection = {
    kind: "solutions",
    heading: "Solutions",
    lines: card.solutions.map((s, i) => `${i + 1}. ${s.text}`),
    media: card.solutions.flatMap((s) => (s.media ? [s.media] : [])),
  };
  const comments: CardSection = {
    kind: "comments",
    heading: "Comments",
    lines: detail.comments.map((c) => `${c.author}: ${c.text}`),
    media: [],
  };
  return {
    cardId: card.card_id,
    version: card.version,
    sections: [malfunction, solutions, comments],
    oneClickVerdicts: ["confirm", "reject"],
    textFormVerdicts: [...TEXT_REQUIRED],
  };
}

export interface FeedbackDraft {
  recommendationId: string;
  cardId: string;
  verdict: Verdict;
  author: string;
  text: string;
}

export type DraftCheck = { ok: true } | { ok: false; message: string };

export function checkDraft(draft: FeedbackDraft): DraftCheck {
  if (TEXT_REQUIRED.includes(draft.verdict) && draft.text.trim() === "") {
    return {
      ok: false,
      message: `${draft.verdict} feedback needs a text before sending`,
    };
  }
  return { ok: true };
}

export type SubmitOutcome =
  | { ok: true; result: FeedbackResult }
  | { ok: false; message: string };

export async function submitFeedback(
  client: GatewayClient,
  draft: FeedbackDraft,
  timestamp: number,
): Promise<SubmitOutcome> {
  const check = checkDraft(draft);
  if (!check.ok) return { ok: false, message: check.message };
  try {
    const result = await client.sendFeedback({
      recommendation_id: draft.recommendationId,
      card_id: draft.cardId,
      verdict: draft.verdict,
      author: draft.author,
      timestamp,
      text: draft.text,
    });
    return { ok: true, result };
  } catch (err) {
    if (err instanceof GatewayError) {
      // e.g. feedback on a closed recommendation: show it, never swallow it
      return { ok: false, message: `${err.code}: ${err.message}` };
    }
    throw err;
  }
}

export interface CandidateRow {
  cardId: string;
  score: number;
  rank: number;
}

export interface CandidateList {
  recommendationId: string;
  situation: string;
  rows: CandidateRow[];
  /** shown when the gateway had nothing to suggest */
  emptyCallToAction: string | null;
}

export function candidateList(rec: Recommendation): CandidateList {
  const rows = rec.candidates.map(([cardId, score], i) => ({
    cardId,
    score,
    rank: i + 1,
  }));
  return {
    recommendationId: rec.recommendation_id,
    situation: rec.situation_label,
    rows,
    emptyCallToAction:
      rows.length === 0 ? "No matching cards yet - propose a new card" : null,
  };
}
