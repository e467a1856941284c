/** Console state: a cache over gateway reads, never a second truth.
 *
 * Everything in here can be rebuilt by loadAll() against a fresh gateway
 * connection, which is exactly what a page reload does.  The two local
 * invariants are enforced on write: a group can only be marked
 * acknowledged once it has been seen, and feedback drafts may only
 * reference recommendations that are still open.
 */

import type { GatewayClient } from "./api";
import type { FeedbackDraft } from "./cardReader";
import { checkDraft } from "./cardReader";
import type {
  FloodMetrics,
  JournalEntry,
  PresentationUnit,
  Recommendation,
} from "./types";

export type ConsoleView =
  | "alarm_board"
  | "quality_trends"
  | "card_reader"
  | "event_timeline";

export class InvariantError extends Error {}

export class ConsoleStore {
  view: ConsoleView = "alarm_board";
  selectedLocation: string | null = null;

  units: PresentationUnit[] = [];
  metrics: FloodMetrics | null = null;
  recommendations: Recommendation[] = [];
  timeline: JournalEntry[] = [];

  /** group ids that have appeared on the board at least once */
  readonly seenGroups = new Set<string>();
  /** local echo of acknowledged groups; server truth is plan.acknowledged_at */
  readonly acknowledged = new Set<string>();
  readonly drafts: FeedbackDraft[] = [];

  setUnits(units: PresentationUnit[]): void {
    this.units = units;
    for (const unit of units) {
      this.seenGroups.add(unit.group_id);
      if (unit.plan.acknowledged_at !== null) {
        this.acknowledged.add(unit.group_id);
      }
    }
  }

  markAcknowledged(groupId: string): void {
    if (!this.seenGroups.has(groupId)) {
      throw new InvariantError(
        `cannot acknowledge ${groupId}: never shown on this board`,
      );
    }
    this.acknowledged.add(groupId);
  }

  openRecommendation(recommendationId: string): Recommendation | undefined {
    return this.recommendations.find(
      (r) =>
        r.recommendation_id === recommendationId && r.disposition === "open",
    );
  }

  addDraft(draft: FeedbackDraft): void {
    if (!this.openRecommendation(draft.recommendationId)) {
      throw new InvariantError(
        `draft references ${draft.recommendationId}, which is not open`,
      );
    }
    this.drafts.push(draft);
  }

  /** Drafts ready to send; the text rule is checked again at submit time. */
  sendableDrafts(): FeedbackDraft[] {
    return this.drafts.filter((d) => checkDraft(d).ok);
  }

  removeDraft(draft: FeedbackDraft): void {
    const index = this.drafts.indexOf(draft);
    if (index >= 0) this.drafts.splice(index, 1);
  }

  appendTimeline(entry: JournalEntry): void {
    this.timeline.push(entry);
    if (entry.type === "alarm_unit") {
      const groupId = (entry.payload as { group_id?: string }).group_id;
      if (groupId) this.seenGroups.add(groupId);
    }
  }

  /** Rebuild the whole view state from gateway reads alone. */
  async loadAll(client: GatewayClient): Promise<void> {
    const groups = await client.alarmGroups();
    this.setUnits(groups.units);
    this.metrics = await client.floodMetrics();
    this.recommendations = await client.recommendations();
    // drafts for recommendations that closed since the last refresh die here
    for (const draft of [...this.drafts]) {
      if (!this.openRecommendation(draft.recommendationId)) {
        this.removeDraft(draft);
      }
    }
  }
}
