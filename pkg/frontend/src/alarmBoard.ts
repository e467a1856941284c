/** Alarm board view-model: one row per presentation unit.
 *
 * Hold-flagged units move to a deprioritized section but stay on the
 * board; hiding them would turn a ranking decision into data loss.
 * Critical rows re-highlight at their scheduled re-notification times
 * instead of interrupting with modals.
 */

import type { GatewayClient } from "./api";
import { GatewayError } from "./api";
import type { PresentationUnit } from "./types";

export interface BoardRow {
  groupId: string;
  kind: string;
  /** representative alarm, the line the operator reads first */
  title: string;
  severity: string;
  /** "×30" on chatter and sequence rows, null on singletons */
  badge: string | null;
  count: number;
  /** member alarm ids, shown when the row is expanded */
  members: string[];
  expandable: boolean;
  importance: string;
  critical: boolean;
  held: boolean;
  acknowledged: boolean;
  /** re-notification times that have fired by `now` (first push excluded) */
  rehighlights: number[];
  /** true when the row should pulse right now */
  highlighted: boolean;
  firstTs: number;
  lastTs: number;
  linkedCardIds: string[];
}

export interface Board {
  active: BoardRow[];
  deprioritized: BoardRow[];
  /** active + deprioritized, original order; always one row per unit */
  rows: BoardRow[];
}

const HIGHLIGHT_WINDOW_MS = 60_000;

export function boardRow(unit: PresentationUnit, now: number): BoardRow {
  const rep = unit.representative;
  const acknowledged = unit.plan.acknowledged_at !== null;
  // due re-notifications: past pushes after the first, cut off by an ack
  const cutoff = unit.plan.acknowledged_at ?? Infinity;
  const rehighlights = unit.plan.notify_at
    .slice(1)
    .filter((t) => t <= now && t <= cutoff);
  const critical = unit.importance === "critical";
  return {
    groupId: unit.group_id,
    kind: unit.kind,
    title: `${rep.tag} ${rep.error_code}`,
    severity: rep.severity,
    badge: unit.count > 1 ? `×${unit.count}` : null,
    count: unit.count,
    members: unit.members,
    expandable: unit.count > 1,
    importance: unit.importance,
    critical,
    held: unit.status === "hold",
    acknowledged,
    rehighlights,
    highlighted:
      critical &&
      !acknowledged &&
      rehighlights.some((t) => now - t <= HIGHLIGHT_WINDOW_MS),
    firstTs: unit.first_ts,
    lastTs: unit.last_ts,
    linkedCardIds: unit.card_ids,
  };
}

export function buildBoard(units: PresentationUnit[], now: number): Board {
  const rows = units.map((u) => boardRow(u, now));
  return {
    rows,
    active: rows.filter((r) => !r.held),
    deprioritized: rows.filter((r) => r.held),
  };
}

export interface AckOutcome {
  ok: boolean;
  unit?: PresentationUnit;
  message?: string;
}

/** Optimistic acknowledge: mark locally, post, reconcile with the server's
 * view of the unit; roll the mark back when the gateway refuses. */
export async function acknowledgeGroup(
  client: GatewayClient,
  units: PresentationUnit[],
  groupId: string,
  at: number,
): Promise<AckOutcome> {
  const index = units.findIndex((u) => u.group_id === groupId);
  if (index < 0) return { ok: false, message: `unknown group ${groupId}` };
  const previous = units[index]!;
  units[index] = {
    ...previous,
    plan: { ...previous.plan, acknowledged_at: at },
  };
  try {
    const confirmed = await client.acknowledge(groupId, at);
    units[index] = confirmed;
    return { ok: true, unit: confirmed };
  } catch (err) {
    units[index] = previous;
    if (err instanceof GatewayError) {
      return { ok: false, message: `${err.code}: ${err.message}` };
    }
    throw err;
  }
}
