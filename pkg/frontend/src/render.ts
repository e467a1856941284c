/** HTML/SVG string rendering for the three main views.
 *
 * Kept free of DOM APIs so rendering stays testable in node; the host
 * page assigns the strings to innerHTML and wires events by data-action
 * attributes.
 */

import type { Board, BoardRow } from "./alarmBoard";
import type { CandidateList, CardView } from "./cardReader";
import type { TrendChart } from "./qualityTrends";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function rowHtml(row: BoardRow): string {
  const classes = ["alarm-row"];
  if (row.critical) classes.push("critical");
  if (row.highlighted) classes.push("rehighlight");
  if (row.acknowledged) classes.push("acked");
  const badge = row.badge
    ? `<span class="badge">${escapeHtml(row.badge)}</span>`
    : "";
  const members = row.expandable
    ? `<ul class="members hidden">${row.members
        .map((m) => `<li>${escapeHtml(m)}</li>`)
        .join("")}</ul>`
    : "";
  return (
    `<li class="${classes.join(" ")}" data-group="${escapeHtml(row.groupId)}">` +
    `<span class="title">${escapeHtml(row.title)}</span>${badge}` +
    `<button data-action="ack" ${row.acknowledged ? "disabled" : ""}>ack</button>` +
    members +
    `</li>`
  );
}

export function renderBoard(board: Board): string {
  const active = board.active.map(rowHtml).join("");
  const held = board.deprioritized.map(rowHtml).join("");
  return (
    `<section class="alarms-active"><h2>Alarms</h2><ul>${active}</ul></section>` +
    `<section class="alarms-held"><h2>Held back</h2><ul>${held}</ul></section>`
  );
}

const CHART_W = 640;
const CHART_H = 240;
const PAD = 24;

export function renderTrend(chart: TrendChart): string {
  if (chart.empty) {
    return `<div class="trend-empty">No forecasts for ${escapeHtml(chart.parameter)} yet</div>`;
  }
  const values = chart.points.flatMap((p) => [p.whiskerLow, p.whiskerHigh]);
  if (chart.specLow !== null) values.push(chart.specLow);
  if (chart.specHigh !== null) values.push(chart.specHigh);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const spanY = hi - lo || 1;
  const spanX = Math.max(chart.points.length - 1, 1);
  const x = (index: number) => PAD + (index / spanX) * (CHART_W - 2 * PAD);
  const y = (value: number) =>
    CHART_H - PAD - ((value - lo) / spanY) * (CHART_H - 2 * PAD);

  const parts: string[] = [];
  if (chart.specLow !== null && chart.specHigh !== null) {
    const top = y(chart.specHigh);
    parts.push(
      `<rect class="spec-band" x="${PAD}" y="${top}" width="${CHART_W - 2 * PAD}" ` +
        `height="${y(chart.specLow) - top}" />`,
    );
  }
  for (const p of chart.points) {
    parts.push(
      `<line class="whisker" x1="${x(p.index)}" y1="${y(p.whiskerLow)}" ` +
        `x2="${x(p.index)}" y2="${y(p.whiskerHigh)}" />`,
      `<circle class="forecast ${p.cls}${p.anomaly ? " anomaly" : ""}" ` +
        `cx="${x(p.index)}" cy="${y(p.value)}" r="3" fill="${p.color}" />`,
    );
    if (p.labValue !== null) {
      parts.push(
        `<circle class="lab" cx="${x(p.index)}" cy="${y(p.labValue)}" r="2" />`,
      );
    }
  }
  for (const marker of chart.markers) {
    // markers land between points by time; x by marker order keeps them visible
    const index = chart.markers.indexOf(marker);
    const mx = PAD + ((index + 1) / (chart.markers.length + 1)) * (CHART_W - 2 * PAD);
    parts.push(
      `<line class="changepoint ${marker.direction}" data-at="${marker.at}" ` +
        `x1="${mx}" y1="${PAD}" x2="${mx}" y2="${CHART_H - PAD}" />`,
    );
  }
  return (
    `<svg class="trend" viewBox="0 0 ${CHART_W} ${CHART_H}" role="img">` +
    parts.join("") +
    `</svg>`
  );
}

export function renderCard(view: CardView): string {
  const sections = view.sections
    .map(
      (s) =>
        `<section class="card-${s.kind}"><h3>${escapeHtml(s.heading)}</h3><ul>` +
        s.lines.map((line) => `<li>${escapeHtml(line)}</li>`).join("") +
        s.media
          .map((m) => `<img src="${escapeHtml(m)}" alt="solution media" />`)
          .join("") +
        `</ul></section>`,
    )
    .join("");
  const oneClick = view.oneClickVerdicts
    .map(
      (v) =>
        `<button data-action="feedback" data-verdict="${v}">${v}</button>`,
    )
    .join("");
  const withText = view.textFormVerdicts
    .map(
      (v) =>
        `<button data-action="feedback-form" data-verdict="${v}">${v}...</button>`,
    )
    .join("");
  return (
    `<article class="card" data-card="${escapeHtml(view.cardId)}">` +
    sections +
    `<footer class="feedback">${oneClick}${withText}</footer>` +
    `</article>`
  );
}

export function renderCandidates(list: CandidateList): string {
  if (list.emptyCallToAction) {
    return (
      `<div class="no-candidates"><p>${escapeHtml(list.emptyCallToAction)}</p>` +
      `<button data-action="propose-card">Propose new card</button></div>`
    );
  }
  const rows = list.rows
    .map(
      (r) =>
        `<li data-card="${escapeHtml(r.cardId)}">` +
        `<span class="rank">${r.rank}</span>` +
        `<span class="score">${r.score.toFixed(3)}</span></li>`,
    )
    .join("");
  return `<ol class="candidates">${rows}</ol>`;
}
