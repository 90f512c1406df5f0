/** Execution list: every record the platform knows, newest first. */

import type { ExecutionRecord } from "../api.js";
import { badge, errorBanner, esc, formatAge, formatClock } from "../render.js";

export interface ExecutionListState {
  /** Last successfully fetched records, kept across poll failures. */
  records: ExecutionRecord[] | null;
  /** Epoch seconds of the last successful poll. */
  lastUpdated: number | null;
  /** Message from the most recent failed poll, null while healthy. */
  error: string | null;
  /** Current epoch seconds, for staleness display. */
  now: number;
}

function row(record: ExecutionRecord): string {
  const finished = record.status === "Failed" && record.error
    ? esc(record.error)
    : formatClock(record.finished_at);
  return [
    "<tr>",
    `<td><a href="#/executions/${esc(record.weid)}">${esc(record.weid)}</a></td>`,
    `<td>${esc(record.workflow_id)}</td>`,
    `<td>${badge(record.status)}</td>`,
    `<td>${formatClock(record.created_at)}</td>`,
    `<td>${finished}</td>`,
    "</tr>",
  ].join("");
}

export function staleness(state: ExecutionListState): string {
  if (state.lastUpdated === null) return "never updated";
  return `updated ${formatAge(state.now - state.lastUpdated)}`;
}

export function renderExecutionList(state: ExecutionListState): string {
  const parts: string[] = [
    '<section class="executions">',
    "<header><h2>Workflow executions</h2>" +
      `<span class="staleness">${esc(staleness(state))}</span>` +
      '<a class="button" href="#/new">New execution</a></header>',
  ];
  if (state.error !== null) {
    parts.push(errorBanner(`backend unreachable: ${state.error}`));
  }
  if (state.records === null) {
    parts.push('<p class="empty">no data yet</p>');
  } else if (state.records.length === 0) {
    parts.push('<p class="empty">no executions recorded</p>');
  } else {
    const ordered = [...state.records].sort((a, b) => b.created_at - a.created_at);
    parts.push(
      '<table class="records"><thead><tr>' +
        "<th>execution</th><th>workflow</th><th>status</th>" +
        "<th>created</th><th>finished / error</th>" +
        "</tr></thead><tbody>",
      ...ordered.map(row),
      "</tbody></table>",
    );
  }
  parts.push("</section>");
  return parts.join("\n");
}
