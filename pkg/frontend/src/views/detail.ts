/** Execution detail: input card form, steering controls, outputs. */

import type {
  ApiClient,
  ComponentDoc,
  ExecutionRecord,
  InputCardRow,
} from "../api.js";
import { ApiError } from "../api.js";
import { badge, errorBanner, esc, formatClock, infoBanner } from "../render.js";
import { renderHistogram } from "./histogram.js";

export interface DetailState {
  record: ExecutionRecord;
  card: InputCardRow[];
  /** Per-slot messages from rejected /set calls. */
  fieldErrors: Record<string, string>;
  banner: { kind: "info" | "error"; text: string } | null;
  busy: boolean;
}

function widget(slot: InputCardRow, editable: boolean): string {
  const disabled = editable ? "" : " disabled";
  const value = slot.value ?? slot.default ?? "";
  const common =
    `name="${esc(slot.name)}" value="${esc(value)}"${disabled}`;
  switch (slot.kind) {
    case "Scalar":
      return `<input type="number" step="any" ${common}>`;
    case "Property":
      return `<input type="text" placeholder="value ${esc(slot.unit)}" ${common}>`;
    case "Field-ref":
      return `<input type="text" class="fieldref" placeholder="field document (JSON)" ${common}>`;
  }
}

function cardRow(
  slot: InputCardRow,
  editable: boolean,
  fieldError: string | undefined,
): string {
  const marker = slot.required ? '<span class="required">*</span>' : "";
  const state = slot.set ? "set" : "unset";
  const error = fieldError
    ? `<p class="field-error">${esc(fieldError)}</p>`
    : "";
  return [
    `<div class="card-row" data-slot="${esc(slot.name)}">`,
    `<label>${esc(slot.name)}${marker} <span class="unit">[${esc(slot.unit)}]</span></label>`,
    widget(slot, editable),
    `<span class="slot-state slot-${state}">${state}</span>`,
    error,
    "</div>",
  ].join("");
}

function renderOutputValue(doc: ComponentDoc): string {
  if (doc._class === "Property") {
    const value = Array.isArray(doc.value)
      ? `[${doc.value.map((v) => String(v)).join(", ")}]`
      : String(doc.value);
    return `<code>${esc(value)}</code> ${esc(doc.unit.symbol)}`;
  }
  const shape = `${doc.values.length} values x ${doc.value_dim}`;
  return `Field <code>${esc(doc.field_id)}</code> (${esc(shape)}) [${esc(doc.unit.symbol)}]`;
}

export function renderOutputs(outputs: Record<string, ComponentDoc>): string {
  const names = Object.keys(outputs).sort();
  if (names.length === 0) return '<p class="empty">no outputs recorded</p>';
  const rows = names.map(
    (name) =>
      `<tr><td>${esc(name)}</td><td>${renderOutputValue(outputs[name]!)}</td></tr>`,
  );
  const parts = [
    '<table class="outputs"><tbody>',
    ...rows,
    "</tbody></table>",
  ];
  const edges = outputs["PID_HistogramEdges"];
  const counts = outputs["PID_HistogramCounts"];
  if (
    edges?._class === "Property" &&
    counts?._class === "Property" &&
    Array.isArray(edges.value) &&
    Array.isArray(counts.value)
  ) {
    parts.push(renderHistogram(edges.value, counts.value, edges.unit.symbol));
  }
  return parts.join("\n");
}

export function renderDetail(state: DetailState): string {
  const { record } = state;
  const editable = record.status === "Created" && !state.busy;
  const parts: string[] = [
    '<section class="detail">',
    `<header><h2>${esc(record.weid)}</h2>${badge(record.status)}</header>`,
    `<p class="meta">workflow <code>${esc(record.workflow_id)}</code>` +
      ` &middot; created ${formatClock(record.created_at)}</p>`,
  ];
  if (state.banner !== null) {
    const render = state.banner.kind === "info" ? infoBanner : errorBanner;
    parts.push(render(state.banner.text));
  }
  if (record.status === "Failed" && record.error !== null) {
    parts.push(errorBanner(record.error));
  }
  parts.push('<form class="input-card">');
  for (const slot of state.card) {
    parts.push(cardRow(slot, editable, state.fieldErrors[slot.name]));
  }
  const runDisabled = editable ? "" : " disabled";
  parts.push(
    `<button type="submit" class="run"${runDisabled}>Run workflow</button>`,
    "</form>",
  );
  if (!editable && record.status !== "Created") {
    parts.push(
      `<p class="frozen">inputs are frozen: execution is ${esc(record.status)}</p>`,
    );
  }
  if (record.status === "Finished") {
    parts.push("<h3>Outputs</h3>", renderOutputs(record.outputs));
  }
  parts.push("</section>");
  return parts.join("\n");
}

export interface SubmitResult {
  ok: boolean;
  fieldErrors: Record<string, string>;
  /** Message from a rejected /executeworkflow, null otherwise. */
  error: string | null;
}

function describe(err: unknown): string {
  return err instanceof ApiError ? `${err.type}: ${err.msg}` : String(err);
}

/** Steering client for the input card.
 *
 * One /set call per field in card order, then /executeworkflow; a rejected
 * set stops the conversation before anything runs and reports inline.
 */
export async function submitCard(
  api: Pick<ApiClient, "setInput" | "execute">,
  weid: string,
  entries: Array<[string, string]>,
): Promise<SubmitResult> {
  for (const [name, value] of entries) {
    try {
      await api.setInput(weid, name, value);
    } catch (err) {
      return { ok: false, fieldErrors: { [name]: describe(err) }, error: null };
    }
  }
  try {
    await api.execute(weid);
  } catch (err) {
    return { ok: false, fieldErrors: {}, error: describe(err) };
  }
  return { ok: true, fieldErrors: {}, error: null };
}
