/** New-execution wizard: use case, then workflow, then init.
 *
 * Browsing the first two stages only reads the catalog. The init call is
 * the commit point; cancelling beforehand leaves no record behind.
 */

import type { ApiClient, UseCase, Workflow } from "../api.js";
import { errorBanner, esc } from "../render.js";

export type WizardState =
  | { stage: "usecase"; usecases: UseCase[] | null; error: string | null }
  | {
      stage: "workflow";
      usecase: UseCase;
      workflows: Workflow[] | null;
      selected: string | null;
      error: string | null;
    }
  | { stage: "done"; weid: string };

function usecaseStage(
  usecases: UseCase[] | null,
  error: string | null,
): string {
  const parts = ["<h3>1. Pick a use case</h3>"];
  if (error !== null) parts.push(errorBanner(error));
  if (usecases === null) {
    parts.push('<p class="empty">loading use cases...</p>');
  } else if (usecases.length === 0) {
    parts.push('<p class="empty">no use cases registered</p>');
  } else {
    parts.push('<ul class="choices">');
    for (const uc of usecases) {
      parts.push(
        `<li><button data-usecase="${esc(uc.id)}">${esc(uc.name)}</button>` +
          ` <span class="desc">${esc(uc.description)}</span></li>`,
      );
    }
    parts.push("</ul>");
  }
  return parts.join("\n");
}

function workflowStage(
  state: Extract<WizardState, { stage: "workflow" }>,
): string {
  const parts = [
    `<h3>2. Pick a workflow in ${esc(state.usecase.name)}</h3>`,
  ];
  if (state.error !== null) parts.push(errorBanner(state.error));
  if (state.workflows === null) {
    parts.push('<p class="empty">loading workflows...</p>');
  } else if (state.workflows.length === 0) {
    parts.push('<p class="empty">this use case has no workflows</p>');
  } else {
    parts.push('<ul class="choices">');
    for (const wf of state.workflows) {
      const checked = state.selected === wf.id ? " checked" : "";
      parts.push(
        "<li><label>" +
          `<input type="radio" name="workflow" value="${esc(wf.id)}"${checked}>` +
          ` ${esc(wf.name)} <span class="version">v${wf.version}</span>` +
          "</label></li>",
      );
    }
    parts.push("</ul>");
  }
  const disabled = state.selected === null ? " disabled" : "";
  parts.push(
    `<button class="commit"${disabled}>Create execution</button>`,
  );
  return parts.join("\n");
}

export function renderWizard(state: WizardState): string {
  const parts = ['<section class="wizard">', "<h2>New execution</h2>"];
  switch (state.stage) {
    case "usecase":
      parts.push(usecaseStage(state.usecases, state.error));
      break;
    case "workflow":
      parts.push(workflowStage(state));
      break;
    case "done":
      parts.push(
        `<p>created <a href="#/executions/${esc(state.weid)}">${esc(state.weid)}</a></p>`,
      );
      break;
  }
  parts.push('<a class="cancel" href="#/">Cancel</a>', "</section>");
  return parts.join("\n");
}

/** The single write of the wizard; everything before it is browsing. */
export async function commitWizard(
  api: Pick<ApiClient, "initExecution">,
  workflowId: string,
): Promise<string> {
  const { weid } = await api.initExecution(workflowId);
  return weid;
}
