import { describe, expect, it } from "vitest";

import type { UseCase, Workflow } from "../src/api.js";
import { commitWizard, renderWizard } from "../src/views/wizard.js";

const USECASE: UseCase = {
  id: "Airframe-toy",
  name: "Airframe toy problem",
  description: "coupled thermo-mechanical panel studies",
};

const WORKFLOWS: Workflow[] = [
  {
    id: "W_thermo_mech",
    usecase_id: "Airframe-toy",
    name: "thermo-mechanical elongation",
    version: 1,
    input_card_template: [],
    output_card_template: [],
  },
  {
    id: "W_uq",
    usecase_id: "Airframe-toy",
    name: "buckling uncertainty study",
    version: 1,
    input_card_template: [],
    output_card_template: [],
  },
];

describe("new-execution wizard", () => {
  it("offers the use cases as the first stage", () => {
    const html = renderWizard({ stage: "usecase", usecases: [USECASE], error: null });
    expect(html).toContain('data-usecase="Airframe-toy"');
    expect(html).toContain("Airframe toy problem");
    expect(html).toContain('href="#/"');
  });

  it("keeps the commit button disabled until a workflow is picked", () => {
    const base = {
      stage: "workflow" as const,
      usecase: USECASE,
      workflows: WORKFLOWS,
      error: null,
    };
    expect(renderWizard({ ...base, selected: null })).toContain(
      '<button class="commit" disabled>',
    );
    const picked = renderWizard({ ...base, selected: "W_uq" });
    expect(picked).toContain('<button class="commit">');
    expect(picked).toContain('value="W_uq" checked');
  });

  it("renders empty and loading states explicitly", () => {
    expect(renderWizard({ stage: "usecase", usecases: null, error: null })).toContain(
      "loading use cases",
    );
    expect(renderWizard({ stage: "usecase", usecases: [], error: null })).toContain(
      "no use cases registered",
    );
  });

  it("links to the new execution after commit", () => {
    const html = renderWizard({ stage: "done", weid: "we-77" });
    expect(html).toContain('href="#/executions/we-77"');
  });

  it("commits by calling init exactly once", async () => {
    const calls: string[] = [];
    const api = {
      initExecution: (id: string) => {
        calls.push(id);
        return Promise.resolve({ weid: "we-77" });
      },
    };
    const weid = await commitWizard(api, "W_uq");
    expect(weid).toBe("we-77");
    expect(calls).toEqual(["W_uq"]);
  });

  it("always offers cancel, which routes home without touching the API", () => {
    // Rendering is pure: the wizard has no client handle, so browsing and
    // cancelling cannot create a record. commitWizard is the only write.
    const browsing = renderWizard({
      stage: "workflow",
      usecase: USECASE,
      workflows: WORKFLOWS,
      selected: "W_uq",
      error: null,
    });
    expect(browsing).toContain('<a class="cancel" href="#/">Cancel</a>');
    expect(browsing).toBe(
      renderWizard({
        stage: "workflow",
        usecase: USECASE,
        workflows: WORKFLOWS,
        selected: "W_uq",
        error: null,
      }),
    );
  });
});
