/** Hash router, poll loop, and DOM wiring around the pure views.
 *
 * Views render HTML strings from state; this layer owns the state, talks to
 * the API client, and swaps innerHTML. One poll may be in flight per view.
 */

import { ApiClient, ApiError } from "./api.js";
import type { ExecutionRecord, InputCardRow, UseCase } from "./api.js";
import { esc } from "./render.js";
import { renderExecutionList } from "./views/executions.js";
import type { ExecutionListState } from "./views/executions.js";
import { renderDetail, submitCard } from "./views/detail.js";
import type { DetailState } from "./views/detail.js";
import { commitWizard, renderWizard } from "./views/wizard.js";
import type { WizardState } from "./views/wizard.js";
import { renderMonitor } from "./views/monitor.js";
import type { MonitorState } from "./views/monitor.js";

const POLL_MS = 2000;

function nowSeconds(): number {
  return Date.now() / 1000;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.type}: ${err.msg}`;
  return String(err);
}

type Route =
  | { view: "executions" }
  | { view: "detail"; weid: string }
  | { view: "wizard" }
  | { view: "monitor" };

export function parseRoute(hash: string): Route {
  const path = hash.replace(/^#/, "") || "/";
  const detail = /^\/executions\/([^/]+)$/.exec(path);
  if (detail) return { view: "detail", weid: detail[1]! };
  if (path === "/new") return { view: "wizard" };
  if (path === "/monitor") return { view: "monitor" };
  return { view: "executions" };
}

export class App {
  private route: Route = { view: "executions" };
  private timer: number | undefined;
  private polling = false;

  private list: ExecutionListState = {
    records: null,
    lastUpdated: null,
    error: null,
    now: nowSeconds(),
  };
  private detail: DetailState | null = null;
  private detailError: string | null = null;
  private formValues: Record<string, string> = {};
  private wizard: WizardState = {
    stage: "usecase",
    usecases: null,
    error: null,
  };
  private monitor: MonitorState = {
    registry: null,
    jobs: null,
    status: null,
    error: null,
    now: nowSeconds(),
  };

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly baseUrl: string,
  ) {}

  start(): void {
    window.addEventListener("hashchange", () => this.onRoute());
    this.root.addEventListener("click", (ev) => this.onClick(ev));
    this.root.addEventListener("submit", (ev) => this.onSubmit(ev));
    this.root.addEventListener("input", (ev) => this.onInput(ev));
    this.root.addEventListener("change", (ev) => this.onChange(ev));
    this.timer = window.setInterval(() => void this.poll(), POLL_MS);
    this.onRoute();
  }

  stop(): void {
    if (this.timer !== undefined) window.clearInterval(this.timer);
  }

  private onRoute(): void {
    this.route = parseRoute(window.location.hash);
    if (this.route.view === "detail") {
      this.detail = null;
      this.detailError = null;
      this.formValues = {};
    }
    if (this.route.view === "wizard") {
      this.wizard = { stage: "usecase", usecases: null, error: null };
      void this.loadUsecases();
    }
    this.render();
    void this.poll();
  }

  private async poll(): Promise<void> {
    if (this.polling) return;
    this.polling = true;
    try {
      if (this.route.view === "executions") await this.pollExecutions();
      else if (this.route.view === "detail") await this.pollDetail();
      else if (this.route.view === "monitor") await this.pollMonitor();
    } finally {
      this.polling = false;
    }
    this.render();
  }

  private async pollExecutions(): Promise<void> {
    try {
      const records = await this.api.executions();
      this.list = {
        records,
        lastUpdated: nowSeconds(),
        error: null,
        now: nowSeconds(),
      };
    } catch (err) {
      this.list = { ...this.list, error: describe(err), now: nowSeconds() };
    }
  }

  private async pollDetail(): Promise<void> {
    if (this.route.view !== "detail") return;
    if (this.detail?.busy) return;
    try {
      const record = await this.api.execution(this.route.weid);
      const card = await this.api.inputCard(this.route.weid);
      this.detail = {
        record,
        card,
        fieldErrors: this.detail?.fieldErrors ?? {},
        banner: this.detail?.banner ?? null,
        busy: false,
      };
      this.detailError = null;
    } catch (err) {
      this.detailError = describe(err);
    }
  }

  private async pollMonitor(): Promise<void> {
    try {
      const [registry, jobs, status] = await Promise.all([
        this.api.registry(),
        this.api.jobs(),
        this.api.status(),
      ]);
      this.monitor = { registry, jobs, status, error: null, now: nowSeconds() };
    } catch (err) {
      this.monitor = { ...this.monitor, error: describe(err), now: nowSeconds() };
    }
  }

  private async loadUsecases(): Promise<void> {
    try {
      const usecases = await this.api.usecases();
      if (this.wizard.stage === "usecase") {
        this.wizard = { stage: "usecase", usecases, error: null };
      }
    } catch (err) {
      this.wizard = { stage: "usecase", usecases: null, error: describe(err) };
    }
    this.render();
  }

  private async pickUsecase(usecase: UseCase): Promise<void> {
    this.wizard = {
      stage: "workflow",
      usecase,
      workflows: null,
      selected: null,
      error: null,
    };
    this.render();
    try {
      const workflows = await this.api.usecaseWorkflows(usecase.id);
      if (this.wizard.stage === "workflow") {
        this.wizard = { ...this.wizard, workflows };
      }
    } catch (err) {
      if (this.wizard.stage === "workflow") {
        this.wizard = { ...this.wizard, error: describe(err) };
      }
    }
    this.render();
  }

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement | null;
    if (!target) return;
    const choice = target.closest("button[data-usecase]");
    if (choice && this.wizard.stage === "usecase" && this.wizard.usecases) {
      const id = choice.getAttribute("data-usecase");
      const usecase = this.wizard.usecases.find((uc) => uc.id === id);
      if (usecase) void this.pickUsecase(usecase);
      return;
    }
    if (target.closest("button.commit") && this.wizard.stage === "workflow") {
      ev.preventDefault();
      const selected = this.wizard.selected;
      if (selected !== null) void this.commit(selected);
    }
  }

  private async commit(workflowId: string): Promise<void> {
    try {
      const weid = await commitWizard(this.api, workflowId);
      this.wizard = { stage: "done", weid };
      window.location.hash = `#/executions/${weid}`;
    } catch (err) {
      if (this.wizard.stage === "workflow") {
        this.wizard = { ...this.wizard, error: describe(err) };
        this.render();
      }
    }
  }

  private onChange(ev: Event): void {
    const input = ev.target as HTMLInputElement | null;
    if (!input) return;
    if (input.name === "workflow" && this.wizard.stage === "workflow") {
      this.wizard = { ...this.wizard, selected: input.value };
      this.render();
    }
  }

  private onInput(ev: Event): void {
    const input = ev.target as HTMLInputElement | null;
    if (!input || !input.name || this.route.view !== "detail") return;
    if (input.name === "workflow") return;
    this.formValues[input.name] = input.value;
  }

  private onSubmit(ev: Event): void {
    ev.preventDefault();
    if (this.route.view !== "detail" || !this.detail) return;
    void this.runCard(this.route.weid);
  }

  private async runCard(weid: string): Promise<void> {
    if (!this.detail) return;
    const entries: Array<[string, string]> = [];
    for (const slot of this.detail.card) {
      const value = this.formValues[slot.name] ?? slot.value ?? slot.default;
      if (value !== null && value !== undefined && value !== "") {
        entries.push([slot.name, value]);
      }
    }
    this.detail = { ...this.detail, busy: true, banner: null, fieldErrors: {} };
    this.render();
    const result = await submitCard(this.api, weid, entries);
    const banner = result.ok
      ? { kind: "info" as const, text: "workflow submitted" }
      : result.error !== null
        ? { kind: "error" as const, text: result.error }
        : null;
    this.detail = {
      ...this.detail,
      busy: false,
      fieldErrors: result.fieldErrors,
      banner,
    };
    if (result.ok) this.formValues = {};
    await this.pollDetail();
    this.render();
  }

  private merged(card: InputCardRow[]): InputCardRow[] {
    return card.map((slot) =>
      this.formValues[slot.name] !== undefined
        ? { ...slot, value: this.formValues[slot.name]! }
        : slot,
    );
  }

  private body(): string {
    switch (this.route.view) {
      case "executions":
        return renderExecutionList(this.list);
      case "detail": {
        if (this.detail === null) {
          const note = this.detailError
            ? `<div class="banner banner-error">${esc(this.detailError)}</div>`
            : "";
          return `<section class="detail">${note}<p class="empty">loading execution...</p></section>`;
        }
        const state = { ...this.detail, card: this.merged(this.detail.card) };
        const note = this.detailError
          ? `<div class="banner banner-error">backend unreachable: ${esc(this.detailError)}</div>`
          : "";
        return note + renderDetail(state);
      }
      case "wizard":
        return renderWizard(this.wizard);
      case "monitor":
        return renderMonitor(this.monitor);
    }
  }

  private render(): void {
    const active = (view: Route["view"]): string =>
      this.route.view === view ? ' class="active"' : "";
    this.root.innerHTML = [
      '<nav class="topbar">',
      `<span class="brand">copla dashboard</span>`,
      `<a href="#/"${active("executions")}>Executions</a>`,
      `<a href="#/new"${active("wizard")}>New</a>`,
      `<a href="#/monitor"${active("monitor")}>Monitor</a>`,
      `<span class="api-base">${esc(this.baseUrl)}</span>`,
      "</nav>",
      this.body(),
    ].join("\n");
  }
}

/** Single configuration knob: REST base URL via ?api=, else the CLI default. */
export function resolveBaseUrl(search: string): string {
  const params = new URLSearchParams(search.replace(/^\?/, ""));
  return params.get("api") ?? "http://127.0.0.1:8100";
}

export function mount(root: HTMLElement): App {
  const base = resolveBaseUrl(window.location.search);
  const app = new App(root, new ApiClient(base), base);
  app.start();
  return app;
}
