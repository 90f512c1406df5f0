/** Monitor view: nameserver registry, job managers with load, live jobs. */

import type { JobRecord, PlatformStatus, RegistryEntry } from "../api.js";
import { errorBanner, esc, formatAge, formatClock } from "../render.js";

export interface MonitorState {
  registry: RegistryEntry[] | null;
  jobs: Record<string, JobRecord[]> | null;
  status: PlatformStatus | null;
  error: string | null;
  now: number;
}

const LIVE = new Set(["Pending", "Running"]);

function meta(entry: RegistryEntry, key: string): string {
  const value = entry.metadata.data[key];
  return value === undefined ? "-" : String(value);
}

/** "live/max" occupancy for a job manager, e.g. "1/2". */
export function managerLoad(
  entry: RegistryEntry,
  jobs: Record<string, JobRecord[]>,
): string {
  const max = entry.metadata.data["MaxJobs"];
  if (max === undefined) return "-";
  const live = (jobs[entry.name] ?? []).filter((j) => LIVE.has(j.status));
  return `${live.length}/${String(max)}`;
}

function registryRow(
  entry: RegistryEntry,
  jobs: Record<string, JobRecord[]>,
  now: number,
): string {
  return [
    "<tr>",
    `<td>${esc(entry.name)}</td>`,
    `<td>${esc(meta(entry, "Type"))}</td>`,
    `<td>${esc(meta(entry, "Model"))}</td>`,
    `<td><code>${esc(entry.ref.uri)}</code></td>`,
    `<td>${esc(formatAge(now - entry.last_heartbeat))}</td>`,
    `<td class="load">${esc(managerLoad(entry, jobs))}</td>`,
    "</tr>",
  ].join("");
}

function jobRow(job: JobRecord): string {
  return [
    "<tr>",
    `<td>${esc(job.job_id)}</td>`,
    `<td>${esc(job.model_name)}</td>`,
    `<td>${esc(job.status)}</td>`,
    `<td>${esc(job.user)}</td>`,
    `<td>${formatClock(job.spawned_at)}</td>`,
    "</tr>",
  ].join("");
}

export function renderMonitor(state: MonitorState): string {
  const parts = ['<section class="monitor">', "<h2>Platform monitor</h2>"];
  if (state.error !== null) {
    parts.push(errorBanner(`backend unreachable: ${state.error}`));
  }
  if (state.status !== null) {
    const sched = state.status.scheduler;
    parts.push(
      `<p class="scheduler">scheduler: ${sched.pending} pending, ` +
        `${sched.running} running &middot; store ${esc(state.status.db)}</p>`,
    );
  }
  parts.push("<h3>Registry</h3>");
  if (state.registry === null) {
    parts.push('<p class="empty">no data yet</p>');
  } else if (state.registry.length === 0) {
    parts.push('<p class="empty">no services registered</p>');
  } else {
    const jobs = state.jobs ?? {};
    parts.push(
      '<table class="registry"><thead><tr>' +
        "<th>name</th><th>type</th><th>model</th><th>uri</th>" +
        "<th>heartbeat</th><th>jobs</th></tr></thead><tbody>",
      ...state.registry.map((entry) => registryRow(entry, jobs, state.now)),
      "</tbody></table>",
    );
  }
  parts.push("<h3>Jobs</h3>");
  const managers = Object.keys(state.jobs ?? {}).sort();
  const records = managers.flatMap((name) => state.jobs![name] ?? []);
  if (state.jobs === null) {
    parts.push('<p class="empty">no data yet</p>');
  } else if (records.length === 0) {
    parts.push('<p class="empty">no jobs spawned</p>');
  } else {
    parts.push(
      '<table class="jobs"><thead><tr>' +
        "<th>job</th><th>model</th><th>status</th><th>user</th>" +
        "<th>spawned</th></tr></thead><tbody>",
      ...records.map(jobRow),
      "</tbody></table>",
    );
  }
  parts.push("</section>");
  return parts.join("\n");
}
