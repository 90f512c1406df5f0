/** Shared HTML-string helpers for the view modules. */

import type { ExecutionState } from "./api.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function attr(value: string): string {
  return `"${esc(value)}"`;
}

/** Status badge; one CSS class per execution state drives the colour. */
export function badge(status: ExecutionState): string {
  return `<span class="badge badge-${status.toLowerCase()}">${status}</span>`;
}

export function formatClock(epochSeconds: number | null): string {
  if (epochSeconds === null) return "-";
  return new Date(epochSeconds * 1000).toISOString().replace("T", " ").slice(0, 19);
}

export function formatAge(seconds: number): string {
  if (seconds < 1) return "<1 s ago";
  if (seconds < 120) return `${Math.round(seconds)} s ago`;
  return `${Math.round(seconds / 60)} min ago`;
}

export function errorBanner(message: string): string {
  return `<div class="banner banner-error">${esc(message)}</div>`;
}

export function infoBanner(message: string): string {
  return `<div class="banner banner-info">${esc(message)}</div>`;
}
