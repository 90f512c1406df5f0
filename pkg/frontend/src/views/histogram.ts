/** Inline SVG bar chart for histogram outputs (bin edges + counts). */

import { esc } from "../render.js";

const WIDTH = 480;
const HEIGHT = 180;
const PAD = 24;

function short(x: number): string {
  if (x === 0) return "0";
  const magnitude = Math.abs(x);
  if (magnitude >= 1e4 || magnitude < 1e-2) return x.toExponential(2);
  return x.toPrecision(4);
}

export function renderHistogram(
  edges: number[],
  counts: number[],
  unit: string,
): string {
  if (counts.length === 0 || edges.length !== counts.length + 1) {
    return '<p class="empty">histogram data malformed</p>';
  }
  const peak = Math.max(...counts, 1);
  const plotW = WIDTH - 2 * PAD;
  const plotH = HEIGHT - 2 * PAD;
  const barW = plotW / counts.length;
  const bars = counts.map((count, i) => {
    const h = (count / peak) * plotH;
    const x = PAD + i * barW;
    const y = HEIGHT - PAD - h;
    return (
      `<rect class="bar" x="${x.toFixed(1)}" y="${y.toFixed(1)}"` +
      ` width="${(barW * 0.92).toFixed(1)}" height="${h.toFixed(1)}">` +
      `<title>[${short(edges[i]!)}, ${short(edges[i + 1]!)}): ${count}</title>` +
      "</rect>"
    );
  });
  return [
    `<svg class="histogram" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img">`,
    `<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"/>`,
    ...bars,
    `<text class="tick" x="${PAD}" y="${HEIGHT - 6}">${esc(short(edges[0]!))}</text>`,
    `<text class="tick" text-anchor="end" x="${WIDTH - PAD}" y="${HEIGHT - 6}">` +
      `${esc(short(edges[edges.length - 1]!))}</text>`,
    `<text class="tick" text-anchor="middle" x="${WIDTH / 2}" y="${HEIGHT - 6}">${esc(unit)}</text>`,
    "</svg>",
  ].join("\n");
}
