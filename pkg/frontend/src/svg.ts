/**
 * Minimal deterministic SVG scaffolding.
 *
 * Everything here is a pure function of its inputs: fixed precision
 * number formatting, no dates, no randomness, so rendering the same
 * table twice yields the same bytes.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 48, right: 168, bottom: 52, left: 76 };

export const PALETTE = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#555555"];

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Stable short label for a number; String(Number(...)) round-trips per spec. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) return x > 0 ? "inf" : x < 0 ? "-inf" : "nan";
  if (Number.isInteger(x) && Math.abs(x) < 1e15) return String(x);
  return String(Number(x.toPrecision(6)));
}

/** Pixel coordinate, fixed at two decimals so bytes cannot wobble. */
export function px(x: number): string {
  return x.toFixed(2);
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  ticks: number[];
}

function tickStep(lo: number, hi: number, count: number): number {
  const raw = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  if (norm >= 7.5) return 10 * mag;
  if (norm >= 3.5) return 5 * mag;
  if (norm >= 1.5) return 2 * mag;
  return mag;
}

export function linearScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
  count = 6,
): Scale {
  if (hi <= lo) {
    hi = lo === 0 ? 1 : lo + Math.abs(lo);
    lo = lo === 0 ? -1 : lo - Math.abs(lo);
  }
  const step = tickStep(lo, hi, count);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)) + 0);
  }
  const f = ((value: number) =>
    rangeLo + ((value - lo) / (hi - lo)) * (rangeHi - rangeLo)) as Scale;
  f.domain = [lo, hi];
  f.ticks = ticks;
  return f;
}

/** Log10 scale over whole decades; caller guarantees lo, hi positive. */
export function logScale(
  lo: number,
  hi: number,
  rangeLo: number,
  rangeHi: number,
): Scale {
  const dLo = Math.floor(Math.log10(lo));
  const dHi = Math.ceil(Math.log10(hi));
  const ticks: number[] = [];
  for (let d = dLo; d <= dHi; d++) ticks.push(d);
  const f = ((value: number) =>
    rangeLo + ((Math.log10(value) - dLo) / (dHi - dLo)) * (rangeHi - rangeLo)) as Scale;
  f.domain = [Math.pow(10, dLo), Math.pow(10, dHi)];
  f.ticks = ticks;
  return f;
}

export function decadeLabel(exponent: number): string {
  return `1e${exponent}`;
}

export function openSvg(title: string, subtitle: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${MARGIN.left}" y="22" font-size="15" font-weight="bold" fill="#222222">${esc(title)}</text>`,
    `<text x="${MARGIN.left}" y="38" font-size="11" fill="#777777">${esc(subtitle)}</text>`,
  ];
}

export function xAxis(out: string[], scale: Scale, label: string, format: (v: number) => string): void {
  const y0 = HEIGHT - MARGIN.bottom;
  out.push(`<line x1="${MARGIN.left}" y1="${px(y0)}" x2="${WIDTH - MARGIN.right}" y2="${px(y0)}" stroke="#333333"/>`);
  for (const t of scale.ticks) {
    const x = px(scale(t));
    out.push(`<line x1="${x}" y1="${px(y0)}" x2="${x}" y2="${px(y0 + 5)}" stroke="#333333"/>`);
    out.push(`<text x="${x}" y="${px(y0 + 18)}" font-size="11" text-anchor="middle" fill="#333333">${esc(format(t))}</text>`);
  }
  out.push(`<text x="${px((MARGIN.left + WIDTH - MARGIN.right) / 2)}" y="${px(HEIGHT - 12)}" font-size="12" text-anchor="middle" fill="#333333">${esc(label)}</text>`);
}

export function yAxis(
  out: string[],
  scale: Scale,
  label: string,
  format: (v: number) => string,
  tickValue: (t: number) => number = (t) => t,
): void {
  const x0 = MARGIN.left;
  out.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${HEIGHT - MARGIN.bottom}" stroke="#333333"/>`);
  for (const t of scale.ticks) {
    const y = px(scale(tickValue(t)));
    out.push(`<line x1="${px(x0 - 5)}" y1="${y}" x2="${x0}" y2="${y}" stroke="#333333"/>`);
    out.push(`<line x1="${x0}" y1="${y}" x2="${WIDTH - MARGIN.right}" y2="${y}" stroke="#eeeeee"/>`);
    out.push(`<text x="${px(x0 - 8)}" y="${y}" font-size="11" text-anchor="end" dominant-baseline="middle" fill="#333333">${esc(format(t))}</text>`);
  }
  out.push(`<text x="18" y="${px((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)}" font-size="12" text-anchor="middle" fill="#333333" transform="rotate(-90 18 ${px((MARGIN.top + HEIGHT - MARGIN.bottom) / 2)})">${esc(label)}</text>`);
}

export function polyline(points: Array<[number, number]>, stroke: string, dash = ""): string {
  const pts = points.map(([x, y]) => `${px(x)},${px(y)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.8"${dashAttr}/>`;
}

export function legendEntry(out: string[], slot: number, color: string, text: string, dash = ""): void {
  const x = WIDTH - MARGIN.right + 14;
  const y = MARGIN.top + 10 + slot * 20;
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  out.push(`<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${color}" stroke-width="2"${dashAttr}/>`);
  out.push(`<text x="${x + 28}" y="${y + 4}" font-size="11" fill="#333333">${esc(text)}</text>`);
}
