/**
 * The three figure kinds, each a pure Table -> SVG string function.
 *
 * bound_vs_param  sweep.v1   bound components against the swept parameter
 * order_decay     energy.v1  per-order |term| with the fitted envelope
 * qei_band        qei.v1     truncated energy band against the -K floor
 */

import { DataError, num, Table } from "./csv.js";
import {
  decadeLabel,
  esc,
  fmt,
  HEIGHT,
  legendEntry,
  linearScale,
  logScale,
  MARGIN,
  openSvg,
  PALETTE,
  polyline,
  px,
  WIDTH,
  xAxis,
  yAxis,
} from "./svg.js";

export interface KindSpec {
  schema: string;
  columns: string[];
  render(t: Table): string;
}

const PLOT_RIGHT = WIDTH - MARGIN.right;
const PLOT_BOTTOM = HEIGHT - MARGIN.bottom;

function closeSvg(out: string[]): string {
  out.push("</svg>");
  return out.join("\n") + "\n";
}

function logDomain(values: number[]): [number, number] {
  const pos = values.filter((v) => Number.isFinite(v) && v > 0);
  if (pos.length === 0) return [1e-1, 1e1];
  return [Math.min(...pos), Math.max(...pos)];
}

function renderBoundVsParam(t: Table): string {
  const rows = [...t.rows].sort((p, q) => num(p, "value") - num(q, "value"));
  const parameter = rows[0].parameter;
  const xs = rows.map((r) => num(r, "value"));
  const series: Array<{ label: string; color: string; ys: number[] }> = [
    {
      label: "K0",
      color: PALETTE[0],
      ys: rows.map((r) => num(r, "K0_straight") + num(r, "K0_accel")),
    },
    { label: "KV", color: PALETTE[1], ys: rows.map((r) => num(r, "KV")) },
    { label: "KH", color: PALETTE[2], ys: rows.map((r) => num(r, "KH")) },
    { label: "K total", color: PALETTE[3], ys: rows.map((r) => num(r, "K_total")) },
  ];

  const [yLo, yHi] = logDomain(series.flatMap((s) => s.ys));
  const y = logScale(yLo, yHi, PLOT_BOTTOM, MARGIN.top);
  const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, PLOT_RIGHT);

  const out = openSvg(
    `Bound components vs ${parameter}`,
    `config ${t.hash}, schema ${t.schema}`,
  );
  yAxis(out, y, "bound component", (d) => decadeLabel(d), (d) => Math.pow(10, d));
  xAxis(out, x, parameter, fmt);
  series.forEach((s, i) => {
    const pts: Array<[number, number]> = [];
    s.ys.forEach((v, j) => {
      if (Number.isFinite(v) && v > 0) pts.push([x(xs[j]), y(v)]);
    });
    if (pts.length > 0) out.push(polyline(pts, s.color));
    for (const [cx, cy] of pts) {
      out.push(`<circle cx="${px(cx)}" cy="${px(cy)}" r="2.5" fill="${s.color}"/>`);
    }
    legendEntry(out, i, s.color, s.label);
  });
  return closeSvg(out);
}

function renderOrderDecay(t: Table): string {
  interface Term {
    order: number;
    mag: number;
    err: number;
    majorant: number;
  }
  const byOrder = new Map<number, { v: number; e2: number; maj: number }>();
  for (const r of t.rows) {
    const n = num(r, "order");
    const cur = byOrder.get(n) ?? { v: 0, e2: 0, maj: NaN };
    cur.v += num(r, "value");
    cur.e2 += num(r, "std_error") ** 2;
    const m = num(r, "majorant");
    if (!Number.isNaN(m)) cur.maj = m;
    byOrder.set(n, cur);
  }
  const terms: Term[] = [...byOrder.keys()]
    .sort((a, b) => a - b)
    .map((n) => {
      const c = byOrder.get(n)!;
      return { order: n, mag: Math.abs(c.v), err: Math.sqrt(c.e2), majorant: c.maj };
    });

  const spanValues = terms.flatMap((p) => [p.mag, p.mag + 3 * p.err, p.majorant]);
  const [yLo, yHi] = logDomain(spanValues);
  const y = logScale(yLo, yHi, PLOT_BOTTOM, MARGIN.top);
  const x = linearScale(0, Math.max(1, terms[terms.length - 1].order), MARGIN.left, PLOT_RIGHT);
  x.ticks = terms.map((p) => p.order);

  const out = openSvg(
    "Per-order term magnitudes",
    `config ${t.hash}, schema ${t.schema}`,
  );
  yAxis(out, y, "|term|", (d) => decadeLabel(d), (d) => Math.pow(10, d));
  xAxis(out, x, "order", fmt);

  const majPts: Array<[number, number]> = [];
  for (const p of terms) {
    if (Number.isFinite(p.majorant) && p.majorant > 0) {
      majPts.push([x(p.order), y(p.majorant)]);
    }
  }
  if (majPts.length > 0) out.push(polyline(majPts, PALETTE[1], "6 3"));

  const floor = y.domain[0];
  for (const p of terms) {
    if (p.mag <= 0) continue;
    const cx = x(p.order);
    if (p.err > 0) {
      const lo = Math.max(p.mag - 3 * p.err, floor);
      const hi = p.mag + 3 * p.err;
      out.push(
        `<line x1="${px(cx)}" y1="${px(y(lo))}" x2="${px(cx)}" y2="${px(y(hi))}" stroke="${PALETTE[0]}" stroke-width="1.2"/>`,
      );
    }
    out.push(`<circle cx="${px(cx)}" cy="${px(y(p.mag))}" r="3.5" fill="${PALETTE[0]}"/>`);
  }
  legendEntry(out, 0, PALETTE[0], "|term| (3 sigma bar)");
  legendEntry(out, 1, PALETTE[1], "fitted majorant", "6 3");
  return closeSvg(out);
}

function renderQeiBand(t: Table): string {
  const terms: Array<{ n: number; v: number; s: number }> = [];
  let kTotal = NaN;
  let margin = NaN;
  let verdict = "";
  for (const r of t.rows) {
    const m = /^term_(\d+)$/.exec(r.quantity);
    if (m) {
      terms.push({ n: Number(m[1]), v: num(r, "value"), s: num(r, "sigma") });
    } else if (r.quantity === "k_total") {
      kTotal = num(r, "value");
    } else if (r.quantity === "margin") {
      margin = num(r, "value");
    } else if (r.quantity === "verdict") {
      verdict = r.status;
    }
  }
  if (terms.length === 0) {
    throw new DataError("no term rows in qei table", 1);
  }
  terms.sort((p, q) => p.n - q.n);

  let running = 0;
  let var2 = 0;
  const cum = terms.map((p) => {
    running += p.v;
    var2 += p.s * p.s;
    return { n: p.n, value: running, sigma: Math.sqrt(var2) };
  });

  const bound = -kTotal;
  const lows = cum.map((c) => c.value - 3 * c.sigma);
  const highs = cum.map((c) => c.value + 3 * c.sigma);
  let yLo = Math.min(bound, ...lows, 0);
  let yHi = Math.max(0, ...highs);
  const pad = 0.08 * (yHi - yLo || 1);
  yLo -= pad;
  yHi += pad;

  const y = linearScale(yLo, yHi, PLOT_BOTTOM, MARGIN.top);
  const x = linearScale(0, Math.max(1, cum[cum.length - 1].n), MARGIN.left, PLOT_RIGHT);
  x.ticks = cum.map((c) => c.n);

  const out = openSvg(
    "Truncated energy vs bound floor",
    `config ${t.hash}, schema ${t.schema}`,
  );
  yAxis(out, y, "smeared energy", fmt);
  xAxis(out, x, "truncation order", fmt);

  const upper = cum.map((c) => `${px(x(c.n))},${px(y(c.value + 3 * c.sigma))}`);
  const lower = [...cum]
    .reverse()
    .map((c) => `${px(x(c.n))},${px(y(c.value - 3 * c.sigma))}`);
  out.push(
    `<polygon points="${[...upper, ...lower].join(" ")}" fill="${PALETTE[0]}" fill-opacity="0.18" stroke="none"/>`,
  );
  out.push(polyline(cum.map((c) => [x(c.n), y(c.value)]), PALETTE[0]));
  for (const c of cum) {
    out.push(`<circle cx="${px(x(c.n))}" cy="${px(y(c.value))}" r="3" fill="${PALETTE[0]}"/>`);
  }

  if (Number.isFinite(bound)) {
    const by = px(y(bound));
    out.push(
      `<line x1="${MARGIN.left}" y1="${by}" x2="${PLOT_RIGHT}" y2="${by}" stroke="${PALETTE[1]}" stroke-width="1.8" stroke-dasharray="6 3"/>`,
    );
  }
  legendEntry(out, 0, PALETTE[0], "E truncated (3 sigma band)");
  legendEntry(out, 1, PALETTE[1], `-K = ${fmt(bound)}`, "6 3");
  if (verdict) {
    out.push(
      `<text x="${PLOT_RIGHT - 8}" y="${MARGIN.top + 16}" font-size="12" text-anchor="end" fill="#222222">verdict: ${esc(verdict)}</text>`,
    );
  }
  if (Number.isFinite(margin)) {
    out.push(
      `<text x="${PLOT_RIGHT - 8}" y="${MARGIN.top + 32}" font-size="11" text-anchor="end" fill="#777777">margin ${fmt(margin)}</text>`,
    );
  }
  return closeSvg(out);
}

export const KINDS: Record<string, KindSpec> = {
  bound_vs_param: {
    schema: "sweep.v1",
    columns: ["parameter", "value", "K0_straight", "K0_accel", "KV", "KH", "K_total"],
    render: renderBoundVsParam,
  },
  order_decay: {
    schema: "energy.v1",
    columns: ["order", "sector", "value", "std_error", "majorant", "status"],
    render: renderOrderDecay,
  },
  qei_band: {
    schema: "qei.v1",
    columns: ["quantity", "order", "value", "sigma", "status"],
    render: renderQeiBand,
  },
};
