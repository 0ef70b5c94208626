/**
 * Standalone SVG renderers for the simulator's CSV outputs.  No DOM:
 * every figure is assembled as an SVG string, one renderer per figure
 * kind (throughput/outage curves, per-slot trajectory, region map).
 */

import { Dataset } from "./csv";
import { Row } from "./schemas";

export class EmptyDataError extends Error {}

export type FigureKind =
  | "throughput_power"
  | "outage_power"
  | "throughput_elements"
  | "trajectory"
  | "regionmap";

export const FIGURE_KINDS: FigureKind[] = [
  "throughput_power",
  "outage_power",
  "throughput_elements",
  "trajectory",
  "regionmap",
];

/** Fixed colors so a scheme looks the same in every figure. */
export const SCHEME_COLORS: Record<string, string> = {
  LSRPA: "#d62728",
  Benchmark: "#1f77b4",
  RandomPhase: "#9467bd",
  NoRisMmw: "#2ca02c",
  NoRisSub6: "#8c564b",
  AdditionalBs: "#ff7f0e",
  Repeater: "#17becf",
  UnblockedRef: "#7f7f7f",
};

const CANDIDATE_COLORS: Record<string, string> = {
  Direct: "#bdbdbd",
  ViaRis1: "#1f77b4",
  ViaRis2: "#ff7f0e",
  ViaRis3: "#2ca02c",
};

const FALLBACK_COLORS = ["#e377c2", "#bcbd22", "#393b79", "#637939"];

/** Variant tag -> stroke dash pattern; the base variant is solid. */
const VARIANT_DASHES: Record<string, string> = {
  "": "",
  impaired: "7 3",
  sub6: "2 3",
  "sub6 impaired": "8 3 2 3",
};

const AXIS_LABELS: Record<string, string> = {
  tx_power_dbm: "transmit power (dBm)",
  ris_elements: "RIS elements per panel",
  phase_noise_bound: "phase noise bound (rad)",
  vpl_db: "vehicle penetration loss (dB)",
};

const W = 820;
const H = 460;
const MARGIN = { top: 48, right: 220, bottom: 56, left: 76 };
const PLOT_W = W - MARGIN.left - MARGIN.right;
const PLOT_H = H - MARGIN.top - MARGIN.bottom;

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const fmt = (v: number): string => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("e", "e");
  return String(Number(v.toPrecision(4)));
};

type Scale = (v: number) => number;

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** Round tick positions at 1/2/5 steps covering [min, max]. */
function niceTicks(min: number, max: number, target = 6): number[] {
  if (min === max) return [min];
  const rawStep = (max - min) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(min / step) * step; t <= max + step / 1e6; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

function decadeTicks(min: number, max: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(min) - 1e-9); 10 ** e <= max * (1 + 1e-9); e++) {
    ticks.push(10 ** e);
  }
  return ticks;
}

interface Series {
  scheme: string;
  variant: string;
  color: string;
  dash: string;
  points: { x: number; y: number; ci?: number }[];
}

function schemeColor(scheme: string, taken: Set<string>): string {
  const fixed = SCHEME_COLORS[scheme];
  if (fixed) return fixed;
  const free = FALLBACK_COLORS.find((c) => !taken.has(c));
  return free ?? "#333333";
}

function metricsSeries(
  datasets: Dataset[],
  metric: "throughput_bps" | "outage_prob",
): { series: Series[]; sweepName: string } {
  const series: Series[] = [];
  const taken = new Set<string>();
  let sweepName = "";
  for (const ds of datasets) {
    const perScheme = new Map<string, Series>();
    for (const row of ds.rows) {
      sweepName = String(row["sweep_name"]);
      const scheme = String(row["scheme"]);
      let s = perScheme.get(scheme);
      if (!s) {
        const color = schemeColor(scheme, taken);
        taken.add(color);
        s = {
          scheme,
          variant: ds.label,
          color,
          dash: VARIANT_DASHES[ds.label] ?? "5 5",
          points: [],
        };
        perScheme.set(scheme, s);
        series.push(s);
      }
      s.points.push({
        x: Number(row["sweep_value"]),
        y: Number(row[metric]),
        ci: Number(row["ci_halfwidth_bps"]),
      });
    }
  }
  for (const s of series) s.points.sort((a, b) => a.x - b.x);
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new EmptyDataError("no data rows to plot");
  }
  return { series, sweepName };
}

function axes(
  xTicks: number[],
  yTicks: number[],
  xs: Scale,
  ys: Scale,
  xLabel: string,
  yLabel: string,
  yFmt: (v: number) => string = fmt,
): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  parts.push(
    `<rect x="${x0}" y="${MARGIN.top}" width="${PLOT_W}" height="${PLOT_H}" ` +
      `fill="none" stroke="#444" stroke-width="1"/>`,
  );
  for (const t of xTicks) {
    const px = xs(t);
    parts.push(
      `<line x1="${px.toFixed(1)}" y1="${y0}" x2="${px.toFixed(1)}" y2="${y0 + 5}" stroke="#444"/>`,
      `<line x1="${px.toFixed(1)}" y1="${MARGIN.top}" x2="${px.toFixed(1)}" y2="${y0}" stroke="#ddd" stroke-width="0.6"/>`,
      `<text x="${px.toFixed(1)}" y="${y0 + 20}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const py = ys(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py.toFixed(1)}" x2="${x0}" y2="${py.toFixed(1)}" stroke="#444"/>`,
      `<line x1="${x0}" y1="${py.toFixed(1)}" x2="${x0 + PLOT_W}" y2="${py.toFixed(1)}" stroke="#ddd" stroke-width="0.6"/>`,
      `<text x="${x0 - 9}" y="${(py + 4).toFixed(1)}" text-anchor="end" font-size="12">${yFmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${x0 + PLOT_W / 2}" y="${H - 12}" text-anchor="middle" font-size="13">${esc(xLabel)}</text>`,
    `<text x="20" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" font-size="13" ` +
      `transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})">${esc(yLabel)}</text>`,
  );
  return parts.join("\n");
}

function legend(series: { scheme: string; variant: string; color: string; dash: string }[]): string {
  const seen = new Set<string>();
  const entries = series.filter((s) => {
    const key = `${s.scheme}|${s.variant}`;
    if (seen.has(key)) return false;
    seen.add(key);
    return true;
  });
  const x = W - MARGIN.right + 18;
  const parts: string[] = [];
  entries.forEach((s, i) => {
    const y = MARGIN.top + 10 + i * 20;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    const label = s.variant ? `${s.scheme} (${s.variant})` : s.scheme;
    parts.push(
      `<line x1="${x}" y1="${y}" x2="${x + 26}" y2="${y}" stroke="${s.color}" stroke-width="2.4"${dash}/>`,
      `<text x="${x + 32}" y="${y + 4}" font-size="12">${esc(label)}</text>`,
    );
  });
  return parts.join("\n");
}

function svgDoc(title: string, body: string, height = H): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${height}" ` +
    `viewBox="0 0 ${W} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${W}" height="${height}" fill="white"/>\n` +
    `<text x="${MARGIN.left}" y="26" font-size="15" font-weight="bold">${esc(title)}</text>\n` +
    body +
    "\n</svg>\n"
  );
}

function polyline(points: { px: number; py: number }[], color: string, dash: string): string {
  const d = points.map((p) => `${p.px.toFixed(1)},${p.py.toFixed(1)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="2"${dashAttr}/>`;
}

function renderCurves(
  datasets: Dataset[],
  metric: "throughput_bps" | "outage_prob",
  title: string,
  logY: boolean,
): string {
  const { series, sweepName } = metricsSeries(datasets, metric);
  const xsAll = series.flatMap((s) => s.points.map((p) => p.x));
  const xMin = Math.min(...xsAll);
  const xMax = Math.max(...xsAll);

  const toMbit = metric === "throughput_bps";
  const value = (y: number) => (toMbit ? y / 1e6 : y);

  let ys: Scale;
  let yTicks: number[];
  let clampFloor = 0;
  if (logY) {
    const positives = series.flatMap((s) =>
      s.points.map((p) => p.y).filter((y) => y > 0),
    );
    clampFloor =
      positives.length > 0 ? Math.min(...positives) / 2 : 1e-4;
    clampFloor = Math.max(clampFloor, 1e-6);
    ys = logScale(clampFloor, 1, MARGIN.top + PLOT_H, MARGIN.top);
    yTicks = decadeTicks(clampFloor, 1);
  } else {
    const vals = series.flatMap((s) => s.points.map((p) => value(p.y)));
    const yMax = Math.max(...vals, 1e-9) * 1.06;
    ys = linearScale(0, yMax, MARGIN.top + PLOT_H, MARGIN.top);
    yTicks = niceTicks(0, yMax);
  }
  const xs = linearScale(xMin, xMax, MARGIN.left, MARGIN.left + PLOT_W);

  const body: string[] = [];
  body.push(
    axes(
      niceTicks(xMin, xMax),
      yTicks,
      xs,
      ys,
      AXIS_LABELS[sweepName] ?? sweepName,
      toMbit ? "throughput (Mbit/s)" : "outage probability",
      logY ? (v) => `1e${Math.round(Math.log10(v))}` : fmt,
    ),
  );
  for (const s of series) {
    const pts = s.points.map((p) => ({
      px: xs(p.x),
      py: ys(logY ? Math.max(p.y, clampFloor) : value(p.y)),
    }));
    body.push(polyline(pts, s.color, s.dash));
    if (!logY) {
      for (const p of s.points) {
        const ci = p.ci ?? 0;
        if (ci <= 0) continue;
        const px = xs(p.x);
        const lo = ys(value(p.y - ci));
        const hi = ys(value(p.y + ci));
        body.push(
          `<line x1="${px.toFixed(1)}" y1="${lo.toFixed(1)}" x2="${px.toFixed(1)}" ` +
            `y2="${hi.toFixed(1)}" stroke="${s.color}" stroke-width="1" opacity="0.65"/>`,
        );
      }
    }
  }
  body.push(legend(series));
  return svgDoc(title, body.join("\n"));
}

export function renderThroughputVsPower(datasets: Dataset[]): string {
  return renderCurves(datasets, "throughput_bps", "Throughput vs transmit power", false);
}

export function renderOutageVsPower(datasets: Dataset[]): string {
  return renderCurves(datasets, "outage_prob", "Outage probability vs transmit power", true);
}

export function renderThroughputVsElements(datasets: Dataset[]): string {
  return renderCurves(datasets, "throughput_bps", "Throughput vs RIS element count", false);
}

export function renderTrajectory(datasets: Dataset[]): string {
  const rows = datasets.flatMap((d) => d.rows);
  if (rows.length === 0) throw new EmptyDataError("no data rows to plot");

  const bySlot = new Map<number, Row>();
  const perScheme = new Map<string, { t: number; rate: number }[]>();
  for (const row of rows) {
    const scheme = String(row["scheme"]);
    let list = perScheme.get(scheme);
    if (!list) {
      list = [];
      perScheme.set(scheme, list);
    }
    list.push({ t: Number(row["time_s"]), rate: Number(row["rate_bps"]) });
    if (scheme !== "UnblockedRef") bySlot.set(Number(row["slot"]), row);
  }
  for (const list of perScheme.values()) list.sort((a, b) => a.t - b.t);

  const times = rows.map((r) => Number(r["time_s"]));
  const tMin = Math.min(...times);
  const tMax = Math.max(...times);
  const rMax = Math.max(...rows.map((r) => Number(r["rate_bps"]))) / 1e6;
  const xs = linearScale(tMin, tMax, MARGIN.left, MARGIN.left + PLOT_W);
  const ys = linearScale(0, rMax * 1.06, MARGIN.top + PLOT_H, MARGIN.top);

  const body: string[] = [];

  // Shade the stretches where the direct link is behind the truck.
  const slots = [...bySlot.keys()].sort((a, b) => a - b);
  let start: number | null = null;
  for (let i = 0; i <= slots.length; i++) {
    const row = i < slots.length ? bySlot.get(slots[i]!)! : undefined;
    const blocked = row ? Number(row["direct_blocked"]) === 1 : false;
    if (blocked && start === null) start = Number(row!["time_s"]);
    if (!blocked && start !== null) {
      const end = i > 0 ? Number(bySlot.get(slots[i - 1]!)!["time_s"]) : start;
      const x = xs(start);
      const w = Math.max(xs(end) - x, 1);
      body.push(
        `<rect x="${x.toFixed(1)}" y="${MARGIN.top}" width="${w.toFixed(1)}" ` +
          `height="${PLOT_H}" fill="#f2b705" opacity="0.15"/>`,
      );
      start = null;
    }
  }

  body.push(
    axes(
      niceTicks(tMin, tMax),
      niceTicks(0, rMax * 1.06),
      xs,
      ys,
      "time (s)",
      "per-slot rate (Mbit/s)",
    ),
  );

  const taken = new Set<string>();
  const legendSeries: { scheme: string; variant: string; color: string; dash: string }[] = [];
  for (const [scheme, list] of perScheme) {
    const color = schemeColor(scheme, taken);
    taken.add(color);
    const dash = scheme === "UnblockedRef" ? "5 4" : "";
    legendSeries.push({ scheme, variant: "", color, dash });
    body.push(
      polyline(
        list.map((p) => ({ px: xs(p.t), py: ys(p.rate / 1e6) })),
        color,
        dash,
      ),
    );
  }
  body.push(legend(legendSeries));
  return svgDoc("Serving rate along the trajectory", body.join("\n"));
}

export function renderRegionMap(datasets: Dataset[]): string {
  const rows = datasets.flatMap((d) => d.rows);
  if (rows.length === 0) throw new EmptyDataError("no data rows to plot");

  const blockers = [...new Set(rows.map((r) => Number(r["blocker_x_m"])))].sort(
    (a, b) => a - b,
  );
  const ueXs = [...new Set(rows.map((r) => Number(r["ue_x_m"])))].sort(
    (a, b) => a - b,
  );
  const pitch =
    ueXs.length > 1 ? ueXs[1]! - ueXs[0]! : 1;
  const xMin = ueXs[0]! - pitch / 2;
  const xMax = ueXs[ueXs.length - 1]! + pitch / 2;

  const stripH = 46;
  const gap = 26;
  const height =
    MARGIN.top + blockers.length * (stripH + gap) + 70;
  const xs = linearScale(xMin, xMax, MARGIN.left, MARGIN.left + PLOT_W);

  const candidates = [...new Set(rows.map((r) => String(r["candidate"])))];
  const colorOf = (c: string): string =>
    CANDIDATE_COLORS[c] ??
    FALLBACK_COLORS[candidates.indexOf(c) % FALLBACK_COLORS.length]!;

  const body: string[] = [];
  blockers.forEach((bx, i) => {
    const y = MARGIN.top + i * (stripH + gap);
    body.push(
      `<text x="${MARGIN.left}" y="${y - 6}" font-size="12">truck at ${fmt(bx)} m</text>`,
    );
    for (const row of rows) {
      if (Number(row["blocker_x_m"]) !== bx) continue;
      const ux = Number(row["ue_x_m"]);
      const x = xs(ux - pitch / 2);
      const w = xs(ux + pitch / 2) - x;
      body.push(
        `<rect x="${x.toFixed(2)}" y="${y}" width="${(w + 0.05).toFixed(2)}" ` +
          `height="${stripH}" fill="${colorOf(String(row["candidate"]))}"/>`,
      );
    }
    body.push(
      `<rect x="${MARGIN.left}" y="${y}" width="${PLOT_W}" height="${stripH}" ` +
        `fill="none" stroke="#444"/>`,
      `<line x1="${xs(bx).toFixed(1)}" y1="${y}" x2="${xs(bx).toFixed(1)}" ` +
        `y2="${y + stripH}" stroke="#000" stroke-width="1.6" stroke-dasharray="3 2"/>`,
    );
  });

  const axisY = MARGIN.top + blockers.length * (stripH + gap);
  for (const t of niceTicks(xMin, xMax, 8)) {
    const px = xs(t);
    body.push(
      `<line x1="${px.toFixed(1)}" y1="${axisY}" x2="${px.toFixed(1)}" y2="${axisY + 5}" stroke="#444"/>`,
      `<text x="${px.toFixed(1)}" y="${axisY + 20}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
    );
  }
  body.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${MARGIN.left + PLOT_W}" y2="${axisY}" stroke="#444"/>`,
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${axisY + 42}" text-anchor="middle" font-size="13">UE position (m)</text>`,
  );

  candidates.forEach((c, i) => {
    const x = W - MARGIN.right + 18;
    const y = MARGIN.top + 10 + i * 20;
    body.push(
      `<rect x="${x}" y="${y - 9}" width="16" height="12" fill="${colorOf(c)}"/>`,
      `<text x="${x + 22}" y="${y + 2}" font-size="12">${esc(c)}</text>`,
    );
  });

  return svgDoc("Serving regions by truck position", body.join("\n"), height);
}

export function renderFigure(kind: FigureKind, datasets: Dataset[]): string {
  switch (kind) {
    case "throughput_power":
      return renderThroughputVsPower(datasets);
    case "outage_power":
      return renderOutageVsPower(datasets);
    case "throughput_elements":
      return renderThroughputVsElements(datasets);
    case "trajectory":
      return renderTrajectory(datasets);
    case "regionmap":
      return renderRegionMap(datasets);
  }
}

/** CSV kind consumed by each figure kind. */
export function csvKindFor(kind: FigureKind): "metrics" | "trajectory" | "regionmap" {
  if (kind === "trajectory") return "trajectory";
  if (kind === "regionmap") return "regionmap";
  return "metrics";
}
