/**
 * The five figure kinds rendered from harness artifacts:
 *
 *   ot-interp         displacement-interpolation ridge + Gaussian geodesic
 *   coupling          joint-mass heatmaps across regularization levels
 *   ad-snapshot       truth / observations / analyses at analysis times
 *   lorenz-trajectory three-row trajectory panel with member spaghetti
 *   metrics-table     replicate-mean bias/ubrmse per method, verbatim
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  MemberRow,
  StateRow,
  Summary,
  readCsv,
  readMembers,
  readStates,
  readSummary,
} from "./artifacts.js";
import {
  METHOD_COLORS,
  SvgBuilder,
  extent,
  formatTick,
  grayscale,
  linearScale,
} from "./svg.js";

export const FIGURE_KINDS = [
  "ot-interp",
  "coupling",
  "ad-snapshot",
  "lorenz-trajectory",
  "metrics-table",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface RenderJob {
  kind: FigureKind;
  input: string;
  output: string;
  replicate?: number;
  time?: number;
}

export function render(job: RenderJob): void {
  let svg: string;
  switch (job.kind) {
    case "ot-interp":
      svg = renderInterpolation(job.input);
      break;
    case "coupling":
      svg = renderCoupling(job.input);
      break;
    case "ad-snapshot":
      svg = renderSnapshot(job.input, job.replicate ?? 0, job.time);
      break;
    case "lorenz-trajectory":
      svg = renderTrajectory(job.input, job.replicate ?? 0);
      break;
    case "metrics-table":
      svg = renderMetricsTable(readSummary(job.input));
      break;
    default:
      throw new Error(`unknown figure kind ${job.kind as string}`);
  }
  fs.mkdirSync(path.dirname(path.resolve(job.output)), { recursive: true });
  fs.writeFileSync(job.output, svg);
}

// --------------------------------------------------------------------------
// transport showcase panels
// --------------------------------------------------------------------------

function renderInterpolation(demoDir: string): string {
  const sweep = readCsv(path.join(demoDir, "displacement_sweep.csv"));
  if (sweep.length === 0) throw new Error("displacement sweep artifact is empty");
  const byEta = new Map<number, Array<{ position: number; weight: number }>>();
  for (const row of sweep) {
    const eta = Number(row.eta);
    if (!byEta.has(eta)) byEta.set(eta, []);
    byEta.get(eta)!.push({ position: Number(row.position), weight: Number(row.weight) });
  }
  const etas = [...byEta.keys()].sort((a, b) => a - b);

  const width = 640;
  const height = 80 + etas.length * 34;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 24, "displacement interpolation sweep", 'text-anchor="middle" font-size="13"');

  const positions = sweep.map((r) => Number(r.position));
  const x = linearScale(extent(positions), [60, width - 30]);
  // weighted histogram per eta, drawn as a ridge
  const bins = 70;
  etas.forEach((eta, index) => {
    const atoms = byEta.get(eta)!;
    const [lo, hi] = x.domain;
    const density = new Array<number>(bins).fill(0);
    for (const atom of atoms) {
      const bin = Math.min(
        bins - 1,
        Math.max(0, Math.floor(((atom.position - lo) / (hi - lo)) * bins)),
      );
      density[bin] += atom.weight;
    }
    const peak = Math.max(...density, 1e-12);
    const baseline = 60 + (index + 1) * 34;
    const points: Array<[number, number]> = density.map((d, bin) => [
      x(lo + ((bin + 0.5) / bins) * (hi - lo)),
      baseline - (d / peak) * 30,
    ]);
    points.unshift([x(lo), baseline]);
    points.push([x(hi), baseline]);
    svg.polyline(points, "#2c3e50", 'stroke-width="1" opacity="0.9"');
    svg.text(40, baseline, `η=${formatTick(eta)}`, 'text-anchor="end" font-size="10"');
  });
  return svg.render();
}

function renderCoupling(demoDir: string): string {
  const rows = readCsv(path.join(demoDir, "coupling_sweep.csv"));
  if (rows.length === 0) throw new Error("coupling sweep artifact is empty");
  const gammas = [...new Set(rows.map((r) => Number(r.gamma)))].sort((a, b) => a - b);
  const panel = 210;
  const width = gammas.length * (panel + 30) + 40;
  const height = panel + 90;
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 24, "coupling mass vs regularization", 'text-anchor="middle" font-size="13"');

  gammas.forEach((gamma, index) => {
    const subset = rows.filter((r) => Number(r.gamma) === gamma);
    const sources = [...new Set(subset.map((r) => Number(r.source_position)))].sort(
      (a, b) => a - b,
    );
    const targets = [...new Set(subset.map((r) => Number(r.target_position)))].sort(
      (a, b) => a - b,
    );
    const x0 = 40 + index * (panel + 30);
    const y0 = 50;
    const cellW = panel / targets.length;
    const cellH = panel / sources.length;
    const sourceIndex = new Map(sources.map((v, i) => [v, i]));
    const targetIndex = new Map(targets.map((v, i) => [v, i]));
    const peak = Math.max(...subset.map((r) => Number(r.mass)), 1e-300);
    for (const row of subset) {
      const mass = Number(row.mass);
      if (mass <= 0) continue;
      const i = sourceIndex.get(Number(row.source_position))!;
      const j = targetIndex.get(Number(row.target_position))!;
      svg.rect(
        x0 + j * cellW,
        y0 + i * cellH,
        Math.max(cellW, 0.8),
        Math.max(cellH, 0.8),
        grayscale(Math.sqrt(mass / peak)),
      );
    }
    svg.rect(x0, y0, panel, panel, "none", 'stroke="#333"');
    svg.text(x0 + panel / 2, y0 + panel + 18, `γ=${String(gamma)}`, 'text-anchor="middle" font-size="11"');
  });
  return svg.render();
}

// --------------------------------------------------------------------------
// experiment panels
// --------------------------------------------------------------------------

function methodNames(states: StateRow[]): string[] {
  return [...new Set(states.map((r) => r.method))];
}

function renderSnapshot(runDir: string, replicate: number, time?: number): string {
  const states = readStates(runDir, replicate);
  if (states.length === 0) throw new Error("states artifact is empty");
  const times = [...new Set(states.map((r) => r.time))].sort((a, b) => a - b);
  const shown = time !== undefined ? [nearest(times, time)] : times.slice(0, 6);
  const methods = methodNames(states);

  const panelW = 520;
  const panelH = 150;
  const width = panelW + 180;
  const height = 50 + shown.length * (panelH + 40);
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 24, "state snapshots", 'text-anchor="middle" font-size="13"');

  shown.forEach((t, panelIndex) => {
    const rows = states.filter((r) => r.time === t).sort((a, b) => a.dim - b.dim);
    const y0 = 50 + panelIndex * (panelH + 40);
    const valueExtent = extent(
      rows.flatMap((r) => [r.truth, r.obs, r.analysis_mean]),
    );
    const x = linearScale([rows[0].dim, rows[rows.length - 1].dim], [60, 60 + panelW]);
    const y = linearScale(valueExtent, [y0 + panelH, y0 + 10]);
    svg.axes(x, y, "cell", "value");
    svg.text(70, y0 + 8, `t=${formatTick(t)}`, 'font-size="11"');

    const truthRows = rows.filter((r) => r.method === methods[0]);
    svg.polyline(
      truthRows.map((r) => [x(r.dim), y(r.truth)]),
      "#111",
      'stroke-width="1.6"',
    );
    const step = Math.max(1, Math.floor(truthRows.length / 80));
    truthRows
      .filter((_, i) => i % step === 0)
      .forEach((r) => svg.circle(x(r.dim), y(r.obs), 1.6, "#999"));
    methods.forEach((method, mi) => {
      const series = rows.filter((r) => r.method === method);
      svg.polyline(
        series.map((r) => [x(r.dim), y(r.analysis_mean)]),
        METHOD_COLORS[mi % METHOD_COLORS.length],
        'stroke-width="1.2" opacity="0.85"',
      );
    });
  });

  svg.text(panelW + 80, 54, "truth", 'font-size="10" fill="#111"');
  svg.text(panelW + 80, 68, "observations", 'font-size="10" fill="#999"');
  methods.forEach((method, mi) => {
    svg.text(
      panelW + 80,
      82 + mi * 14,
      method,
      `font-size="10" fill="${METHOD_COLORS[mi % METHOD_COLORS.length]}"`,
    );
  });
  return svg.render();
}

function renderTrajectory(runDir: string, replicate: number): string {
  const states = readStates(runDir, replicate);
  if (states.length === 0) throw new Error("states artifact is empty");
  const members = readMembers(runDir, replicate);
  const methods = methodNames(states);
  const dims = [...new Set(states.map((r) => r.dim))].sort((a, b) => a - b);
  const labels = ["x", "y", "z"];

  const panelW = 600;
  const panelH = 130;
  const width = panelW + 200;
  const height = 40 + dims.length * methods.length * 0 + dims.length * (panelH + 36);
  const svg = new SvgBuilder(width, height);
  svg.text(width / 2, 22, "trajectories", 'text-anchor="middle" font-size="13"');

  const times = [...new Set(states.map((r) => r.time))].sort((a, b) => a - b);
  const x = linearScale([times[0], times[times.length - 1]], [50, 50 + panelW]);

  dims.forEach((dim, panelIndex) => {
    const y0 = 40 + panelIndex * (panelH + 36);
    const panelRows = states.filter((r) => r.dim === dim);
    const values = panelRows.flatMap((r) => [r.truth, r.obs, r.analysis_mean]);
    const memberValues = members.filter((m) => m.dim === dim).map((m) => m.value);
    const y = linearScale(extent(values.concat(memberValues)), [y0 + panelH, y0 + 10]);
    svg.axes(x, y, "time", labels[dim] ?? `dim ${dim}`);

    // member spaghetti behind everything else
    const spaghettiMethod = methods[0];
    const memberRows = members.filter(
      (m) => m.dim === dim && m.method === spaghettiMethod,
    );
    const byMember = new Map<number, MemberRow[]>();
    for (const row of memberRows) {
      if (!byMember.has(row.member)) byMember.set(row.member, []);
      byMember.get(row.member)!.push(row);
    }
    for (const rows of byMember.values()) {
      rows.sort((a, b) => a.time - b.time);
      svg.polyline(
        rows.map((r) => [x(r.time), y(r.value)]),
        "#bbb",
        'stroke-width="0.4" opacity="0.5"',
      );
    }

    const truthRows = panelRows
      .filter((r) => r.method === methods[0])
      .sort((a, b) => a.time - b.time);
    svg.polyline(
      truthRows.map((r) => [x(r.time), y(r.truth)]),
      "#111",
      'stroke-width="1.6"',
    );
    truthRows.forEach((r) => svg.circle(x(r.time), y(r.obs), 2.0, "none", 'stroke="#666"'));
    methods.forEach((method, mi) => {
      const series = panelRows
        .filter((r) => r.method === method)
        .sort((a, b) => a.time - b.time);
      svg.polyline(
        series.map((r) => [x(r.time), y(r.analysis_mean)]),
        METHOD_COLORS[mi % METHOD_COLORS.length],
        'stroke-width="1.2" opacity="0.9"',
      );
    });
  });

  svg.text(panelW + 70, 44, "truth", 'font-size="10" fill="#111"');
  svg.text(panelW + 70, 58, "observations", 'font-size="10" fill="#666"');
  svg.text(panelW + 70, 72, "members", 'font-size="10" fill="#bbb"');
  methods.forEach((method, mi) => {
    svg.text(
      panelW + 70,
      86 + mi * 14,
      method,
      `font-size="10" fill="${METHOD_COLORS[mi % METHOD_COLORS.length]}"`,
    );
  });
  return svg.render();
}

// --------------------------------------------------------------------------
// metrics table
// --------------------------------------------------------------------------

/** Cell text is the verbatim JSON number (String(value)), so the rendered
 * table matches the harness summary exactly. */
export function metricsTableCells(summary: Summary): string[][] {
  const methods = Object.keys(summary.methods).sort();
  if (methods.length === 0) throw new Error("summary contains no method metrics");
  const hasDims = methods.every(
    (m) =>
      summary.methods[m].bias_per_dim !== undefined &&
      summary.methods[m].ubrmse_per_dim !== undefined,
  );
  const dimCount = hasDims ? summary.methods[methods[0]].bias_per_dim!.length : 0;
  const dimLabels =
    dimCount === 3 ? ["x", "y", "z"] : [...Array(dimCount).keys()].map(String);
  const header = ["method"];
  for (const label of dimLabels) header.push(`bias ${label}`);
  header.push("bias overall");
  for (const label of dimLabels) header.push(`ubrmse ${label}`);
  header.push("ubrmse overall");

  const rows = [header];
  for (const method of methods) {
    const metrics = summary.methods[method];
    const row = [method];
    if (hasDims) for (const v of metrics.bias_per_dim!) row.push(String(v));
    row.push(String(metrics.bias_overall));
    if (hasDims) for (const v of metrics.ubrmse_per_dim!) row.push(String(v));
    row.push(String(metrics.ubrmse_overall));
    rows.push(row);
  }
  return rows;
}

function renderMetricsTable(summary: Summary): string {
  const cells = metricsTableCells(summary);
  const colWidth = 150;
  const rowHeight = 24;
  const width = 40 + cells[0].length * colWidth;
  const height = 70 + cells.length * rowHeight;
  const svg = new SvgBuilder(width, height);
  svg.text(
    width / 2,
    26,
    `${summary.config.name}: replicate-mean error statistics ` +
      `(${summary.replicates_completed} replicates)`,
    'text-anchor="middle" font-size="13"',
  );
  cells.forEach((row, i) => {
    const y = 50 + i * rowHeight;
    if (i === 0) svg.rect(20, y, cells[0].length * colWidth, rowHeight, "#eee");
    row.forEach((cell, j) => {
      svg.text(
        28 + j * colWidth,
        y + 16,
        cell,
        `font-size="10" ${i === 0 ? 'font-weight="bold"' : ""} data-cell="${i},${j}"`,
      );
    });
    svg.line(20, y + rowHeight, 20 + cells[0].length * colWidth, y + rowHeight, "#ccc");
  });
  return svg.render();
}

function nearest(values: number[], target: number): number {
  let best = values[0];
  for (const v of values) {
    if (Math.abs(v - target) < Math.abs(best - target)) best = v;
  }
  return best;
}
