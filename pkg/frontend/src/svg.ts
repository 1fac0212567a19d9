/** Minimal deterministic SVG assembly: scales, axes, marks. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) throw new Error("empty extent");
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi];
}

const XML_ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function escapeXml(text: string): string {
  return text.replace(/[&<>"]/g, (c) => XML_ESCAPES[c]);
}

export class SvgBuilder {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {}

  raw(fragment: string): void {
    this.parts.push(fragment);
  }

  polyline(points: Array<[number, number]>, stroke: string, opts = ""): void {
    const coords = points
      .map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`)
      .join(" ");
    this.parts.push(
      `<polyline fill="none" stroke="${stroke}" points="${coords}" ${opts}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string, opts = ""): void {
    this.parts.push(
      `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}" ${opts}/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opts = ""): void {
    this.parts.push(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" ` +
        `height="${h.toFixed(2)}" fill="${fill}" ${opts}/>`,
    );
  }

  text(x: number, y: number, content: string, opts = ""): void {
    this.parts.push(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" ${opts}>${escapeXml(content)}</text>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, opts = ""): void {
    this.parts.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" ` +
        `y2="${y2.toFixed(2)}" stroke="${stroke}" ${opts}/>`,
    );
  }

  axes(x: Scale, y: Scale, xLabel: string, yLabel: string): void {
    const [x0, x1] = x.range;
    const [y0, y1] = y.range;
    this.line(x0, y0, x1, y0, "#333");
    this.line(x0, y0, x0, y1, "#333");
    this.text((x0 + x1) / 2, y0 + 28, xLabel, 'text-anchor="middle" font-size="11"');
    this.text(
      x0 - 34,
      (y0 + y1) / 2,
      yLabel,
      `text-anchor="middle" font-size="11" transform="rotate(-90 ${(x0 - 34).toFixed(2)} ${((y0 + y1) / 2).toFixed(2)})"`,
    );
    for (const tick of [x.domain[0], (x.domain[0] + x.domain[1]) / 2, x.domain[1]]) {
      const px = x(tick);
      this.line(px, y0, px, y0 + 4, "#333");
      this.text(px, y0 + 16, formatTick(tick), 'text-anchor="middle" font-size="9"');
    }
    for (const tick of [y.domain[0], (y.domain[0] + y.domain[1]) / 2, y.domain[1]]) {
      const py = y(tick);
      this.line(x0 - 4, py, x0, py, "#333");
      this.text(x0 - 6, py + 3, formatTick(tick), 'text-anchor="end" font-size="9"');
    }
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
      `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n` +
      `<rect width="${this.width}" height="${this.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1000 || magnitude < 0.01) return value.toExponential(1);
  return String(Number(value.toPrecision(4)));
}

export function grayscale(fraction: number): string {
  const level = Math.round(255 * (1 - Math.min(Math.max(fraction, 0), 1)));
  return `rgb(${level},${level},${level})`;
}

export const METHOD_COLORS = [
  "#c0392b",
  "#2980b9",
  "#27ae60",
  "#8e44ad",
  "#d35400",
  "#16a085",
];
