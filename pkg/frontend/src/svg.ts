/**
 * Deterministic SVG assembly: no timestamps, no randomness, fixed number
 * formatting, so identical inputs always produce identical bytes.
 */

export const WIDTH = 800;
export const HEIGHT = 600;
export const MARGIN = { left: 72, right: 24, top: 36, bottom: 56 };

/** fixed two-decimal pixel coordinates */
export function px(v: number): string {
  return v.toFixed(2);
}

/** compact tick/annotation label */
export function label(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    return v.toExponential(1).replace("e-", "e-").replace("e+", "e");
  }
  const s = v.toPrecision(4);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export interface Scale {
  (v: number): number;
  ticks: number[];
}

export function linearScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): Scale {
  const span = d1 - d0 || 1;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  const step = niceStep(span / 6);
  const ticks: number[] = [];
  for (let t = Math.ceil(d0 / step) * step; t <= d1 + 1e-9 * span; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  f.ticks = ticks;
  return f;
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  if (d0 <= 0 || d1 <= 0) {
    throw new Error("log scale needs positive bounds");
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const f = ((v: number) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  f.ticks = ticks;
  return f;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2 * mag;
  if (r < 7.5) return 5 * mag;
  return 10 * mag;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
        `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" ` +
        `font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="22" text-anchor="middle" ` +
        `font-size="15">${escapeXml(title)}</text>`,
    );
  }

  add(...fragments: string[]): void {
    this.parts.push(...fragments);
  }

  axes(
    x: Scale,
    y: Scale,
    xLabel: string,
    yLabel: string,
    yLog = false,
  ): void {
    const { left, right, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.add(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" ` +
        `fill="none" stroke="black" stroke-width="1"/>`,
    );
    for (const t of x.ticks) {
      const xp = px(x(t));
      this.add(
        `<line x1="${xp}" y1="${y0}" x2="${xp}" y2="${y0 + 5}" ` +
          `stroke="black"/>` +
          `<text x="${xp}" y="${y0 + 20}" text-anchor="middle" ` +
          `font-size="11">${label(t)}</text>`,
      );
    }
    for (const t of y.ticks) {
      const yp = px(y(t));
      this.add(
        `<line x1="${x0 - 5}" y1="${yp}" x2="${x0}" y2="${yp}" ` +
          `stroke="black"/>` +
          `<text x="${x0 - 8}" y="${yp}" text-anchor="end" ` +
          `dominant-baseline="middle" font-size="11">` +
          `${yLog ? logLabel(t) : label(t)}</text>`,
      );
    }
    this.add(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 14}" text-anchor="middle" ` +
        `font-size="13">${escapeXml(xLabel)}</text>`,
      `<text x="20" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
        `font-size="13" transform="rotate(-90 20 ${(y0 + y1) / 2})">` +
        `${escapeXml(yLabel)}</text>`,
    );
  }

  marker(kind: "square" | "cross" | "circle", cx: number, cy: number,
         color: string, size = 4): string {
    const x = px(cx);
    const y = px(cy);
    if (kind === "square") {
      return `<rect x="${px(cx - size)}" y="${px(cy - size)}" ` +
        `width="${2 * size}" height="${2 * size}" fill="none" ` +
        `stroke="${color}" stroke-width="1.5"/>`;
    }
    if (kind === "cross") {
      return `<path d="M ${px(cx - size)} ${px(cy - size)} L ` +
        `${px(cx + size)} ${px(cy + size)} M ${px(cx - size)} ` +
        `${px(cy + size)} L ${px(cx + size)} ${px(cy - size)}" ` +
        `stroke="${color}" stroke-width="1.5"/>`;
    }
    return `<circle cx="${x}" cy="${y}" r="${size}" fill="none" ` +
      `stroke="${color}" stroke-width="1.5"/>`;
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function logLabel(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}
