/**
 * Tunneling-rate scaling: gamma against island area over the effective
 * Planck constant, log ordinate, exponential fits as straight lines.
 * Marker convention: squares for ideal runs, crosses for runs with
 * spontaneous emission, circles for experiment-analog series.
 */

import { RatesRow, loadRates, loadScaling } from "./artifacts.js";
import { SvgDoc, label, linearScale, logScale, plotArea, px } from "./svg.js";

const SERIES_STYLE: Record<string, { marker: "square" | "cross" | "circle"; color: string }> = {
  ideal: { marker: "square", color: "#d62728" },
  se: { marker: "cross", color: "#1f77b4" },
};

export function renderScaling(dirs: string[], warn: (msg: string) => void): string {
  const series: {
    name: string;
    rows: RatesRow[];
    fit: ReturnType<typeof loadScaling>;
  }[] = [];
  for (const dir of dirs) {
    const rows = loadRates(dir);
    if (rows.length === 0) {
      warn(`${dir}: rates.csv has no points`);
      continue;
    }
    const fit = loadScaling(dir);
    const name = rows.every((r) => r.pSe > 0) ? "se" : "ideal";
    series.push({ name, rows, fit });
  }
  if (series.length === 0) {
    throw new Error("no rates to plot");
  }

  const all = series.flatMap((s) => s.rows);
  const xs = all.map((r) => r.aOverHbar);
  const gs = all.map((r) => r.gamma).filter((g) => g > 0);
  if (gs.length === 0) {
    throw new Error("no positive rates to plot");
  }
  const area = plotArea();
  const xPad = 0.05 * (Math.max(...xs) - Math.min(...xs) || 1);
  const x = linearScale(Math.min(...xs) - xPad, Math.max(...xs) + xPad,
                        area.x0, area.x1);
  const y = logScale(Math.min(...gs) / 3, Math.max(...gs) * 3,
                     area.y0, area.y1);

  const doc = new SvgDoc("Tunneling rate vs island area over Planck cell");
  doc.axes(x, y, "A / |eps|", "decay rate per kick", true);

  let annotationRow = 0;
  for (const s of series) {
    const style = SERIES_STYLE[s.name];
    for (const r of s.rows) {
      if (r.gamma <= 0) {
        continue;
      }
      const cx = x(r.aOverHbar);
      const cy = y(r.gamma);
      doc.add(doc.marker(style.marker, cx, cy, style.color));
      // error bar in log space when meaningful
      if (r.gammaErr > 0 && r.gammaErr < r.gamma) {
        doc.add(
          `<line x1="${px(cx)}" y1="${px(y(r.gamma - r.gammaErr))}" ` +
            `x2="${px(cx)}" y2="${px(y(r.gamma + r.gammaErr))}" ` +
            `stroke="${style.color}" stroke-width="1"/>`,
        );
      }
    }
    if (s.fit !== null && s.rows.length >= 3) {
      const xa = Math.min(...s.rows.map((r) => r.aOverHbar));
      const xb = Math.max(...s.rows.map((r) => r.aOverHbar));
      const pa = Math.exp(s.fit.intercept + s.fit.slope * xa);
      const pb = Math.exp(s.fit.intercept + s.fit.slope * xb);
      doc.add(
        `<line x1="${px(x(xa))}" y1="${px(y(pa))}" x2="${px(x(xb))}" ` +
          `y2="${px(y(pb))}" stroke="${style.color}" stroke-width="1.5" ` +
          `stroke-dasharray="${s.name === "se" ? "2 3" : "6 4"}"/>`,
      );
      doc.add(
        `<text x="${px(area.x1 - 8)}" y="${px(area.y1 + 18 + 16 * annotationRow)}" ` +
          `text-anchor="end" font-size="12" fill="${style.color}">` +
          `${s.name}: slope ${label(s.fit.slope)}</text>`,
      );
      annotationRow += 1;
    } else if (s.rows.length < 3) {
      warn(`${s.name}: fewer than 3 points, no fit line`);
    }
  }
  return doc.render();
}
