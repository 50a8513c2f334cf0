/**
 * Waterfall of momentum distributions: one trace per sampled kick, offset
 * vertically by kick number, so the accelerator mode shows up as a ridge
 * walking away from the bulk.
 */

import { loadHistograms } from "./artifacts.js";
import { SvgDoc, linearScale, plotArea, px } from "./svg.js";

const MAX_TRACES = 48;

export function renderWaterfall(dir: string, warn: (msg: string) => void): string {
  const series = loadHistograms(dir);
  let kicks = series.kicks;
  if (kicks.length > MAX_TRACES) {
    const step = Math.ceil(kicks.length / MAX_TRACES);
    kicks = kicks.filter((_, i) => i % step === 0);
  }
  const strides = new Set<number>();
  for (let i = 1; i < kicks.length; i++) strides.add(kicks[i] - kicks[i - 1]);
  if (strides.size > 1) {
    warn("non-uniform sampling stride; traces spaced by kick number");
  }

  let nMin = Infinity;
  let nMax = -Infinity;
  let pMax = 0;
  for (const t of kicks) {
    const frame = series.frames.get(t)!;
    for (let i = 0; i < frame.n.length; i++) {
      if (frame.p[i] > 1e-6) {
        nMin = Math.min(nMin, frame.n[i]);
        nMax = Math.max(nMax, frame.n[i]);
      }
      pMax = Math.max(pMax, frame.p[i]);
    }
  }

  const area = plotArea();
  const x = linearScale(nMin, nMax, area.x0, area.x1);
  const tLo = kicks[0];
  const tHi = kicks[kicks.length - 1];
  const y = linearScale(tLo, tHi === tLo ? tLo + 1 : tHi, area.y0, area.y1 + 60);
  const traceHeight = 70; // px of headroom per normalized distribution

  const doc = new SvgDoc("Momentum distributions, stacked by kick number");
  doc.axes(x, y, "momentum (recoils)", "kick number");
  for (const t of kicks) {
    const frame = series.frames.get(t)!;
    const base = y(t);
    const order = frame.n.map((_, i) => i).sort((a, b) => frame.n[a] - frame.n[b]);
    const path: string[] = [];
    for (let idx = 0; idx < order.length; idx++) {
      const i = order[idx];
      const xp = px(x(frame.n[i]));
      const yp = px(base - (frame.p[i] / pMax) * traceHeight);
      path.push(`${idx === 0 ? "M" : "L"} ${xp} ${yp}`);
    }
    doc.add(
      `<path d="${path.join(" ")}" fill="none" stroke="#1f77b4" ` +
        `stroke-width="1" opacity="0.85"/>`,
    );
  }
  return doc.render();
}
