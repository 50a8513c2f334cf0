/**
 * Survival probability of the accelerator mode on a log scale, with the
 * fitted exponential drawn dashed over its fit window.
 */

import { loadDecay, loadSurvival } from "./artifacts.js";
import { SvgDoc, label, linearScale, logScale, plotArea, px } from "./svg.js";

export function renderSurvival(dir: string, warn: (msg: string) => void): string {
  const surv = loadSurvival(dir);
  const fit = loadDecay(dir);
  if (fit === null) {
    warn("decay.json missing: plotting data without a fit line");
  }

  const pos = surv.p.filter((v) => v > 0);
  if (pos.length === 0) {
    throw new Error("no positive survival values to plot");
  }
  const pMin = Math.min(...pos);
  const area = plotArea();
  const x = linearScale(surv.t[0], surv.t[surv.t.length - 1], area.x0, area.x1);
  const y = logScale(Math.min(pMin, 0.5), 1.5, area.y0, area.y1);

  const doc = new SvgDoc("Mode survival probability");
  doc.axes(x, y, "kick number", "survival probability", true);

  const path: string[] = [];
  let started = false;
  for (let i = 0; i < surv.t.length; i++) {
    if (surv.p[i] <= 0) {
      started = false;
      continue;
    }
    path.push(`${started ? "L" : "M"} ${px(x(surv.t[i]))} ${px(y(surv.p[i]))}`);
    started = true;
  }
  doc.add(
    `<path d="${path.join(" ")}" fill="none" stroke="#1f77b4" ` +
      `stroke-width="1.5"/>`,
  );

  if (fit !== null) {
    const [a, b] = fit.fitWindow;
    const steps = 60;
    const seg: string[] = [];
    for (let i = 0; i <= steps; i++) {
      const t = a + ((b - a) * i) / steps;
      const p = Math.exp(fit.logIntercept - fit.gamma * t);
      seg.push(`${i === 0 ? "M" : "L"} ${px(x(t))} ${px(y(Math.max(p, 1e-300)))}`);
    }
    doc.add(
      `<path d="${seg.join(" ")}" fill="none" stroke="#d62728" ` +
        `stroke-width="1.5" stroke-dasharray="6 4"/>`,
    );
    const gammaText = fit.gamma <= fit.gammaErr
      ? "Gamma = 0 (within error)"
      : `Gamma = ${label(fit.gamma)} per kick`;
    doc.add(
      `<text x="${px(area.x1 - 8)}" y="${px(area.y1 + 18)}" ` +
        `text-anchor="end" font-size="12" fill="#d62728">${gammaText}</text>`,
    );
  }
  return doc.render();
}
