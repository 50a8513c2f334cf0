/**
 * Phase-space portrait: scatter of (theta, J mod 2*pi) trajectories with
 * the island fixed point, the initial-state quasimomentum band, and an
 * effective-Planck-cell rectangle overlaid when metadata is available.
 */

import { loadPortrait, loadPortraitMeta } from "./artifacts.js";
import { MARGIN, SvgDoc, linearScale, label, plotArea, px } from "./svg.js";

const TWO_PI = 2 * Math.PI;

const SEED_COLORS = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
  "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e",
];

export function renderPortrait(dir: string, warn: (msg: string) => void): string {
  const cloud = loadPortrait(dir);
  const meta = loadPortraitMeta(dir);
  if (meta === null) {
    warn("portrait_meta.json missing: rendering without overlays");
  }

  const area = plotArea();
  const x = linearScale(0, TWO_PI, area.x0, area.x1);
  const y = linearScale(0, TWO_PI, area.y0, area.y1);
  const doc = new SvgDoc("Phase space of the kicked-atom map");
  doc.axes(x, y, "theta", "J mod 2pi");

  if (meta !== null) {
    // initial-state band: the quasimomentum spread mapped into J
    const jc = ((meta.initialState.JCenter % TWO_PI) + TWO_PI) % TWO_PI;
    const hw = meta.initialState.JHalfwidth;
    doc.add(
      `<rect x="${px(area.x0)}" y="${px(y(Math.min(jc + hw, TWO_PI)))}" ` +
        `width="${px(area.x1 - area.x0)}" ` +
        `height="${px(Math.abs(y(jc - hw > 0 ? jc - hw : 0) - y(Math.min(jc + hw, TWO_PI))))}" ` +
        `fill="#2ca02c" opacity="0.15"/>`,
    );
    // effective Planck cell: square of area eps_abs in a free corner
    const side = Math.sqrt(meta.epsAbs);
    doc.add(
      `<rect x="${px(x(TWO_PI - 1.2 * side) )}" y="${px(y(TWO_PI - 0.2))}" ` +
        `width="${px(x(side) - x(0))}" height="${px(y(0) - y(side))}" ` +
        `fill="#1f77b4" opacity="0.35"/>`,
      `<text x="${px(x(TWO_PI - 1.2 * side))}" y="${px(y(TWO_PI - 0.3) + 14)}" ` +
        `font-size="11">cell area ${label(meta.epsAbs)}</text>`,
    );
  }

  const pts: string[] = [];
  for (let i = 0; i < cloud.theta.length; i++) {
    const color = SEED_COLORS[cloud.seedId[i] % SEED_COLORS.length];
    pts.push(
      `<circle cx="${px(x(cloud.theta[i]))}" cy="${px(y(cloud.momentumJ[i]))}" ` +
        `r="0.7" fill="${color}"/>`,
    );
  }
  doc.add(`<g>${pts.join("")}</g>`);

  if (meta !== null && meta.fixedPoint.exists) {
    const fx = x(meta.fixedPoint.theta as number);
    const fy = y(((meta.fixedPoint.J as number) % TWO_PI + TWO_PI) % TWO_PI);
    doc.add(
      `<path d="M ${px(fx - 7)} ${px(fy)} H ${px(fx + 7)} M ${px(fx)} ` +
        `${px(fy - 7)} V ${px(fy + 7)}" stroke="#d62728" stroke-width="2"/>`,
      `<text x="${px(fx + 9)}" y="${px(fy - 6)}" font-size="11" ` +
        `fill="#d62728">island</text>`,
    );
  }
  return doc.render();
}
