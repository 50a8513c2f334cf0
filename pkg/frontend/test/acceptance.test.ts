/**
 * Regenerates the four figure analogs from the simulator's acceptance
 * artifacts (when present) and checks byte-level determinism.  Skipped
 * when the artifacts have not been produced yet; run the Python
 * acceptance suite first.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import { renderFigure } from "../src/cli.js";

const ARTIFACTS = path.resolve(__dirname, "..", "..", "artifacts");
const FIGURES_OUT = path.join(ARTIFACTS, "figures");

const CASES: { name: string; figure: "portrait" | "waterfall" | "survival" | "scaling"; inputs: string[] }[] = [
  { name: "fig1_portrait", figure: "portrait",
    inputs: [path.join(ARTIFACTS, "fig1_portrait")] },
  { name: "fig2_waterfall", figure: "waterfall",
    inputs: [path.join(ARTIFACTS, "fig2_evolve")] },
  { name: "fig2_survival", figure: "survival",
    inputs: [path.join(ARTIFACTS, "fig2_evolve")] },
  { name: "fig3_scaling", figure: "scaling",
    inputs: [path.join(ARTIFACTS, "fig3_ideal"), path.join(ARTIFACTS, "fig3_se")] },
  { name: "fig4a_scaling", figure: "scaling",
    inputs: [path.join(ARTIFACTS, "fig4a")] },
  { name: "fig4b_scaling", figure: "scaling",
    inputs: [path.join(ARTIFACTS, "fig4b")] },
];

const available = fs.existsSync(ARTIFACTS);

describe.skipIf(!available)("figure analogs from acceptance artifacts", () => {
  for (const c of CASES) {
    const present = c.inputs.every((d) => fs.existsSync(d));
    it.skipIf(!present)(`${c.name} renders identically twice`, () => {
      const warn = () => {};
      const first = renderFigure(c.figure, c.inputs, warn);
      const second = renderFigure(c.figure, c.inputs, warn);
      expect(first).toBe(second);
      expect(first.length).toBeGreaterThan(500);
      fs.mkdirSync(FIGURES_OUT, { recursive: true });
      fs.writeFileSync(path.join(FIGURES_OUT, `${c.name}.svg`), first);
    });
  }
});
