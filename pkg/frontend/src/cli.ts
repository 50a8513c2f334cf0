#!/usr/bin/env node
/**
 * figures <portrait|waterfall|survival|scaling> --in <dir>[,<dir>...]
 *         --out <file.svg>
 *
 * Renders one publication-style figure from the simulator's artifact
 * directory; identical inputs always produce identical SVG bytes.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import * as process from "node:process";

import { SchemaError } from "./csv.js";
import { renderPortrait } from "./portrait.js";
import { renderScaling } from "./scaling.js";
import { renderSurvival } from "./survival.js";
import { renderWaterfall } from "./waterfall.js";

const FIGURES = ["portrait", "waterfall", "survival", "scaling"] as const;
type FigureKind = (typeof FIGURES)[number];

interface Args {
  figure: FigureKind;
  inputs: string[];
  out: string;
}

function parseArgs(argv: string[]): Args {
  const [figure, ...rest] = argv;
  if (!FIGURES.includes(figure as FigureKind)) {
    throw new Error(
      `usage: figures <${FIGURES.join("|")}> --in <dir>[,<dir>] --out <file.svg>`,
    );
  }
  let inputs: string[] | null = null;
  let out: string | null = null;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) {
      throw new Error(`missing value for ${flag}`);
    }
    if (flag === "--in") {
      inputs = value.split(",");
    } else if (flag === "--out") {
      out = value;
    } else {
      throw new Error(`unknown flag ${flag}`);
    }
  }
  if (inputs === null || out === null) {
    throw new Error("both --in and --out are required");
  }
  if (!out.endsWith(".svg")) {
    throw new Error("output must be an .svg path (vector output only)");
  }
  return { figure: figure as FigureKind, inputs, out };
}

export function renderFigure(
  figure: FigureKind,
  inputs: string[],
  warn: (msg: string) => void,
): string {
  switch (figure) {
    case "portrait":
      return renderPortrait(inputs[0], warn);
    case "waterfall":
      return renderWaterfall(inputs[0], warn);
    case "survival":
      return renderSurvival(inputs[0], warn);
    case "scaling":
      return renderScaling(inputs, warn);
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    const svg = renderFigure(args.figure, args.inputs, (msg) =>
      console.error(`warning: ${msg}`),
    );
    fs.mkdirSync(path.dirname(path.resolve(args.out)), { recursive: true });
    fs.writeFileSync(args.out, svg);
    console.error(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 3;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
