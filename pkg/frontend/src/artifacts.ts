/**
 * Typed loaders for the simulator's artifact files.  Every figure is a
 * pure function of these files; simulation parameters are never read from
 * anywhere else.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { SchemaError, Table, numbers, parseCsv } from "./csv.js";

export interface PortraitCloud {
  theta: number[];
  momentumJ: number[];
  seedId: number[];
}

export interface FixedPointMeta {
  exists: boolean;
  theta?: number;
  J?: number;
  stable?: boolean;
}

export interface PortraitMeta {
  epsAbs: number;
  fixedPoint: FixedPointMeta;
  initialState: {
    JCenter: number;
    JHalfwidth: number;
  };
}

export interface DecayFit {
  gamma: number;
  gammaErr: number;
  logIntercept: number;
  fitWindow: [number, number];
  t0: number;
}

export interface ScalingFit {
  slope: number;
  intercept: number;
  slopeErr: number;
}

export interface RatesRow {
  runId: string;
  pSe: number;
  aOverHbar: number;
  gamma: number;
  gammaErr: number;
}

export function readText(file: string): string {
  if (!fs.existsSync(file)) {
    throw new SchemaError(`missing input file: ${file}`);
  }
  return fs.readFileSync(file, "utf-8");
}

function readJson(file: string): Record<string, unknown> {
  const doc = JSON.parse(readText(file));
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new SchemaError(`${file}: expected a JSON object`);
  }
  return doc as Record<string, unknown>;
}

function need(doc: Record<string, unknown>, key: string, file: string): unknown {
  if (!(key in doc)) {
    throw new SchemaError(`${file}: missing field "${key}"`);
  }
  return doc[key];
}

export function loadPortrait(dir: string): PortraitCloud {
  const table = parseCsv(readText(path.join(dir, "portrait.csv")),
                         ["theta", "J", "seed_id"]);
  if (table.rows === 0) {
    throw new SchemaError("portrait.csv has no points; refusing to render " +
      "a blank figure");
  }
  return {
    theta: numbers(table, "theta"),
    momentumJ: numbers(table, "J"),
    seedId: numbers(table, "seed_id"),
  };
}

export function loadPortraitMeta(dir: string): PortraitMeta | null {
  const file = path.join(dir, "portrait_meta.json");
  if (!fs.existsSync(file)) {
    return null;
  }
  const doc = readJson(file);
  const fp = need(doc, "fixed_point", file) as Record<string, unknown>;
  const init = need(doc, "initial_state", file) as Record<string, unknown>;
  return {
    epsAbs: need(doc, "eps_abs", file) as number,
    fixedPoint: {
      exists: Boolean(fp.exists),
      theta: fp.theta as number | undefined,
      J: fp.J as number | undefined,
      stable: fp.stable as boolean | undefined,
    },
    initialState: {
      JCenter: need(init, "J_center", file) as number,
      JHalfwidth: need(init, "J_halfwidth", file) as number,
    },
  };
}

export interface HistogramSeries {
  kicks: number[];
  /** per kick: [momentum values, probabilities] */
  frames: Map<number, { n: number[]; p: number[] }>;
}

export function loadHistograms(dir: string): HistogramSeries {
  const table = parseCsv(readText(path.join(dir, "histograms.csv")),
                         ["t", "n", "prob"]);
  if (table.rows === 0) {
    throw new SchemaError("histograms.csv has no rows");
  }
  const t = numbers(table, "t");
  const n = numbers(table, "n");
  const p = numbers(table, "prob");
  const frames = new Map<number, { n: number[]; p: number[] }>();
  for (let i = 0; i < t.length; i++) {
    let frame = frames.get(t[i]);
    if (!frame) {
      frame = { n: [], p: [] };
      frames.set(t[i], frame);
    }
    frame.n.push(n[i]);
    frame.p.push(p[i]);
  }
  return { kicks: [...frames.keys()].sort((a, b) => a - b), frames };
}

export function loadSurvival(dir: string): { t: number[]; p: number[] } {
  const table = parseCsv(readText(path.join(dir, "survival.csv")), ["t", "p"]);
  if (table.rows === 0) {
    throw new SchemaError("survival.csv has no rows");
  }
  return { t: numbers(table, "t"), p: numbers(table, "p") };
}

export function loadDecay(dir: string): DecayFit | null {
  const file = path.join(dir, "decay.json");
  if (!fs.existsSync(file)) {
    return null;
  }
  const doc = readJson(file);
  const win = need(doc, "fit_window", file) as number[];
  return {
    gamma: need(doc, "gamma", file) as number,
    gammaErr: need(doc, "gamma_err", file) as number,
    logIntercept: need(doc, "log_intercept", file) as number,
    fitWindow: [win[0], win[1]],
    t0: need(doc, "t0", file) as number,
  };
}

export function loadRates(dir: string): RatesRow[] {
  const table = parseCsv(
    readText(path.join(dir, "rates.csv")),
    ["run_id", "k", "tau", "eta", "p_se", "A", "eps_abs", "A_over_hbar",
     "gamma", "gamma_err"],
    ["run_id"],
  );
  const rows: RatesRow[] = [];
  for (let i = 0; i < table.rows; i++) {
    rows.push({
      runId: table.columns.run_id[i] as string,
      pSe: table.columns.p_se[i] as number,
      aOverHbar: table.columns.A_over_hbar[i] as number,
      gamma: table.columns.gamma[i] as number,
      gammaErr: table.columns.gamma_err[i] as number,
    });
  }
  return rows;
}

export function loadScaling(dir: string): ScalingFit | null {
  const file = path.join(dir, "scaling.json");
  if (!fs.existsSync(file)) {
    return null;
  }
  const doc = readJson(file);
  return {
    slope: need(doc, "slope", file) as number,
    intercept: need(doc, "intercept", file) as number,
    slopeErr: need(doc, "slope_err", file) as number,
  };
}
